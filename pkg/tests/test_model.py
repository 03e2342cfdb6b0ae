"""Droplet geometry, equilibrium measure and its energy functionals."""

import csv
import math

import numpy as np
import pytest

from lemniscate_lab import model
from lemniscate_lab.errors import CriticalRegimeError, DomainError, SingularInputError
from lemniscate_lab.model import CLOSED_FORM, QUADRATURE, LemniscateParams, Regime


def test_params_validation():
    with pytest.raises(DomainError):
        LemniscateParams(0, 1.0)
    with pytest.raises(DomainError):
        LemniscateParams(2, -0.1)
    with pytest.raises(DomainError):
        LemniscateParams(2, 0.5, -1.0)


def test_potential_simple_values():
    assert model.potential_value(LemniscateParams(1, 0.0), 2.0) == pytest.approx(4.0)
    # d=2, t=1 at z=1: |z|^4 - t(z^2 + conj(z)^2) = 1 - 2
    assert model.potential_value(LemniscateParams(2, 1.0), 1.0) == pytest.approx(-1.0)


def test_potential_point_charge_and_singularity():
    p = LemniscateParams(1, 0.5, 0.7)
    base = model.potential_value(p, 2.0)
    with_charge = model.potential_value(p, 2.0, n=10)
    assert with_charge == pytest.approx(base - 2 * 0.7 / 10 * math.log(2.0))
    with pytest.raises(SingularInputError):
        model.potential_value(p, 0.0, n=10)
    # c = 0 carries no charge term, so the origin is fine
    assert model.potential_value(LemniscateParams(1, 0.5), 0.0, n=10) == pytest.approx(0.0)


def test_potential_discrete_symmetry():
    p = LemniscateParams(3, 0.6, 0.0)
    rng = np.random.default_rng(5)
    rot = complex(math.cos(2 * math.pi / 3), math.sin(2 * math.pi / 3))
    for _ in range(100):
        z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        v1 = model.potential_value(p, z)
        v2 = model.potential_value(p, rot * z)
        assert abs(v1 - v2) < 1e-14 * max(1.0, abs(v1))
        assert abs(model.equilibrium_density(p, z) - model.equilibrium_density(p, rot * z)) < 1e-13


def test_critical_t_values():
    assert model.critical_t(4) == pytest.approx(0.5)
    assert model.critical_t(1) == pytest.approx(1.0)
    assert model.critical_t(2) == pytest.approx(1 / math.sqrt(2))


def test_regime_classification():
    assert model.regime(LemniscateParams(2, 0.75)) is Regime.MULTI_COMPONENT
    assert model.regime(LemniscateParams(3, 0.55)) is Regime.CONFORMAL_SINGULARITY
    assert model.regime(LemniscateParams(1, 1.0), tol=1e-12) is Regime.CRITICAL


def test_droplet_contains():
    assert model.droplet_contains(LemniscateParams(1, 0.0), 0.5)
    assert not model.droplet_contains(LemniscateParams(2, 0.75), 0.0)  # 0.75^2 > 1/2
    assert model.droplet_contains(LemniscateParams(2, 0.65), 0.0)  # 0.65^2 < 1/2


def test_boundary_points_satisfy_equation():
    for (d, t) in [(1, 0.0), (2, 0.75), (3, 0.55)]:
        p = LemniscateParams(d, t)
        pts = model.droplet_boundary(p, 64)
        assert len(pts) == 64 * d
        assert max(model.boundary_residual(p, z) for z in pts) < 1e-12


def test_boundary_unit_circle_for_ginibre():
    pts = model.droplet_boundary(LemniscateParams(1, 0.0), 8)
    assert np.allclose(np.abs(pts), 1.0, atol=1e-14)


@pytest.mark.parametrize(
    "d,t,samples,expected",
    [(2, 0.75, 512, 2), (2, 0.65, 512, 1), (3, 0.6, 1024, 3), (3, 0.55, 1024, 1), (1, 0.3, 64, 1)],
)
def test_boundary_loops_match_euler_characteristic(d, t, samples, expected):
    p = LemniscateParams(d, t)
    loops = model.count_boundary_loops(model.droplet_boundary(p, samples))
    assert loops == expected
    assert model.euler_characteristic(p) == expected


def test_euler_characteristic_values_and_critical():
    assert model.euler_characteristic(LemniscateParams(3, 0.6)) == 3
    assert model.euler_characteristic(LemniscateParams(3, 0.55)) == 1
    assert model.euler_characteristic(LemniscateParams(1, 0.2)) == 1
    with pytest.raises(CriticalRegimeError):
        model.euler_characteristic(LemniscateParams(4, 0.5))


def test_equilibrium_density_values():
    assert model.equilibrium_density(LemniscateParams(1, 0.0), 0.3) == pytest.approx(1 / math.pi)
    assert model.equilibrium_density(LemniscateParams(2, 0.65), 0.0) == 0.0
    # outside the droplet
    assert model.equilibrium_density(LemniscateParams(1, 0.0), 2.0) == 0.0


def test_equilibrium_mass_is_one():
    for (d, t) in [(1, 0.0), (2, 0.65), (2, 1.0), (3, 0.5), (3, 0.9)]:
        assert abs(model.equilibrium_mass(LemniscateParams(d, t)) - 1.0) < 1e-8


def test_energy_closed_forms():
    # quadratic potential: I = 3/4
    assert model.equilibrium_energy(LemniscateParams(1, 0.0)).energy == pytest.approx(0.75)
    # d = 2, t = 0
    assert model.equilibrium_energy(LemniscateParams(2, 0.0)).energy == pytest.approx(
        3 / 8 + math.log(2) / 4
    )


def test_energy_quadrature_matches_closed_form():
    p = LemniscateParams(2, 1.0)
    closed = model.equilibrium_energy(p, CLOSED_FORM)
    quad = model.equilibrium_energy(p, QUADRATURE)
    assert abs(closed.energy - quad.energy) < 1e-8
    assert abs(closed.robin_constant - quad.robin_constant) < 1e-8
    assert quad.method == QUADRATURE


def test_energy_identity_energy_equals_robin_plus_half_potential():
    # I = F + (1/2) int V dsigma, with the integral evaluated independently
    for (d, t) in [(2, 1.0), (3, 0.5)]:
        p = LemniscateParams(d, t)
        rep = model.equilibrium_energy(p, QUADRATURE)
        radius = 1 / math.sqrt(d)
        int_v = model.disk_integral(lambda u: d * np.abs(u - t) ** 2 - d * t**2, t, radius)
        assert abs(rep.energy - rep.robin_constant - 0.5 * int_v) < 1e-10


def test_entropy_values_and_quadrature():
    # d = 1: Delta V = 1 makes both branch formulas vanish
    assert model.entropy_integral(LemniscateParams(1, 0.3)) == pytest.approx(0.0)
    assert model.entropy_integral(LemniscateParams(1, 1.7)) == pytest.approx(0.0)
    # d = 2, t = 1 (multi-component): 2 log 2
    assert model.entropy_integral(LemniscateParams(2, 1.0)) == pytest.approx(2 * math.log(2))
    p = LemniscateParams(3, 0.5)
    assert abs(
        model.entropy_integral(p, QUADRATURE) - model.entropy_integral(p, CLOSED_FORM)
    ) < 1e-6
    pm = LemniscateParams(3, 0.9)
    assert abs(
        model.entropy_integral(pm, QUADRATURE) - model.entropy_integral(pm, CLOSED_FORM)
    ) < 1e-8


def test_critical_inputs_are_refused():
    p = LemniscateParams(4, 0.5)
    with pytest.raises(CriticalRegimeError):
        model.entropy_integral(p)
    with pytest.raises(CriticalRegimeError):
        model.equilibrium_energy(p)


def test_variational_conditions():
    rng = np.random.default_rng(21)
    for (d, t, c) in [(2, 1.0, 0.0), (3, 0.5, 0.0), (1, 0.4, 0.0)]:
        p = LemniscateParams(d, t, c)
        f_const = model.robin_constant(p)
        interior = exterior = 0
        while interior < 20 or exterior < 20:
            z = complex(rng.uniform(-1.8, 1.8), rng.uniform(-1.8, 1.8))
            val = model.log_potential(p, z) + 0.5 * model.potential_value(p, z)
            if model.droplet_contains(p, z) and interior < 20:
                assert abs(val - f_const) < 1e-12
                interior += 1
            elif not model.droplet_contains(p, z) and exterior < 20:
                assert val >= f_const - 1e-12
                exterior += 1


def test_conformal_integral_ginibre_is_zero():
    p = LemniscateParams(1, 0.4)
    for n in (10, 100, 1000):
        assert model.regularized_conformal_integral(p, n) == 0.0


def test_conformal_log_coefficient_d2():
    coeff, _ = model.conformal_log_fit(LemniscateParams(2, 0.5), [64, 128, 256, 512, 1024])
    assert abs(coeff - 1 / 24) < 0.05 / 24


def test_conformal_cutoff_shift_is_constant():
    p = LemniscateParams(2, 0.5)
    shifts = [
        model.regularized_conformal_integral(p, n, 1.0) - model.regularized_conformal_integral(p, n, 2.0)
        for n in (2000, 8000, 32000)
    ]
    # doubling the cutoff shifts by (d-1)^2/(12d) * 2d log 2, independent of n
    expected = 1 / 24 * 2 * 2 * math.log(2) / 2
    assert np.allclose(shifts, shifts[0], atol=1e-9)
    assert shifts[0] == pytest.approx(math.log(2) / 6, rel=1e-6)
    assert expected == pytest.approx(math.log(2) / 6)


def test_conformal_integral_above_transition_is_plain():
    p = LemniscateParams(2, 1.0)
    v1 = model.regularized_conformal_integral(p, 10)
    v2 = model.regularized_conformal_integral(p, 10000)
    assert v1 == pytest.approx(v2)  # no cutoff dependence: integral is finite
    with pytest.raises(DomainError):
        model.regularized_conformal_integral(p, 1)


def test_boundary_density_csv_export(tmp_path):
    p = LemniscateParams(2, 0.75)
    path = tmp_path / "boundary.csv"
    model.export_boundary_density(p, 16, path)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["re", "im", "density"]
    assert len(rows) == 1 + 16 * 2
    z = complex(float(rows[1][0]), float(rows[1][1]))
    assert model.boundary_residual(p, z) < 1e-12
    assert float(rows[1][2]) == pytest.approx(4 * abs(z) ** 2 / math.pi)
