"""Potential, droplet geometry and equilibrium-measure functionals.

The external field with d-fold symmetry and deformation t >= 0 is

    V(z) = |z|^{2d} - t (z^d + conj(z)^d),

optionally carrying a point charge at the origin,

    V^(c)(z) = V(z) - (2c/n) log|z|,      c > -1.

The droplet (support of the equilibrium measure) is the filled lemniscate

    S = { z : (Re z^d - t)^2 + (Im z^d)^2 <= 1/d },

with equilibrium density d^2 |z|^{2d-2} / pi on S.  At t = 1/sqrt(d) the
droplet changes topology: d disjoint components for larger t, a single
component containing the origin for smaller t.

Under w = z^d the droplet maps to the disk |w - t| <= 1/sqrt(d) and the
equilibrium measure pushes forward to the uniform probability measure on
that disk.  Every functional below (energy, Robin constant, entropy,
log-potential, conformal-metric integral) is reduced to a smooth disk
integral this way; the only singular pieces, of the form log|w| with the
origin inside the disk, are integrated in closed form via the mean-value
identity

    int_{|w-p|<R} log|z-w| d2w/pi = R^2 log|z-p|                 (|z-p| > R)
                                  = R^2 log R - R^2/2 + |z-p|^2/2 (|z-p| < R).
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import CriticalRegimeError, DomainError, SingularInputError

CRITICAL_TOL = 1e-9  # relative width of the band classified as critical

CLOSED_FORM = "closed-form"
QUADRATURE = "quadrature"


@dataclass(frozen=True)
class LemniscateParams:
    """Model parameters: symmetry order d, deformation t, point charge c."""

    d: int
    t: float
    c: float = 0.0

    def __post_init__(self):
        if not isinstance(self.d, int) or self.d < 1:
            raise DomainError(f"d must be a positive integer, got {self.d}")
        if self.t < 0:
            raise DomainError(f"t must be nonnegative, got {self.t}")
        if self.c <= -1:
            raise DomainError(f"c must exceed -1, got {self.c}")


class Regime(Enum):
    MULTI_COMPONENT = "multi-component"
    CONFORMAL_SINGULARITY = "conformal-singularity"
    CRITICAL = "critical"


def critical_t(d: int) -> float:
    """Deformation at which the droplet changes topology: 1/sqrt(d)."""
    if d < 1:
        raise DomainError(f"d must be a positive integer, got {d}")
    return 1.0 / math.sqrt(d)


def regime(p: LemniscateParams, tol: float = CRITICAL_TOL) -> Regime:
    """Classify t against the critical value, with a relative tolerance band."""
    if tol < 0:
        raise DomainError(f"tol must be nonnegative, got {tol}")
    tc = critical_t(p.d)
    band = tol * tc
    if p.t > tc + band:
        return Regime.MULTI_COMPONENT
    if p.t < tc - band:
        return Regime.CONFORMAL_SINGULARITY
    return Regime.CRITICAL


def require_noncritical(p: LemniscateParams, tol: float = CRITICAL_TOL) -> Regime:
    r = regime(p, tol)
    if r is Regime.CRITICAL:
        raise CriticalRegimeError(
            f"t = {p.t} is at the phase transition t_c = {critical_t(p.d)}; "
            "no expansion is defined there"
        )
    return r


def potential_value(p: LemniscateParams, z: complex, n: int | None = None) -> float:
    """V(z), or V^(c)(z) = V(z) - (2c/n) log|z| when the particle number n is given."""
    zd = complex(z) ** p.d
    val = abs(zd) ** 2 - 2.0 * p.t * zd.real
    if n is not None and p.c != 0.0:
        az = abs(z)
        if az == 0.0:
            raise SingularInputError("potential with point charge is singular at z = 0")
        val -= 2.0 * p.c / n * math.log(az)
    return val


def droplet_contains(p: LemniscateParams, z: complex) -> bool:
    zd = complex(z) ** p.d
    return (zd.real - p.t) ** 2 + zd.imag**2 <= 1.0 / p.d


def equilibrium_density(p: LemniscateParams, z: complex) -> float:
    """Equilibrium density d^2 |z|^{2d-2} / pi inside the droplet, 0 outside."""
    if not droplet_contains(p, z):
        return 0.0
    return p.d**2 * abs(z) ** (2 * p.d - 2) / math.pi


def droplet_boundary(p: LemniscateParams, samples: int) -> np.ndarray:
    """Boundary points: all d-th roots of t + R e^{i theta}, theta uniform.

    Returns a complex array of ``d * samples`` points; R = 1/sqrt(d).
    """
    if samples < 1:
        raise DomainError(f"samples must be positive, got {samples}")
    radius = 1.0 / math.sqrt(p.d)
    thetas = 2.0 * np.pi * np.arange(samples) / samples
    w = p.t + radius * np.exp(1j * thetas)
    principal = np.abs(w) ** (1.0 / p.d) * np.exp(1j * np.angle(w) / p.d)
    sectors = np.exp(2j * np.pi * np.arange(p.d) / p.d)
    return (principal[None, :] * sectors[:, None]).ravel()


def boundary_residual(p: LemniscateParams, z: complex) -> float:
    """|lemniscate equation| at z; vanishes on the droplet boundary."""
    zd = complex(z) ** p.d
    return abs((zd.real - p.t) ** 2 + zd.imag**2 - 1.0 / p.d)


def count_boundary_loops(points: np.ndarray, tol: float | None = None) -> int:
    """Number of connected loops under nearest-neighbour chaining.

    ``tol`` defaults to 10x the sample spacing, taken as the largest
    nearest-neighbour distance (the coarsest local spacing, so nonuniform
    parametrizations do not split a loop).
    """
    pts = np.asarray(points, dtype=complex)
    npts = len(pts)
    if npts == 0:
        return 0
    dist = np.abs(pts[:, None] - pts[None, :])
    np.fill_diagonal(dist, np.inf)
    if tol is None:
        tol = 10.0 * float(dist.min(axis=1).max())
    unused = np.ones(npts, dtype=bool)
    loops = 0
    for start in range(npts):
        if not unused[start]:
            continue
        loops += 1
        unused[start] = False
        current = start
        while True:
            row = np.where(unused, dist[current], np.inf)
            nxt = int(np.argmin(row))
            if row[nxt] > tol:
                break
            unused[nxt] = False
            current = nxt
    return loops


def euler_characteristic(p: LemniscateParams, tol: float = CRITICAL_TOL) -> int:
    """Number of droplet components: d above the transition, 1 below."""
    r = require_noncritical(p, tol)
    return p.d if r is Regime.MULTI_COMPONENT else 1


# ---------------------------------------------------------------------------
# disk quadrature (image of the droplet under w = z^d)
# ---------------------------------------------------------------------------


def _disk_nodes(center: float, radius: float, n_r: int, n_th: int):
    x, wx = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * radius * (x + 1.0)
    wr = 0.5 * radius * wx
    th = 2.0 * np.pi * (np.arange(n_th) + 0.5) / n_th
    dth = 2.0 * np.pi / n_th
    W = center + r[:, None] * np.exp(1j * th[None, :])
    weights = (r * wr)[:, None] * np.full((1, n_th), dth) / np.pi
    return W, weights


def disk_integral(f, center: float, radius: float, n_r: int = 96, n_th: int | None = None) -> float:
    """int_{|w-center|<radius} f(w) d2w / pi by Gauss-Legendre x uniform angles.

    ``f`` must accept a complex ndarray.  The angular count defaults to
    4x the radial count, which keeps the trapezoid rule spectrally accurate
    for the smooth integrands used here.
    """
    if n_th is None:
        n_th = max(4 * n_r, 16)
    W, weights = _disk_nodes(center, radius, n_r, n_th)
    vals = f(W)
    return float(np.sum(vals * weights))


@dataclass
class EnergyReport:
    """Weighted-energy functionals of the equilibrium measure."""

    energy: float
    robin_constant: float
    entropy: float
    method: str


def _closed_energy(p: LemniscateParams) -> float:
    return 3.0 / (4 * p.d) + math.log(p.d) / (2 * p.d) - p.t**2


def robin_constant(p: LemniscateParams) -> float:
    """Constant in the variational conditions for the equilibrium measure."""
    return 1.0 / (2 * p.d) + math.log(p.d) / (2 * p.d) - p.t**2 / 2.0


def entropy_integral(p: LemniscateParams, method: str = CLOSED_FORM, tol: float = CRITICAL_TOL) -> float:
    """int log(Delta V) dsigma over the droplet.

    In the w-disk this is 2 log d + 2(d-1) int log|w| d2w/pi.  Above the
    transition the origin is outside the disk and the integral is smooth;
    below it the log singularity sits inside and is evaluated in closed
    form via the mean-value identity (no quadrature can see it).
    """
    r = require_noncritical(p, tol)
    d, t = p.d, p.t
    radius = 1.0 / math.sqrt(d)
    if method == CLOSED_FORM:
        if r is Regime.MULTI_COMPONENT:
            return 2.0 * math.log(d) + 2.0 * (d - 1) / d * math.log(t)
        return (d - 1) / d * (d * t**2 - 1.0) + (1 + d) / d * math.log(d)
    if method != QUADRATURE:
        raise DomainError(f"unknown method {method!r}")
    if r is Regime.MULTI_COMPONENT:
        lw = disk_integral(lambda w: np.log(np.abs(w)), t, radius)
    else:
        lw = radius**2 * math.log(radius) - radius**2 / 2.0 + t**2 / 2.0
    return 2.0 * math.log(d) + 2.0 * (d - 1) * lw


def equilibrium_energy(p: LemniscateParams, method: str = CLOSED_FORM, tol: float = CRITICAL_TOL) -> EnergyReport:
    """Energy, Robin constant and entropy of the equilibrium measure.

    Closed form:  I = 3/(4d) + log(d)/(2d) - t^2.
    Quadrature:   the double logarithmic integral is reduced by the
    mean-value identity to a polynomial over the w-disk, then integrated
    numerically together with int V dsigma; the Robin constant follows
    from I = F + (1/2) int V dsigma.
    """
    d, t = p.d, p.t
    radius = 1.0 / math.sqrt(d)
    if method == CLOSED_FORM:
        return EnergyReport(
            energy=_closed_energy(p),
            robin_constant=robin_constant(p),
            entropy=entropy_integral(p, CLOSED_FORM, tol),
            method=CLOSED_FORM,
        )
    if method != QUADRATURE:
        raise DomainError(f"unknown method {method!r}")

    # inner integral of log|v - u| over the disk, evaluated at v inside it
    def jensen_inner(v):
        return radius**2 * math.log(radius) - radius**2 / 2.0 + np.abs(v - t) ** 2 / 2.0

    log_part = -d * disk_integral(jensen_inner, t, radius)
    v_part = disk_integral(lambda u: d * np.abs(u - t) ** 2 - d * t**2, t, radius)
    energy = log_part + v_part
    return EnergyReport(
        energy=energy,
        robin_constant=energy - v_part / 2.0,
        entropy=entropy_integral(p, QUADRATURE, tol),
        method=QUADRATURE,
    )


def log_potential(p: LemniscateParams, z: complex) -> float:
    """Logarithmic potential int log(1/|z-w|) dsigma(w) of the equilibrium measure."""
    radius = 1.0 / math.sqrt(p.d)
    w0 = complex(z) ** p.d
    dist = abs(w0 - p.t)
    if dist > radius:
        inner = radius**2 * math.log(dist)
    else:
        inner = radius**2 * math.log(radius) - radius**2 / 2.0 + dist**2 / 2.0
    # the 1/d from averaging over the d-th roots cancels the pushforward mass d
    return -inner


def equilibrium_mass(p: LemniscateParams, n_r: int = 96) -> float:
    """Total equilibrium mass by disk quadrature (should be 1)."""
    radius = 1.0 / math.sqrt(p.d)
    return disk_integral(lambda w: np.full(w.shape, float(p.d)), p.t, radius, n_r=n_r)


# ---------------------------------------------------------------------------
# conformal-metric integral
# ---------------------------------------------------------------------------


def _arc_angle(r: np.ndarray, t: float, radius: float) -> np.ndarray:
    """Half-opening angle of the circle |w| = r inside the disk |w - t| < radius."""
    with np.errstate(invalid="ignore", divide="ignore"):
        cosv = (r**2 + t**2 - radius**2) / (2.0 * r * t)
    return np.arccos(np.clip(cosv, -1.0, 1.0))


def _inverse_square_disk_integral(t: float, radius: float, rho0: float) -> float:
    """int_{disk(t,radius), |w|>rho0} |w|^{-2} d2w/pi."""
    hi = t + radius
    if rho0 >= hi:
        return 0.0
    total = 0.0
    if t < radius:
        # origin inside the disk: circles |w| = r < radius - t are complete
        lo_full = radius - t
        if rho0 <= 0.0:
            raise DomainError("inverse-square integral diverges without a positive cutoff")
        if rho0 < lo_full:
            total += 2.0 * math.log(lo_full / rho0)  # exact annulus part
            band_lo = lo_full
        else:
            band_lo = rho0
    else:
        band_lo = max(t - radius, rho0)
    if band_lo >= hi:
        return total
    # remaining band: the arc angle has square-root behaviour at the
    # endpoints, so integrate on cosine-graded panels
    edges = band_lo + (hi - band_lo) * 0.5 * (1.0 - np.cos(np.linspace(0.0, np.pi, 33)))
    x, wx = np.polynomial.legendre.leggauss(24)
    for a, b in zip(edges[:-1], edges[1:]):
        r = 0.5 * (b - a) * (x + 1.0) + a
        w = 0.5 * (b - a) * wx
        theta = _arc_angle(r, t, radius)
        total += float(np.sum(w * 2.0 * theta / (np.pi * r)))
    return total


def regularized_conformal_integral(
    p: LemniscateParams, n: int, cutoff_const: float = 1.0, tol: float = CRITICAL_TOL
) -> float:
    """(1/12) int_{S, |z| > cutoff * n^{-1/(2d)}} |grad phi|^2 d2z/pi.

    Here phi = (1/2) log Delta V is the conformal-metric factor, so
    |grad phi|^2 = (d-1)^2/|z|^2.  Below the transition the origin lies in
    the droplet and the integral grows like (d-1)^2/(12d) log n; above it
    the integral is finite and the cutoff is ignored.
    """
    if n < 2:
        raise DomainError(f"n must be at least 2, got {n}")
    if cutoff_const <= 0:
        raise DomainError(f"cutoff_const must be positive, got {cutoff_const}")
    d, t = p.d, p.t
    if d == 1:
        return 0.0
    r = require_noncritical(p, tol)
    radius = 1.0 / math.sqrt(d)
    if r is Regime.MULTI_COMPONENT:
        rho0 = 0.0  # origin outside the droplet; integral already finite
    else:
        rho0 = (cutoff_const * n ** (-1.0 / (2 * d))) ** d
    base = _inverse_square_disk_integral(t, radius, rho0)
    return (d - 1) ** 2 / (12.0 * d) * base


def conformal_log_fit(p: LemniscateParams, n_grid, cutoff_const: float = 1.0):
    """Least-squares coefficient of log n in the regularized conformal integral."""
    ns = np.asarray(sorted(n_grid), dtype=float)
    vals = np.array([regularized_conformal_integral(p, int(n), cutoff_const) for n in ns])
    coeff, intercept = np.polyfit(np.log(ns), vals, 1)
    return float(coeff), float(intercept)


def export_boundary_density(p: LemniscateParams, samples: int, path) -> None:
    """Write boundary points and the equilibrium density there as CSV (re, im, density)."""
    pts = droplet_boundary(p, samples)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["re", "im", "density"])
        for z in pts:
            dens = p.d**2 * abs(z) ** (2 * p.d - 2) / math.pi
            writer.writerow([repr(z.real), repr(z.imag), repr(dens)])
