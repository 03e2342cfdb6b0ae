"""Metropolis sampling of the Coulomb-gas Gibbs measure, and checks of the
sampled cloud against the equilibrium measure.

The chain targets the density proportional to exp(-E) with

    E = -2 sum_{j<k} log|z_j - z_k| + sum_j ( n V(z_j) - 2c log|z_j| ),

using single-site Gaussian proposals.  The step size is auto-tuned toward
30-50% acceptance during the first fifth of the burn-in phase and frozen
afterwards, so the post-tuning chain is a proper Metropolis chain.  This
is a validation and visualization tool: no free-energy estimates are
derived from samples (their variance swamps the O(1) terms of interest).

``sample_equilibrium`` draws directly from the equilibrium measure
(uniform on the disk |w - t| <= 1/sqrt(d) in w = z^d, then a uniformly
random d-th root), which serves as the independent reference for the
radial pushforward statistics in ``empirical_vs_equilibrium``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .model import LemniscateParams, droplet_boundary, droplet_contains

DEFAULT_BURN_IN = 10_000
_TUNE_BLOCK = 100  # sweeps per step-size adjustment during tuning


@dataclass
class SampleCloud:
    params: LemniscateParams
    n: int
    seed: int
    points: np.ndarray
    acceptance_rate: float
    sweeps: int
    step: float
    tuning_failed: bool = False


def _potential_terms(p: LemniscateParams, z: np.ndarray, n: int) -> np.ndarray:
    zd = z**p.d
    vals = np.abs(zd) ** 2 - 2.0 * p.t * zd.real
    out = n * vals
    if p.c != 0.0:
        with np.errstate(divide="ignore"):
            out = out - 2.0 * p.c * np.log(np.abs(z))
    return out


def sample_gas(
    p: LemniscateParams,
    n: int,
    sweeps: int,
    step: float | None = None,
    seed: int = 0,
    burn_in: int = DEFAULT_BURN_IN,
) -> SampleCloud:
    """Metropolis chain with ``burn_in + sweeps`` single-site sweeps.

    Returns the final configuration; ``acceptance_rate`` is measured over
    the post-burn-in sweeps.  Deterministic for a fixed seed.
    """
    if n < 2:
        raise DomainError(f"need at least 2 particles, got {n}")
    if sweeps < 1:
        raise DomainError(f"sweeps must be positive, got {sweeps}")
    if step is not None and step <= 0:
        raise DomainError(f"step must be positive, got {step}")
    rng = np.random.default_rng(seed)
    # start inside the droplet: equilibrium draws speed up equilibration
    z = sample_equilibrium(p, n, seed=rng.integers(1 << 31))
    step_size = step if step is not None else 1.0 / math.sqrt(n)
    tune_until = burn_in // 5
    total_sweeps = burn_in + sweeps
    accepted_measure = 0
    proposed_measure = 0
    block_accepted = 0
    block_proposed = 0
    pot = _potential_terms(p, z, n)
    with np.errstate(divide="ignore", invalid="ignore"):
        for sweep in range(total_sweeps):
            noise = rng.standard_normal((n, 2))
            uniforms = rng.random(n)
            for i in range(n):
                zi_new = z[i] + step_size * complex(noise[i, 0], noise[i, 1])
                dz_old = z - z[i]
                dz_new = z - zi_new
                dz_old[i] = 1.0
                dz_new[i] = 1.0
                log_old = np.log(np.abs(dz_old)).sum()
                log_new = np.log(np.abs(dz_new)).sum()
                pot_new = _potential_terms(p, np.array([zi_new]), n)[0]
                delta = (pot_new - pot[i]) - 2.0 * (log_new - log_old)
                if uniforms[i] < math.exp(-min(max(delta, -700.0), 700.0)):
                    z[i] = zi_new
                    pot[i] = pot_new
                    if sweep >= burn_in:
                        accepted_measure += 1
                    block_accepted += 1
                if sweep >= burn_in:
                    proposed_measure += 1
                block_proposed += 1
            if sweep < tune_until and step is None and block_proposed >= _TUNE_BLOCK * n:
                rate = block_accepted / block_proposed
                if rate < 0.30:
                    step_size /= 2.0
                elif rate > 0.50:
                    step_size *= 2.0
                block_accepted = block_proposed = 0
    acceptance = accepted_measure / max(proposed_measure, 1)
    tuning_failed = not 0.05 < acceptance < 0.95
    if tuning_failed:
        warnings.warn(
            f"step tuning failed: post-burn-in acceptance {acceptance:.3f} outside (0.05, 0.95)",
            RuntimeWarning,
        )
    return SampleCloud(
        params=p,
        n=n,
        seed=seed,
        points=z,
        acceptance_rate=acceptance,
        sweeps=sweeps,
        step=step_size,
        tuning_failed=tuning_failed,
    )


def sample_equilibrium(p: LemniscateParams, n: int, seed: int = 0) -> np.ndarray:
    """Direct draws from the equilibrium measure by inverse transform:
    uniform on the w-disk, then a uniformly chosen d-th root."""
    rng = np.random.default_rng(seed)
    radius = 1.0 / math.sqrt(p.d)
    w = p.t + radius * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))
    roots = np.abs(w) ** (1.0 / p.d) * np.exp(1j * np.angle(w) / p.d)
    sector = rng.integers(0, p.d, size=n)
    return roots * np.exp(2j * np.pi * sector / p.d)


def droplet_distances(p: LemniscateParams, points: np.ndarray, boundary_samples: int = 4096) -> np.ndarray:
    """Euclidean distance from each point to the droplet (0 inside)."""
    pts = np.asarray(points, dtype=complex)
    inside = np.array([droplet_contains(p, z) for z in pts])
    dists = np.zeros(len(pts))
    outside_idx = np.nonzero(~inside)[0]
    if len(outside_idx):
        boundary = droplet_boundary(p, boundary_samples)
        for i in outside_idx:
            dists[i] = np.abs(boundary - pts[i]).min()
    return dists


def _lens_area(rho: float, dist: float, radius: float) -> float:
    """Area of the intersection of |w| < rho with |w - p| < radius, |p| = dist."""
    if rho <= 0:
        return 0.0
    if dist <= 1e-15:
        return math.pi * min(rho, radius) ** 2
    if rho >= dist + radius:
        return math.pi * radius**2
    if rho + radius <= dist:
        return 0.0
    if radius >= dist + rho:
        return math.pi * rho**2
    c1 = (dist**2 + rho**2 - radius**2) / (2 * dist * rho)
    c2 = (dist**2 + radius**2 - rho**2) / (2 * dist * radius)
    c1 = min(1.0, max(-1.0, c1))
    c2 = min(1.0, max(-1.0, c2))
    term = (-dist + rho + radius) * (dist + rho - radius) * (dist - rho + radius) * (dist + rho + radius)
    return rho**2 * math.acos(c1) + radius**2 * math.acos(c2) - 0.5 * math.sqrt(max(term, 0.0))


def radial_pushforward_cdf(p: LemniscateParams, rho: float) -> float:
    """CDF of |z|^d under the equilibrium measure (uniform law on the w-disk)."""
    radius = 1.0 / math.sqrt(p.d)
    return p.d / math.pi * _lens_area(rho, p.t, radius)


@dataclass
class EmpiricalStats:
    in_droplet_fraction: float
    sup_distance: float
    bin_edges: np.ndarray
    observed: np.ndarray
    expected: np.ndarray


def empirical_vs_equilibrium(points: np.ndarray, p: LemniscateParams, radial_bins: int = 64) -> EmpiricalStats:
    """Compare the radial pushforward |z|^d of a cloud with the equilibrium law.

    The sup-distance is taken between the cumulative normalized histogram
    and the exact CDF at the bin edges (a binned Kolmogorov-Smirnov
    statistic).
    """
    pts = np.asarray(points, dtype=complex)
    if len(pts) == 0:
        raise DomainError("empty point cloud")
    s = np.abs(pts) ** p.d
    radius = 1.0 / math.sqrt(p.d)
    hi = max(float(s.max()), p.t + radius)
    edges = np.linspace(0.0, hi * 1.0001, radial_bins + 1)
    observed, _ = np.histogram(s, bins=edges)
    observed = observed / len(pts)
    cdf = np.array([radial_pushforward_cdf(p, e) for e in edges])
    expected = np.diff(cdf)
    sup = float(np.max(np.abs(np.cumsum(observed) - cdf[1:])))
    frac = float(np.mean([droplet_contains(p, z) for z in pts]))
    return EmpiricalStats(
        in_droplet_fraction=frac,
        sup_distance=sup,
        bin_edges=edges,
        observed=observed,
        expected=expected,
    )
