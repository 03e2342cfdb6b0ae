"""Convergence studies: exact free energies against their expansions.

``run_convergence`` tabulates exact and asymptotic values over an n-grid,
fits the remainder exponent by least squares in log-log, and
``extract_oscillation`` isolates the O(1) residual per congruence class of
n mod d, where the bounded oscillation lives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import gmpy2
import numpy as np

from .asympt import coefficients, expansion_value
from .errors import DomainError
from .exactz import DEGREE_CAP, log_Z_lemniscate
from .model import LemniscateParams, Regime, require_noncritical
from .precision import DEFAULT_BITS, context


@dataclass
class ConvergenceRow:
    n: int
    exact: float
    asymptotic: float
    remainder: float


@dataclass
class ConvergenceReport:
    params: LemniscateParams
    rows: list[ConvergenceRow]
    fitted_exponent: float
    fitted_constant: float
    bits: int


def fit_remainder_exponent(ns, remainders, noise_floor: float = 0.0):
    """Least-squares slope and prefactor of |remainder| ~ K n^slope.

    Points below ``noise_floor`` in magnitude are excluded (they carry no
    information beyond the working precision).
    """
    xs, ys = [], []
    for n, r in zip(ns, remainders):
        if abs(r) > noise_floor:
            xs.append(math.log(n))
            ys.append(math.log(abs(r)))
    if len(xs) < 2:
        raise DomainError("not enough remainder points above the noise floor to fit")
    slope, intercept = np.polyfit(np.array(xs), np.array(ys), 1)
    return float(slope), float(math.exp(intercept))


def run_convergence(p: LemniscateParams, n_grid, bits: int = DEFAULT_BITS) -> ConvergenceReport:
    """Exact vs asymptotic log Z over ``n_grid``, with the fitted remainder law."""
    require_noncritical(p)
    ns = sorted(set(int(n) for n in n_grid))
    if ns and ns[-1] > p.d * DEGREE_CAP:
        raise DomainError(f"largest n ({ns[-1]}) exceeds the degree cap {p.d * DEGREE_CAP}")
    rows = []
    for n in ns:
        exact = log_Z_lemniscate(n, p, bits)
        asymptotic = expansion_value(p, n, bits)
        with context(bits + 16):
            remainder = float(exact - asymptotic)
        rows.append(ConvergenceRow(n=n, exact=float(exact), asymptotic=float(asymptotic), remainder=remainder))
    noise_floor = 2.0 ** (-(bits // 2))
    exponent, constant = fit_remainder_exponent(
        [r.n for r in rows], [r.remainder for r in rows], noise_floor
    )
    return ConvergenceReport(params=p, rows=rows, fitted_exponent=exponent, fitted_constant=constant, bits=bits)


@dataclass
class OscillationReport:
    """Per-congruence-class O(1) residuals against the predicted oscillation.

    ``class_residuals[m]`` is the constant term of a least-squares fit
    y = G + b/n over the class points (the raw class means are kept in
    ``class_means`` and carry an O(1/n) bias).  ``predicted[m]`` is
    d {m/d}({m/d}-1) log(sqrt(d) t) above the transition and 0 below.
    """

    params: LemniscateParams
    n_grid: list[int] = field(default_factory=list)
    class_residuals: dict = field(default_factory=dict)
    class_means: dict = field(default_factory=dict)
    predicted: dict = field(default_factory=dict)


def extract_oscillation(p: LemniscateParams, n_grid, bits: int = DEFAULT_BITS) -> OscillationReport:
    """Residue-class O(1) residuals of exact log Z minus the smooth expansion.

    The smooth expansion excludes the oscillatory summand of the constant
    term, so what remains per class is (predicted oscillation) + O(1/n);
    the 1/n part is removed by the per-class fit.  Works in both
    noncritical regimes (below the transition the prediction is zero).
    """
    reg = require_noncritical(p)
    d = p.d
    ns = sorted(set(int(n) for n in n_grid))
    per_class: dict[int, list] = {m: [] for m in range(d)}
    for n in ns:
        exact = log_Z_lemniscate(n, p, bits)
        co = coefficients(p, n, bits)
        with context(bits + 16):
            logn = gmpy2.log(n)
            smooth = co.c1 * n * n + co.c2 * n * logn + co.c3 * n + co.c4 * logn + (co.c5 - co.c5_oscillatory)
            per_class[n % d].append((n, float(exact - smooth)))
    report = OscillationReport(params=p, n_grid=ns)
    for m in range(d):
        pts = per_class[m]
        if not pts:
            continue
        ys = np.array([y for _, y in pts])
        report.class_means[m] = float(ys.mean())
        if len(pts) >= 2:
            design = np.array([[1.0, 1.0 / n] for n, _ in pts])
            sol, *_ = np.linalg.lstsq(design, ys, rcond=None)
            report.class_residuals[m] = float(sol[0])
        else:
            report.class_residuals[m] = float(ys.mean())
        if reg is Regime.MULTI_COMPONENT:
            x = m / d
            report.predicted[m] = d * x * (x - 1.0) * math.log(math.sqrt(d) * p.t)
        else:
            report.predicted[m] = 0.0
    return report
