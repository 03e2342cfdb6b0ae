"""Asymptotic coefficient formulas for the free energy expansion.

The expansion reads

    log Z_n = C1 n^2 + C2 n log n + C3 n + C4 log n + C5 + O(1/n),

with C1 = t^2 - 3/(4d) - log(d)/(2d) and C2 = 1/2 in both regimes, and
regime-dependent C3, C4, C5.  In the multi-component regime (t above the
transition) C5 carries a bounded, non-convergent oscillation

    d {n/d} ({n/d} - 1) log(sqrt(d) t)

through the fractional part {n/d}; in the conformal-singularity regime the
oscillation cancels and C4 instead picks up the extra (d-1)^2/(12d).

Also implemented: the per-piece expansions of the three decomposition
terms (whose N- and log N-oscillations cancel in the sum), the functionals
entering the general free-energy form (energy, entropy, Euler
characteristic, the multi-component and conformal-singularity terms), and
the rescaled product formula they are compared against in the
multi-component regime with n divisible by d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from .errors import DomainError, RegimeError, UnsupportedParameterError
from .exactz import log_Z_ginibre
from .model import CRITICAL_TOL, LemniscateParams, Regime, critical_t, require_noncritical
from .precision import DEFAULT_BITS, context
from .specfun import log_barnes_g, log_gamma, zeta_prime_minus_one

_GUARD = 24


@dataclass
class ExpansionCoefficients:
    """The five expansion coefficients at a given particle number.

    ``c5`` is the full constant term (smooth plus oscillatory);
    ``c5_oscillatory`` isolates the {n/d}-dependent summand so tests can
    target it directly.  ``n_dependent`` flags whether c5 varies with the
    congruence class of n.
    """

    c1: mpfr
    c2: mpfr
    c3: mpfr
    c4: mpfr
    c5: mpfr
    c5_oscillatory: mpfr
    regime: Regime
    n_dependent: bool


def coefficients(
    p: LemniscateParams, n: int, bits: int = DEFAULT_BITS, tol: float = CRITICAL_TOL
) -> ExpansionCoefficients:
    """All five coefficients at particle number n (refuses the critical t)."""
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    reg = require_noncritical(p, tol)
    d = p.d
    work = bits + _GUARD
    with context(work):
        t = mpfr(p.t)
        c = mpfr(p.c)
        log2pi = gmpy2.log(2 * gmpy2.const_pi())
        logd = gmpy2.log(d)
        zp = zeta_prime_minus_one(work)
        c1 = t * t - mpfr(3) / (4 * d) - logd / (2 * d)
        c2 = mpfr(1) / 2
        frac = mpfr(n % d) / d  # the fractional part {n/d}, by integer arithmetic
        if reg is Regime.MULTI_COMPONENT:
            c3 = log2pi / 2 - 1 + (1 + 2 * c - d) / d * gmpy2.log(t) - logd
            c4 = mpfr(6 - d) / 12
            c5_smooth = (
                d * zp
                + log2pi / 2
                + (c * (d - c - 1) - mpfr((d - 1) * (2 * d - 1)) / 6) / d
                * gmpy2.log((d * t * t - 1) / (d * t * t))
                + mpfr(d) / 12 * logd
            )
            c5_osc = d * frac * (frac - 1) * gmpy2.log(gmpy2.sqrt(mpfr(d)) * t)
            n_dependent = d > 1
        else:
            c3 = log2pi / 2 - 1 + (1 + 2 * c - d) / (2 * d) * (d * t * t - 1) - (1 + 2 * c + d) / (2 * d) * logd
            c4 = mpfr(5) / 12 + mpfr((d - 1) ** 2) / (12 * d) - c * (d - c - 1) / (2 * d)
            barnes_sum = mpfr(0)
            for ell in range(d):
                barnes_sum += log_barnes_g((ell + 1 + c) / d, bits=work)
            c5_smooth = (
                d * zp
                + (3 + 2 * c - d) / 4 * log2pi
                + (mpfr(d) / 12 - mpfr((d - 1) * (2 * d - 1)) / (12 * d) + c * (d - c - 1) / (2 * d)) * logd
                - barnes_sum
            )
            c5_osc = mpfr(0)
            n_dependent = False
    with context(bits):
        return ExpansionCoefficients(
            c1=+c1,
            c2=+c2,
            c3=+c3,
            c4=+c4,
            c5=+(c5_smooth + c5_osc),
            c5_oscillatory=+c5_osc,
            regime=reg,
            n_dependent=n_dependent,
        )


def expansion_value(p: LemniscateParams, n: int, bits: int = DEFAULT_BITS) -> mpfr:
    """C1 n^2 + C2 n log n + C3 n + C4 log n + C5(n)."""
    co = coefficients(p, n, bits=bits + _GUARD)
    with context(bits + _GUARD):
        logn = gmpy2.log(n)
        val = co.c1 * n * n + co.c2 * n * logn + co.c3 * n + co.c4 * logn + co.c5
    with context(bits):
        return +val


@dataclass
class FunctionalSet:
    """Regime-dependent functionals of the general free-energy form.

    Exactly one of ``g_n`` (multi-component oscillation) and ``h_n``
    (conformal-singularity divergence) can be nonzero.
    """

    f: mpfr
    g_n: mpfr
    h_n: mpfr
    chi: int


def functionals(
    p: LemniscateParams, n: int, bits: int = DEFAULT_BITS, tol: float = CRITICAL_TOL
) -> FunctionalSet:
    """F, G_n, H_n and the Euler characteristic for the charge-free potential."""
    if p.c != 0.0:
        raise UnsupportedParameterError(
            f"the free-energy functionals are defined for c = 0 only, got c = {p.c}"
        )
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    reg = require_noncritical(p, tol)
    d = p.d
    work = bits + _GUARD
    with context(work):
        t = mpfr(p.t)
        logd = gmpy2.log(d)
        if reg is Regime.MULTI_COMPONENT:
            chi = d
            f = -mpfr((d - 1) * (2 * d - 1)) / (6 * d) * gmpy2.log((d * t * t - 1) / (d * t * t))
            f += mpfr(d) / 12 * logd
            frac = mpfr(n % d) / d
            g_n = d * frac * (frac - 1) * gmpy2.log(gmpy2.sqrt(mpfr(d)) * t)
            h_n = mpfr(0)
        else:
            chi = 1
            f = (mpfr(d) / 12 - mpfr((d - 1) * (2 * d - 1)) / (12 * d)) * logd
            g_n = mpfr(0)
            zp = zeta_prime_minus_one(work)
            log2pi = gmpy2.log(2 * gmpy2.const_pi())
            h_n = mpfr((d - 1) ** 2) / (12 * d) * gmpy2.log(n) + (d - 1) * (zp - log2pi / 4)
            for ell in range(d):
                h_n -= log_barnes_g(mpfr(ell + 1) / d, bits=work)
    with context(bits):
        return FunctionalSet(f=+f, g_n=+g_n, h_n=+h_n, chi=chi)


def conjectured_log_coefficient(chi: int, d: int) -> Fraction:
    """Conjectured log n coefficient (6 - chi)/12 + (d-1)^2/(12 d) for a droplet
    of Euler characteristic chi carrying one singular point of order d."""
    if d < 1:
        raise DomainError(f"d must be positive, got {d}")
    return Fraction(6 - chi, 12) + Fraction((d - 1) ** 2, 12 * d)


# ---------------------------------------------------------------------------
# per-piece expansions of the decomposition terms
# ---------------------------------------------------------------------------


def a1_asymptotic(N: int, d: int, m: int, c, t, bits: int = DEFAULT_BITS) -> mpfr:
    """Expansion of the prefactor term through O(1), with n = dN + m:

    (t^2 - 3/(4d) - log d/(2d)) n^2 + (1/2) n log n
    + (log(2pi)/2 - 1 - (1+2c+d)/(2d) log d) n + (6-d)/12 log n
    + d zeta'(-1) + (d/12) log d + log(2pi)/2
    + m (N + log N / 2 - log(2pi)/2 + (d-2c-1)/(2d)).
    """
    if not 0 <= m < d:
        raise DomainError(f"m must lie in [0, d), got m={m}, d={d}")
    n = d * N + m
    with context(bits):
        tw = mpfr(t)
        cw = mpfr(c)
        logd = gmpy2.log(d)
        log2pi = gmpy2.log(2 * gmpy2.const_pi())
        logn = gmpy2.log(n)
        res = (tw * tw - mpfr(3) / (4 * d) - logd / (2 * d)) * n * n
        res += mpfr(n) * logn / 2
        res += (log2pi / 2 - 1 - (1 + 2 * cw + d) / (2 * d) * logd) * n
        res += mpfr(6 - d) / 12 * logn
        res += d * zeta_prime_minus_one(bits) + mpfr(d) / 12 * logd + log2pi / 2
        res += m * (mpfr(N) + gmpy2.log(N) / 2 - log2pi / 2 + (d - 2 * cw - 1) / (2 * d))
        return +res


def a2_asymptotic(N: int, d: int, m: int, c, t, bits: int = DEFAULT_BITS) -> mpfr:
    """Expansion of the moment sum through O(1), with n = dN + m.

    Above the transition:
        (1+2c-d)/d log(sqrt(d) t) n
        + (c(d-c-1)/d - (d-1)(2d-1)/(6d)) log((dt^2-1)/(dt^2))
        + m (1+2c-d)/(2d) (1 - 2 log(sqrt(d) t));
    below it:
        (1+2c-d)/(2d) (dt^2-1) n
        + ((d-1)(2d-1)/(12d) - c(d-c-1)/(2d)) log(n/d)
        + (1+2c-d)/4 log(2pi) - sum_l log G((l+1+c)/d) + m (1+2c-d)/(2d).
    """
    if not 0 <= m < d:
        raise DomainError(f"m must lie in [0, d), got m={m}, d={d}")
    n = d * N + m
    params = LemniscateParams(d, float(t), float(c))
    reg = require_noncritical(params)
    work = bits + _GUARD
    with context(work):
        tw = mpfr(t)
        cw = mpfr(c)
        sqd_t = gmpy2.sqrt(mpfr(d)) * tw
        if reg is Regime.MULTI_COMPONENT:
            res = (1 + 2 * cw - d) / d * gmpy2.log(sqd_t) * n
            res += (cw * (d - cw - 1) / d - mpfr((d - 1) * (2 * d - 1)) / (6 * d)) * gmpy2.log(
                (d * tw * tw - 1) / (d * tw * tw)
            )
            res += m * (1 + 2 * cw - d) / (2 * d) * (1 - 2 * gmpy2.log(sqd_t))
        else:
            res = (1 + 2 * cw - d) / (2 * d) * (d * tw * tw - 1) * n
            res += (mpfr((d - 1) * (2 * d - 1)) / (12 * d) - cw * (d - cw - 1) / (2 * d)) * gmpy2.log(
                mpfr(n) / d
            )
            res += (1 + 2 * cw - d) / 4 * gmpy2.log(2 * gmpy2.const_pi())
            for ell in range(d):
                res -= log_barnes_g((ell + 1 + cw) / d, bits=work)
            res += m * (1 + 2 * cw - d) / (2 * d)
    with context(bits):
        return +res


def a3_asymptotic(N: int, d: int, m: int, c, t, bits: int = DEFAULT_BITS) -> mpfr:
    """Expansion of the top-norm sum through O(1):

    -m (N + log N / 2 - log(2pi)/2)  [+ m(m+1+2c-2d)/d log(sqrt(d) t) above
    the transition].
    """
    if not 0 <= m < d:
        raise DomainError(f"m must lie in [0, d), got m={m}, d={d}")
    params = LemniscateParams(d, float(t), float(c))
    reg = require_noncritical(params)
    with context(bits):
        cw = mpfr(c)
        res = -m * (mpfr(N) + gmpy2.log(N) / 2 - gmpy2.log(2 * gmpy2.const_pi()) / 2)
        if reg is Regime.MULTI_COMPONENT:
            res += mpfr(m) * (m + 1 + 2 * cw - 2 * d) / d * gmpy2.log(gmpy2.sqrt(mpfr(d)) * mpfr(t))
        return +res


@dataclass
class OscillationRow:
    """m-dependent part of one decomposition term, as a linear form
    coeff_N * N + coeff_logN * log N + constant."""

    coeff_N: float
    coeff_logN: float
    constant: float

    def value(self, N: int) -> float:
        return self.coeff_N * N + self.coeff_logN * math.log(N) + self.constant


@dataclass
class OscillationBreakdown:
    prefactor: OscillationRow
    moments: OscillationRow
    top_norms: OscillationRow
    total: float  # N-free by cancellation


def oscillation_cancellation(d: int, t: float, c: float, m: int) -> OscillationBreakdown:
    """The three m-dependent rows and their sum.

    The N and log N pieces cancel between the prefactor and top-norm rows;
    the sum is m(m-d)/d log(sqrt(d) t) above the transition and 0 below.
    """
    if not 0 <= m < d:
        raise DomainError(f"m must lie in [0, d), got m={m}, d={d}")
    params = LemniscateParams(d, t, c)
    reg = require_noncritical(params)
    log2pi = math.log(2 * math.pi)
    multi = reg is Regime.MULTI_COMPONENT
    lst = math.log(math.sqrt(d) * t) if t > 0 else 0.0
    row1 = OscillationRow(m, m / 2.0, m * (-log2pi / 2 + (d - 2 * c - 1) / (2 * d)))
    if multi:
        row2 = OscillationRow(0.0, 0.0, -m * (d - 2 * c - 1) / (2 * d) + m * (d - 2 * c - 1) / d * lst)
        row3 = OscillationRow(-m, -m / 2.0, m * log2pi / 2 + m * (m + 1 + 2 * c - 2 * d) / d * lst)
    else:
        row2 = OscillationRow(0.0, 0.0, -m * (d - 2 * c - 1) / (2 * d))
        row3 = OscillationRow(-m, -m / 2.0, m * log2pi / 2)
    total = row1.constant + row2.constant + row3.constant
    return OscillationBreakdown(prefactor=row1, moments=row2, top_norms=row3, total=total)


def deano_simm_rhs(N: int, d: int, t, bits: int = DEFAULT_BITS, corrected: bool = True) -> mpfr:
    """log of the rescaled product formula for n = dN, c = 0, t above the
    transition:

        d [ d N^2 t^2 + log Z_N^Gin ] + log c_{N,d}
        -+ N(d-1) log(t sqrt(d)) - kappa_d log(1 - 1/(d t^2)),

    where c_{N,d} = (Nd)!/(N!)^d d^{-N(dN+2d+1)/2} and
    kappa_d = (d-1)(2d-1)/(6d).  ``corrected=True`` uses the sign-corrected
    exponent -N(d-1); the uncorrected variant (+) is kept for demonstrating
    the discrepancy.
    """
    if not float(t) > critical_t(d):
        raise RegimeError(f"the product formula requires t > {critical_t(d):.6f}, got t = {t}")
    work = bits + _GUARD
    with context(work):
        tw = mpfr(t)
        res = d * (d * mpfr(N) ** 2 * tw * tw + log_Z_ginibre(N, bits=work))
        log_c = log_gamma(N * d + 1, bits=work) - d * log_gamma(N + 1, bits=work)
        log_c -= mpfr(N * (d * N + 2 * d + 1)) / 2 * gmpy2.log(d)
        res += log_c
        expo = -N * (d - 1) if corrected else N * (d - 1)
        res += expo * gmpy2.log(tw * gmpy2.sqrt(mpfr(d)))
        kappa = mpfr((d - 1) * (2 * d - 1)) / (6 * d)
        res -= kappa * gmpy2.log(1 - 1 / (d * tw * tw))
    with context(bits):
        return +res


# ---------------------------------------------------------------------------
# numeric coefficient extraction
# ---------------------------------------------------------------------------


@dataclass
class BasisFit:
    """Least-squares fit against {n^2, n log n, n, log n, 1} with the
    (scaled, normal-equation) condition number for diagnostics."""

    coefficients: list
    condition: float


def fit_expansion_basis(n_values, values, bits: int = DEFAULT_BITS) -> BasisFit:
    """Extract the five expansion coefficients from samples over an n-grid.

    Solved in extended precision via the normal equations of the
    column-scaled design matrix; the samples must all belong to one
    congruence class mod d if the constant term oscillates.
    """
    ns = list(n_values)
    if len(ns) < 5:
        raise DomainError(f"need at least 5 grid points, got {len(ns)}")
    with context(bits + _GUARD):
        rows = []
        for n in ns:
            logn = gmpy2.log(n)
            rows.append([mpfr(n) ** 2, n * logn, mpfr(n), logn, mpfr(1)])
        scales = []
        for jcol in range(5):
            s = max(abs(rows[i][jcol]) for i in range(len(ns)))
            scales.append(s if s > 0 else mpfr(1))
        A = [[rows[i][jc] / scales[jc] for jc in range(5)] for i in range(len(ns))]
        y = [mpfr(v) for v in values]
        # normal equations
        G = [[sum(A[i][a] * A[i][b] for i in range(len(ns))) for b in range(5)] for a in range(5)]
        rhs = [sum(A[i][a] * y[i] for i in range(len(ns))) for a in range(5)]
        diag = [G[a][a] for a in range(5)]
        condition = float(max(diag) / min(diag))
        # Gaussian elimination with partial pivoting
        M = [row[:] + [rhs[a]] for a, row in enumerate(G)]
        for col in range(5):
            piv = max(range(col, 5), key=lambda r: abs(M[r][col]))
            M[col], M[piv] = M[piv], M[col]
            for r in range(col + 1, 5):
                f = M[r][col] / M[col][col]
                for cc in range(col, 6):
                    M[r][cc] -= f * M[col][cc]
        sol = [mpfr(0)] * 5
        for r in reversed(range(5)):
            acc = M[r][5]
            for cc in range(r + 1, 5):
                acc -= M[r][cc] * sol[cc]
            sol[r] = acc / M[r][r]
        coeffs = [sol[jc] / scales[jc] for jc in range(5)]
    with context(bits):
        return BasisFit(coefficients=[+cf for cf in coeffs], condition=condition)
