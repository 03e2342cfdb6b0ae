"""Moments E|det(G_N - a)|^gamma of the complex Ginibre ensemble.

Exact evaluation goes through the squared orthogonal norms,

    E|det(G_N - a)|^{2c} = (N! / Z_N^Gin) prod_{j<N} h_j^{(c)}(a),

and the asymptotic formulas cover the three regimes:

* outside (|a| > 1):   gamma log(a) N - (gamma^2/4) log((a^2-1)/a^2) + O(1/N)
* bulk    (|a| < 1):   (gamma/2)(a^2-1) N + (gamma^2/8) log N
                       + (gamma/4) log(2pi) - log G(1+gamma/2)
                       + sum_m C_m N^{-m}
* unified bulk form:   log[ N^{-gamma N/2} G(N+1+gamma/2) / (G(N+1) G(1+gamma/2)) ]
                       + (gamma/2) a^2 N,   error smaller than any power of 1/N.

The 1/N correction coefficients are polynomial in gamma with rational
coefficients,

    C_m = (-1)^{m+1} (gamma^2/(4m(m+1)(m+2)) - 1/(12m)) (gamma/2)^m
        + (-1)^m sum_{k=1}^{floor((m-1)/2)}
            B_{2k+2}/(4k(k+1)(2k-1)!) (m-1)!/(m-2k)! (gamma/2)^{m-2k},

and are evaluated in exact rational arithmetic before rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from .errors import DomainError, RegimeError
from .exactz import log_Z_ginibre, monic_coefficients, ortho_norms
from .precision import DEFAULT_BITS, context
from .specfun import bernoulli, log_barnes_g, log_gamma

CORRECTIONS_CAP = 12  # the divergent tail makes longer correction sums unreliable

_GUARD = 24

OUTSIDE = "outside"
BULK = "bulk"


@dataclass(frozen=True)
class MomentQuery:
    """Moment parameters: matrix size N, radial position a >= 0, exponent gamma > -2.

    Rotational invariance reduces complex a to |a|, so only the radius is
    stored; internally the norm machinery uses the charge c = gamma/2.
    """

    N: int
    a: float
    gamma: float

    def __post_init__(self):
        if self.N < 1:
            raise DomainError(f"N must be positive, got {self.N}")
        if self.a < 0:
            raise DomainError(f"a must be nonnegative, got {self.a}")
        if self.gamma <= -2:
            raise DomainError(f"gamma must exceed -2, got {self.gamma}")

    @property
    def charge(self) -> float:
        return self.gamma / 2.0


def log_moment_exact(q: MomentQuery, bits: int = DEFAULT_BITS) -> mpfr:
    """log E|det(G_N - a)|^gamma from the norm product (arbitrary accuracy)."""
    if q.gamma == 0.0:
        with context(bits):
            return mpfr(0)
    work = bits + _GUARD
    with context(work):
        table = ortho_norms(q.N, mpfr(q.gamma) / 2, mpfr(q.a), q.N - 1, bits=work)
        res = log_gamma(q.N + 1, bits=work) - log_Z_ginibre(q.N, bits=work)
        for lh in table.log_norms:
            res += lh
    with context(bits):
        return +res


def log_moment_a0_closed(N: int, gamma, bits: int = DEFAULT_BITS) -> mpfr:
    """Closed form at a = 0:
    log E|det G_N|^gamma = -(gamma/2) N log N + log G(N+1+gamma/2)
                           - log G(N+1) - log G(1+gamma/2)."""
    if N < 1:
        raise DomainError(f"N must be positive, got {N}")
    work = bits + _GUARD
    with context(work):
        g = mpfr(gamma)
        if not g > -2:
            raise DomainError(f"gamma must exceed -2, got {gamma}")
        res = -g / 2 * N * gmpy2.log(N)
        res += log_barnes_g(N + 1 + g / 2, bits=work)
        res -= log_barnes_g(N + 1, bits=work)
        res -= log_barnes_g(1 + g / 2, bits=work)
    with context(bits):
        return +res


def log_moment_asymptotic_outside(N: int, a, gamma, bits: int = DEFAULT_BITS) -> mpfr:
    """Leading asymptotics for fixed |a| > 1."""
    if not float(a) > 1:
        raise RegimeError(f"outside formula needs a > 1, got a = {a}")
    with context(bits):
        aw = mpfr(a)
        g = mpfr(gamma)
        return g * gmpy2.log(aw) * N - g * g / 4 * gmpy2.log((aw * aw - 1) / (aw * aw))


def correction_coefficient_exact(m: int, gamma) -> Fraction:
    """C_m as an exact rational (gamma is taken at its exact binary value)."""
    if m < 1:
        raise DomainError(f"correction index must be positive, got {m}")
    g = Fraction(gamma)
    half = g / 2
    sign = -1 if m % 2 == 0 else 1
    first = sign * (g * g / (4 * m * (m + 1) * (m + 2)) - Fraction(1, 12 * m)) * half**m
    second = Fraction(0)
    for k in range(1, (m - 1) // 2 + 1):
        coeff = bernoulli(2 * k + 2) / (4 * k * (k + 1) * math.factorial(2 * k - 1))
        coeff *= Fraction(math.factorial(m - 1), math.factorial(m - 2 * k))
        second += coeff * half ** (m - 2 * k)
    return first + (-sign) * second


def correction_coefficient(m: int, gamma, bits: int = DEFAULT_BITS) -> mpfr:
    """C_m, the coefficient of N^{-m} in the bulk expansion."""
    frac = correction_coefficient_exact(m, gamma)
    with context(bits):
        return mpfr(frac.numerator) / mpfr(frac.denominator)


def log_moment_asymptotic_bulk(
    N: int, a, gamma, corrections: int = 0, bits: int = DEFAULT_BITS
) -> mpfr:
    """Bulk asymptotics for fixed |a| < 1, including 1/N corrections.

    corrections = 0 gives the plain O(1/N)-accurate formula; up to
    CORRECTIONS_CAP correction terms C_m N^{-m} may be added.
    """
    if not 0 <= float(a) < 1:
        raise RegimeError(f"bulk formula needs 0 <= a < 1, got a = {a}")
    if not 0 <= corrections <= CORRECTIONS_CAP:
        raise DomainError(f"corrections must lie in [0, {CORRECTIONS_CAP}], got {corrections}")
    work = bits + _GUARD
    with context(work):
        aw = mpfr(a)
        g = mpfr(gamma)
        res = g / 2 * (aw * aw - 1) * N
        res += g * g / 8 * gmpy2.log(N)
        res += g / 4 * gmpy2.log(2 * gmpy2.const_pi())
        res -= log_barnes_g(1 + g / 2, bits=work)
        for m in range(1, corrections + 1):
            res += correction_coefficient(m, gamma, bits=work) / mpfr(N) ** m
    with context(bits):
        return +res


def log_moment_unified_bulk(N: int, a, gamma, bits: int = DEFAULT_BITS) -> mpfr:
    """Barnes-G form of the bulk moment: a0 closed form plus (gamma/2) a^2 N.

    Its error is smaller than any power of 1/N for fixed |a| < 1.
    """
    if not 0 <= float(a) < 1:
        raise RegimeError(f"unified bulk formula needs 0 <= a < 1, got a = {a}")
    work = bits + _GUARD
    with context(work):
        aw = mpfr(a)
        g = mpfr(gamma)
        res = log_moment_a0_closed(N, gamma, bits=work) + g / 2 * aw * aw * N
    with context(bits):
        return +res


def norm_asymptotic(N: int, a, c, regime: str | None = None, bits: int = DEFAULT_BITS) -> mpfr:
    """Asymptotics of the top squared norm log h_N^{(c)}(a):

        outside (a > 1):  -N + (1/2) log(2 pi / N) + 2c log a
        bulk    (a < 1):  -N + (1/2) log(2 pi / N).
    """
    af = float(a)
    if af == 1.0:
        raise RegimeError("norm asymptotics are not available at a = 1")
    inferred = OUTSIDE if af > 1 else BULK
    if regime is None:
        regime = inferred
    elif regime != inferred:
        raise RegimeError(f"a = {a} lies in the {inferred!r} regime, not {regime!r}")
    with context(bits):
        res = -mpfr(N) + gmpy2.log(2 * gmpy2.const_pi() / N) / 2
        if regime == OUTSIDE:
            res += 2 * mpfr(c) * gmpy2.log(mpfr(a))
        return res


def subleading_coefficient(N: int, c, a, bits: int = DEFAULT_BITS) -> mpfr:
    """Coefficient of z^{N-1} in the monic orthogonal polynomial P_N^{(c)}(z; a).

    Recovered from the Cholesky factor of the shifted moment matrix; in the
    shifted basis u = z - a the polynomial is sum alpha_k u^k, so the z^{N-1}
    coefficient is alpha_{N-1} - N a.
    """
    if not float(c) > -1:
        raise DomainError(f"c must exceed -1, got {c}")
    if float(a) == 0.0 or float(c) == 0.0:
        # radial symmetry (a = 0) or a pure Gaussian weight (c = 0): P_N = z^N
        with context(bits):
            return mpfr(0)
    work = bits + _GUARD
    with context(work):
        alphas = monic_coefficients(N, mpfr(c), mpfr(a), bits=work)
        res = alphas[N - 1] - N * mpfr(a)
    with context(bits):
        return +res
