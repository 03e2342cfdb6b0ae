"""Arbitrary-precision special functions.

Everything downstream (partition functions, orthogonal norms, expansion
coefficients) reduces to four ingredients implemented here:

* ``log_gamma``   -- log Gamma(x) for x > 0, by upward recurrence
  Gamma(x+1) = x Gamma(x) into the asymptotic region followed by the
  Stirling series

      log Gamma(z) = (z - 1/2) log z - z + log(2 pi)/2
                     + sum_{k>=1} B_{2k} / (2k (2k-1) z^{2k-1});

* ``log_barnes_g`` -- log G(x) for x > 0, by the recurrence
  G(x+1) = Gamma(x) G(x) followed by

      log G(z+1) = (z^2/2) log z - 3 z^2/4 + (z/2) log(2 pi)
                   - (log z)/12 + zeta'(-1)
                   + sum_{k>=1} B_{2k+2} / (4k (k+1) z^{2k});

* ``bernoulli``   -- exact Bernoulli numbers B_k (B_1 = -1/2 convention)
  from the generating function t/(e^t - 1) = sum B_k t^k / k!;

* ``regularized_gamma_q`` -- Q(s, x) = Gamma(s, x)/Gamma(s), lower series
  for x < s + 1 and a continued fraction otherwise.

Both asymptotic series are divergent.  The adaptive truncation rule is:
stop as soon as the next term would exceed the current one in magnitude
(divergence guard), or once a term falls below 2^-(bits+8).  The fixed
truncations are exposed as ``gamma_asymptotic_series`` and
``barnes_asymptotic_series`` so that remainder behaviour can be probed
directly.

All functions are pure; caches (Bernoulli numbers, zeta'(-1) per
precision) are guarded by locks, so concurrent use is safe.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction
from math import comb

import gmpy2
from gmpy2 import mpfr

from .errors import DomainError
from .precision import DEFAULT_BITS, context

_GUARD = 24  # working headroom in bits for internal kernels

_MAX_SERIES_TERMS = 4096

_bernoulli_exact = [Fraction(1), Fraction(-1, 2)]
_bernoulli_lock = threading.Lock()

_bernoulli_mpfr_cache: dict[tuple[int, int], mpfr] = {}

_zeta_prime_cache: dict[int, mpfr] = {}
_zeta_prime_lock = threading.Lock()


def bernoulli(k: int) -> Fraction:
    """Exact Bernoulli number B_k as a reduced fraction (B_1 = -1/2).

    Computed once via the generating-function recurrence
    sum_{j=0}^{k} C(k+1, j) B_j = 0 and cached.
    """
    if k < 0:
        raise DomainError(f"Bernoulli index must be nonnegative, got {k}")
    if k >= len(_bernoulli_exact):
        with _bernoulli_lock:
            while len(_bernoulli_exact) <= k:
                m = len(_bernoulli_exact)
                if m % 2 == 1:  # odd-index Bernoulli numbers vanish for m >= 3
                    _bernoulli_exact.append(Fraction(0))
                    continue
                acc = Fraction(0)
                for j in range(m):
                    bj = _bernoulli_exact[j]
                    if bj:
                        acc += comb(m + 1, j) * bj
                _bernoulli_exact.append(-acc / (m + 1))
    return _bernoulli_exact[k]


def _bernoulli_mpfr(k: int) -> mpfr:
    """B_k rounded to the precision of the active context (cached)."""
    bits = gmpy2.get_context().precision
    key = (k, bits)
    val = _bernoulli_mpfr_cache.get(key)
    if val is None:
        b = bernoulli(k)
        val = mpfr(b.numerator) / mpfr(b.denominator)
        _bernoulli_mpfr_cache[key] = val
    return val


def _shift_threshold(bits: int, shift_threshold) -> int:
    # 30 keeps the smallest Stirling/Barnes term below 2^-264 and is the
    # right default at 256 bits; scale it up for higher precisions.
    if shift_threshold is not None:
        return int(shift_threshold)
    return max(30, math.ceil(0.12 * bits))


def _gamma_series_tail(y: mpfr, eps) -> mpfr:
    """Adaptive sum of B_{2k} / (2k (2k-1) y^{2k-1})."""
    total = mpfr(0)
    y2 = y * y
    ypow = y
    prev = None
    for k in range(1, _MAX_SERIES_TERMS):
        term = _bernoulli_mpfr(2 * k) / ((2 * k) * (2 * k - 1)) / ypow
        if prev is not None and abs(term) >= abs(prev):
            break
        total += term
        if abs(term) < eps:
            break
        prev = term
        ypow *= y2
    return total


def _barnes_series_tail(z: mpfr, eps) -> mpfr:
    """Adaptive sum of B_{2k+2} / (4k (k+1) z^{2k})."""
    total = mpfr(0)
    z2 = z * z
    zpow = z2
    prev = None
    for k in range(1, _MAX_SERIES_TERMS):
        term = _bernoulli_mpfr(2 * k + 2) / (4 * k * (k + 1)) / zpow
        if prev is not None and abs(term) >= abs(prev):
            break
        total += term
        if abs(term) < eps:
            break
        prev = term
        zpow *= z2
    return total


def log_gamma(x, bits: int = DEFAULT_BITS, shift_threshold=None) -> mpfr:
    """log Gamma(x) for x > 0, accurate to a few ulp at ``bits``."""
    thresh = _shift_threshold(bits, shift_threshold)
    with context(bits + _GUARD):
        xw = mpfr(x)
        if not xw > 0:
            raise DomainError(f"log_gamma requires x > 0, got {x}")
        eps = mpfr(2) ** (-(bits + 8))
        shift = max(0, math.ceil(thresh - xw))
        acc = mpfr(0)
        for i in range(shift):
            acc += gmpy2.log(xw + i)
        y = xw + shift
        log2pi = gmpy2.log(2 * gmpy2.const_pi())
        res = (y - mpfr(1) / 2) * gmpy2.log(y) - y + log2pi / 2
        res += _gamma_series_tail(y, eps)
        res -= acc
    with context(bits):
        return +res


def log_barnes_g(x, bits: int = DEFAULT_BITS, shift_threshold=None) -> mpfr:
    """log G(x) for x > 0, where G is the Barnes function with G(1) = 1."""
    thresh = _shift_threshold(bits, shift_threshold)
    work = bits + _GUARD
    with context(work):
        xw = mpfr(x)
        if not xw > 0:
            raise DomainError(f"log_barnes_g requires x > 0, got {x}")
        eps = mpfr(2) ** (-(bits + 8))
        # G(x) = G(x + k) / prod_{i=0}^{k-1} Gamma(x + i); pick k so the
        # series argument z = x + k - 1 clears the threshold.
        shift = max(0, math.ceil(thresh + 1 - xw))
        acc = mpfr(0)
        if shift:
            lgam = log_gamma(xw, bits=work, shift_threshold=thresh)
            acc = lgam
            for i in range(1, shift):
                lgam += gmpy2.log(xw + (i - 1))
                acc += lgam
        z = xw + shift - 1
        log2pi = gmpy2.log(2 * gmpy2.const_pi())
        res = (
            z * z / 2 * gmpy2.log(z)
            - 3 * z * z / 4
            + z / 2 * log2pi
            - gmpy2.log(z) / 12
            + zeta_prime_minus_one(work)
        )
        res += _barnes_series_tail(z, eps)
        res -= acc
    with context(bits):
        return +res


def gamma_asymptotic_series(z, terms: int, bits: int = DEFAULT_BITS) -> mpfr:
    """Stirling series for log Gamma(z) truncated after ``terms`` Bernoulli terms.

    No recurrence shift is applied; this is the raw truncation, meant for
    studying the remainder of the divergent series.
    """
    if terms < 0:
        raise DomainError(f"terms must be nonnegative, got {terms}")
    with context(bits + _GUARD):
        zw = mpfr(z)
        if not zw > 0:
            raise DomainError(f"gamma_asymptotic_series requires z > 0, got {z}")
        log2pi = gmpy2.log(2 * gmpy2.const_pi())
        res = (zw - mpfr(1) / 2) * gmpy2.log(zw) - zw + log2pi / 2
        z2 = zw * zw
        zpow = zw
        for k in range(1, terms + 1):
            res += _bernoulli_mpfr(2 * k) / ((2 * k) * (2 * k - 1)) / zpow
            zpow *= z2
    with context(bits):
        return +res


def barnes_asymptotic_series(z, terms: int, bits: int = DEFAULT_BITS) -> mpfr:
    """Asymptotic series for log G(z+1) truncated after ``terms`` Bernoulli terms."""
    if terms < 0:
        raise DomainError(f"terms must be nonnegative, got {terms}")
    with context(bits + _GUARD):
        zw = mpfr(z)
        if not zw > 0:
            raise DomainError(f"barnes_asymptotic_series requires z > 0, got {z}")
        log2pi = gmpy2.log(2 * gmpy2.const_pi())
        res = (
            zw * zw / 2 * gmpy2.log(zw)
            - 3 * zw * zw / 4
            + zw / 2 * log2pi
            - gmpy2.log(zw) / 12
            + zeta_prime_minus_one(bits + _GUARD)
        )
        z2 = zw * zw
        zpow = z2
        for k in range(1, terms + 1):
            res += _bernoulli_mpfr(2 * k + 2) / (4 * k * (k + 1)) / zpow
            zpow *= z2
    with context(bits):
        return +res


def zeta_prime_minus_one(bits: int = DEFAULT_BITS) -> mpfr:
    """zeta'(-1) = -0.1654211437004509... computed at the requested precision.

    Euler-Maclaurin continuation of the zeta function, differentiated at
    s = -1.  All Pochhammer factors (s)_{2k-1} vanish at s = -1 for k >= 2,
    so only their s-derivatives survive:

        zeta'(-1) = -sum_{n=2}^{M-1} n log n - (M log M)/2
                    + (M^2 log M)/2 - M^2/4 + (1 + log M)/12
                    - sum_{k=2}^{K} B_{2k} (2k-3)!/(2k)! M^{2-2k}.

    The tail decays like (pi e M / K)^{-2K}; M = K proportional to ``bits``
    drives the error below the last bit.  Values are cached per precision.
    """
    cached = _zeta_prime_cache.get(bits)
    if cached is not None:
        return cached
    with _zeta_prime_lock:
        cached = _zeta_prime_cache.get(bits)
        if cached is not None:
            return cached
        m = max(24, math.ceil(0.17 * bits) + 8)
        with context(bits + 32):
            total = mpfr(0)
            for n in range(2, m):
                total -= n * gmpy2.log(n)
            logm = gmpy2.log(m)
            mm = mpfr(m)
            total += -mm * logm / 2 + mm * mm * logm / 2 - mm * mm / 4
            total += (1 + logm) / 12
            mpow = mm * mm  # M^{2k-2}
            for k in range(2, m + 1):
                b = bernoulli(2 * k)
                coeff = Fraction(b.numerator * math.factorial(2 * k - 3), b.denominator * math.factorial(2 * k))
                total -= (mpfr(coeff.numerator) / mpfr(coeff.denominator)) / mpow
                mpow *= mm * mm
        with context(bits):
            result = +total
        _zeta_prime_cache[bits] = result
        return result


def regularized_gamma_p(s, x, bits: int = DEFAULT_BITS) -> mpfr:
    """Lower regularized incomplete gamma P(s, x) = gamma(s, x)/Gamma(s)."""
    return 1 - regularized_gamma_q(s, x, bits=bits)


def regularized_gamma_q(s, x, bits: int = DEFAULT_BITS) -> mpfr:
    """Upper regularized incomplete gamma Q(s, x) = Gamma(s, x)/Gamma(s).

    Power series in the left region x < s + 1, Lentz continued fraction in
    the right region.  Q(s, 0) = 1 and Q is decreasing in x.
    """
    with context(bits + _GUARD):
        sw = mpfr(s)
        xw = mpfr(x)
        if not sw > 0:
            raise DomainError(f"regularized_gamma_q requires s > 0, got {s}")
        if xw < 0:
            raise DomainError(f"regularized_gamma_q requires x >= 0, got {x}")
        if xw == 0:
            res = mpfr(1)
        elif xw < sw + 1:
            res = 1 - _gamma_p_series(sw, xw, bits)
        else:
            res = _gamma_q_contfrac(sw, xw, bits)
    with context(bits):
        return +res


def _gamma_p_series(s: mpfr, x: mpfr, bits: int) -> mpfr:
    # P(s,x) = x^s e^{-x} / Gamma(s+1) * sum_{n>=0} x^n / ((s+1)...(s+n))
    eps = mpfr(2) ** (-(bits + 16))
    term = mpfr(1)
    total = mpfr(1)
    denom = s
    for _ in range(_MAX_SERIES_TERMS * 8):
        denom += 1
        term *= x / denom
        total += term
        if term < total * eps:
            break
    front = gmpy2.exp(s * gmpy2.log(x) - x - log_gamma(s + 1, bits=bits))
    return front * total


def _gamma_q_contfrac(s: mpfr, x: mpfr, bits: int) -> mpfr:
    # Q(s,x) = x^s e^{-x} / Gamma(s) * 1/(x+1-s- 1(1-s)/(x+3-s- 2(2-s)/...))
    eps = mpfr(2) ** (-(bits + 16))
    tiny = mpfr(2) ** (-4 * bits)
    b = x + 1 - s
    c = 1 / tiny
    d = 1 / b
    h = d
    for i in range(1, _MAX_SERIES_TERMS * 8):
        an = -i * (i - s)
        b += 2
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1 / d
        delta = d * c
        h *= delta
        if abs(delta - 1) < eps:
            break
    front = gmpy2.exp(s * gmpy2.log(x) - x - log_gamma(s, bits=bits))
    return front * h


def log_factorial(n: int, bits: int = DEFAULT_BITS) -> mpfr:
    """log n! via log Gamma(n+1)."""
    if n < 0:
        raise DomainError(f"log_factorial requires n >= 0, got {n}")
    return log_gamma(n + 1, bits=bits)
