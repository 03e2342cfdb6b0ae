"""Special-function kernels against independent oracles.

Oracles used here: mpmath (an unrelated arbitrary-precision
implementation), sympy Bernoulli numbers, a long-shift Stirling evaluation
at doubled precision, a Richardson-extrapolated limit for the
Glaisher-Kinkelin constant, and direct numerical quadrature for the
incomplete gamma ratio.
"""

import math
from fractions import Fraction

import gmpy2
import mpmath
import numpy as np
import pytest
import sympy
from gmpy2 import mpfr

from lemniscate_lab import precision, specfun
from lemniscate_lab.errors import DomainError

from conftest import mp


def as_mp(x: mpfr) -> mpmath.mpf:
    mpmath.mp.prec = x.precision + 16
    return mpmath.mpf(str(precision.to_decimal(x)))


# ---------------------------------------------------------------------------
# log Gamma
# ---------------------------------------------------------------------------


def test_log_gamma_at_one_is_zero():
    assert abs(specfun.log_gamma(1, bits=128)) < mpfr(2) ** -120


def test_log_gamma_half_is_log_sqrt_pi():
    with mp(192):
        ref = gmpy2.log(gmpy2.sqrt(gmpy2.const_pi()))
        assert abs(specfun.log_gamma(0.5, bits=192) - ref) < mpfr(2) ** -184


def _stirling_long_shift_oracle(x, bits):
    """log Gamma via a 200-step upward recurrence and the raw Stirling sum
    at doubled precision; Bernoulli numbers come from sympy."""
    with mp(2 * bits):
        xw = mpfr(x)
        acc = mpfr(0)
        for i in range(200):
            acc += gmpy2.log(xw + i)
        y = xw + 200
        res = (y - mpfr(1) / 2) * gmpy2.log(y) - y + gmpy2.log(2 * gmpy2.const_pi()) / 2
        y2 = y * y
        ypow = y
        for k in range(1, 40):
            b = Fraction(sympy.bernoulli(2 * k).p, sympy.bernoulli(2 * k).q)
            res += (mpfr(b.numerator) / b.denominator) / ((2 * k) * (2 * k - 1)) / ypow
            ypow *= y2
        return res - acc


def test_log_gamma_against_long_shift_oracle():
    got = specfun.log_gamma("20.25", bits=192)
    ref = _stirling_long_shift_oracle("20.25", 192)
    with mp(192):
        assert abs(got / ref - 1) < mpfr("1e-30")


@pytest.mark.parametrize("x", ["0.001", "0.37", "1.0", "5.5", "20.25", "123.456", "3001.5"])
def test_log_gamma_against_mpmath(x):
    got = specfun.log_gamma(x, bits=224)
    mpmath.mp.prec = 300
    ref = mpmath.loggamma(mpmath.mpf(x))
    assert abs(as_mp(got) - ref) < mpmath.mpf(2) ** (-210) * max(1, abs(ref))


def test_log_gamma_rejects_nonpositive():
    with pytest.raises(DomainError):
        specfun.log_gamma(0)
    with pytest.raises(DomainError):
        specfun.log_gamma(-2.5)


def test_log_gamma_recurrence_invariant():
    bits = 128
    rng = np.random.default_rng(11)
    with mp(bits):
        bound = mpfr(2) ** (-(bits - 10))
        for _ in range(200):
            x = mpfr(rng.uniform(0.1, 50.0))
            lhs = specfun.log_gamma(x + 1, bits=bits) - specfun.log_gamma(x, bits=bits) - gmpy2.log(x)
            assert abs(lhs) < bound


# ---------------------------------------------------------------------------
# Barnes G
# ---------------------------------------------------------------------------


def test_barnes_small_integers():
    # G(1) = 1, G(4) = Gamma(3) G(3) = 2, G(6) = Gamma(5) G(5) = 24 * 12
    assert abs(specfun.log_barnes_g(1, bits=128)) < mpfr(2) ** -120
    with mp(160):
        assert abs(specfun.log_barnes_g(4, bits=160) - gmpy2.log(mpfr(2))) < mpfr(2) ** -150
        assert abs(specfun.log_barnes_g(6, bits=160) - gmpy2.log(mpfr(288))) < mpfr(2) ** -148


@pytest.mark.parametrize("x", ["0.25", "0.8", "1.5", "7.0", "41.125"])
def test_barnes_against_mpmath(x):
    got = specfun.log_barnes_g(x, bits=224)
    mpmath.mp.prec = 300
    ref = mpmath.log(mpmath.barnesg(mpmath.mpf(x)))
    assert abs(as_mp(got) - ref) < mpmath.mpf(2) ** (-200) * max(1, abs(ref))


def test_barnes_recurrence_invariant():
    # log G values reach ~4e3 on this range, so the residual floor of values
    # rounded to exactly `bits` sits at ~2^(12-bits); a 16-bit guard keeps the
    # check about the recurrence rather than about output rounding
    bits = 128
    rng = np.random.default_rng(12)
    with mp(bits + 16):
        bound = mpfr(2) ** (-(bits - 10))
        for _ in range(200):
            x = mpfr(rng.uniform(0.1, 50.0))
            lhs = (
                specfun.log_barnes_g(x + 1, bits=bits + 16)
                - specfun.log_gamma(x, bits=bits + 16)
                - specfun.log_barnes_g(x, bits=bits + 16)
            )
            assert abs(lhs) < bound


# ---------------------------------------------------------------------------
# Bernoulli numbers
# ---------------------------------------------------------------------------


def test_bernoulli_values():
    assert specfun.bernoulli(2) == Fraction(1, 6)
    assert specfun.bernoulli(3) == 0
    assert specfun.bernoulli(1) == Fraction(-1, 2)
    assert specfun.bernoulli(12) == Fraction(-691, 2730)


def test_bernoulli_against_sympy():
    for k in (4, 20, 37, 60):
        b = sympy.bernoulli(k)
        assert specfun.bernoulli(k) == Fraction(int(b.p), int(b.q))


def test_bernoulli_recurrence_invariant():
    # sum_{j<=k} C(k+1, j) B_j = 0 exactly, for all k <= 60
    for k in range(1, 61):
        acc = Fraction(0)
        for j in range(k + 1):
            acc += math.comb(k + 1, j) * specfun.bernoulli(j)
        assert acc == 0, k


def test_bernoulli_negative_index():
    with pytest.raises(DomainError):
        specfun.bernoulli(-1)


# ---------------------------------------------------------------------------
# zeta'(-1)
# ---------------------------------------------------------------------------


def test_zeta_prime_known_digits():
    with mp(128):
        ref = mpfr("-0.16542114370045092921")
        assert abs(specfun.zeta_prime_minus_one(128) - ref) < mpfr("1e-19")


def _glaisher_richardson_oracle(bits):
    """A = lim n^{-(n^2/2+n/2+1/12)} e^{n^2/4} prod k^k, accelerated by
    Richardson extrapolation in powers of 1/n^2."""
    with mp(bits + 64):
        vals = []
        for n in (128, 256, 512, 1024, 2048, 4096):
            s = mpfr(0)
            for k in range(2, n + 1):
                s += k * gmpy2.log(k)
            vals.append(s - (mpfr(n) ** 2 / 2 + mpfr(n) / 2 + mpfr(1) / 12) * gmpy2.log(n) + mpfr(n) ** 2 / 4)
        # kill n^{-2}, n^{-4}, ... successively
        level = 1
        while len(vals) > 1:
            factor = mpfr(4) ** level
            vals = [(factor * b - a) / (factor - 1) for a, b in zip(vals, vals[1:])]
            level += 1
        return gmpy2.exp(vals[0])


def test_zeta_prime_glaisher_relation():
    # 1/12 - zeta'(-1) = log A with A the Glaisher constant
    bits = 192
    zp = specfun.zeta_prime_minus_one(bits)
    oracle = _glaisher_richardson_oracle(bits)
    with mp(bits):
        mine = gmpy2.exp(mpfr(1) / 12 - zp)
        assert abs(mine - oracle) < mpfr("1e-25")


def test_zeta_prime_precision_monotonicity():
    lo = specfun.zeta_prime_minus_one(128)
    hi = specfun.zeta_prime_minus_one(256)
    with mp(280):
        assert abs(lo - hi) / abs(hi) < mpfr(2) ** -120


def test_zeta_prime_against_mpmath():
    got = specfun.zeta_prime_minus_one(224)
    mpmath.mp.prec = 260
    ref = mpmath.zeta(-1, derivative=1)
    assert abs(as_mp(got) - ref) < mpmath.mpf(2) ** -216


# ---------------------------------------------------------------------------
# regularized incomplete gamma
# ---------------------------------------------------------------------------


def test_gamma_q_s1_is_exp():
    with mp(128):
        for x in ("0.25", "1.5", "7.25"):
            q = specfun.regularized_gamma_q(1, x, bits=128)
            assert abs(q - gmpy2.exp(-mpfr(x))) < mpfr(2) ** -120


def test_gamma_q_at_zero_is_one():
    assert specfun.regularized_gamma_q(3.7, 0, bits=96) == 1


def test_gamma_q_against_quadrature_oracle():
    # Q(3, 2.5) = int_{2.5}^inf t^2 e^{-t} dt / 2, by direct quadrature
    mpmath.mp.prec = 120
    oracle = mpmath.quad(lambda t: t * t * mpmath.exp(-t), [2.5, 10, 40, 120]) / 2
    got = specfun.regularized_gamma_q(3, 2.5, bits=128)
    assert abs(as_mp(got) - oracle) < mpmath.mpf("1e-25")
    assert str(got)[:7] == "0.54381"


def test_gamma_q_monotone_and_complementary():
    bits = 128
    with mp(bits):
        prev = mpfr(1)
        for x in (0.5, 1.0, 2.0, 4.0, 8.0, 16.0):
            q = specfun.regularized_gamma_q(2.3, x, bits=bits)
            assert q < prev
            prev = q
            p = specfun.regularized_gamma_p(2.3, x, bits=bits)
            # P + Q = 1 within 4 ulp
            assert abs(p + q - 1) <= 4 * mpfr(2) ** (-bits)


def test_gamma_q_against_gmpy2():
    with mp(160):
        for s, x in ((2.0, 7.0), (5.5, 1.25), (81.0, 180.0)):
            got = specfun.regularized_gamma_q(s, x, bits=160)
            ref = gmpy2.gamma_inc(mpfr(s), mpfr(x)) / gmpy2.gamma(mpfr(s))
            assert abs(got - ref) < mpfr(2) ** -140 * max(1, ref)


def test_gamma_q_domain_errors():
    with pytest.raises(DomainError):
        specfun.regularized_gamma_q(0, 1)
    with pytest.raises(DomainError):
        specfun.regularized_gamma_q(1, -0.5)


# ---------------------------------------------------------------------------
# truncated asymptotic series
# ---------------------------------------------------------------------------


def test_gamma_series_zero_terms():
    with mp(160):
        got = specfun.gamma_asymptotic_series(10, 0, bits=160)
        ref = (mpfr(10) - mpfr(1) / 2) * gmpy2.log(mpfr(10)) - 10 + gmpy2.log(2 * gmpy2.const_pi()) / 2
        assert abs(got - ref) < mpfr(2) ** -150


def test_gamma_series_error_bounded_by_first_omitted_term():
    bits = 192
    with mp(bits):
        z = mpfr(20)
        err = abs(specfun.gamma_asymptotic_series(z, 3, bits=bits) - specfun.log_gamma(z, bits=bits))
        b8 = specfun.bernoulli(8)
        omitted = abs(mpfr(b8.numerator) / b8.denominator / (8 * 7) / z**7)
        assert err <= omitted


def test_gamma_series_monotone_improvement():
    bits = 192
    with mp(bits):
        z = mpfr(50)
        ref = specfun.log_gamma(z, bits=bits)
        e1 = abs(specfun.gamma_asymptotic_series(z, 1, bits=bits) - ref)
        e2 = abs(specfun.gamma_asymptotic_series(z, 2, bits=bits) - ref)
        assert e2 <= e1


def test_barnes_series_zero_terms():
    with mp(192):
        z = mpfr(10)
        got = specfun.barnes_asymptotic_series(z, 0, bits=192)
        ref = (
            50 * gmpy2.log(z)
            - 75
            + 5 * gmpy2.log(2 * gmpy2.const_pi())
            - gmpy2.log(z) / 12
            + specfun.zeta_prime_minus_one(192)
        )
        assert abs(got - ref) < mpfr(2) ** -180


def test_barnes_series_remainder_decay_rate():
    # with two Bernoulli terms the error decays like z^{-6}
    bits = 224
    errs = []
    for z in (20, 40, 80):
        with mp(bits):
            errs.append(
                float(abs(specfun.barnes_asymptotic_series(z, 2, bits=bits) - specfun.log_barnes_g(z + 1, bits=bits)))
            )
    slope = np.polyfit(np.log([20, 40, 80]), np.log(errs), 1)[0]
    assert -6.3 < slope < -5.7


def test_barnes_series_alternation():
    bits = 192
    with mp(bits):
        z = mpfr(30)
        vals = [specfun.barnes_asymptotic_series(z, k, bits=bits) for k in range(6)]
        diffs = [vals[k + 1] - vals[k] for k in range(5)]
        for d1, d2 in zip(diffs, diffs[1:]):
            assert gmpy2.sign(d1) == -gmpy2.sign(d2)


# ---------------------------------------------------------------------------
# big-real plumbing
# ---------------------------------------------------------------------------


def test_decimal_round_trip_is_exact():
    rng = np.random.default_rng(3)
    for bits in (64, 128, 256, 521):
        with mp(bits):
            x = mpfr(rng.uniform(-5, 5)) * gmpy2.exp(mpfr(rng.uniform(-40, 40)))
        back = precision.from_decimal(precision.to_decimal(x), bits)
        with mp(bits):
            assert abs(back - x) <= abs(x) * mpfr(2) ** (-(bits - 1))


def test_mixed_precision_combines_at_max():
    lo = precision.to_mpfr("1.1", 64)
    hi = precision.to_mpfr("2.3", 256)
    assert precision.max_precision(lo, hi) == 256
    with precision.combined_context(lo, hi):
        prod = lo * hi
    assert prod.precision == 256


def test_concurrent_bernoulli_cache():
    import threading

    results = []

    def worker():
        results.append(specfun.bernoulli(100))

    threads = [threading.Thread(target=worker) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(set(results)) == 1
    assert results[0] == Fraction(int(sympy.bernoulli(100).p), int(sympy.bernoulli(100).q))
