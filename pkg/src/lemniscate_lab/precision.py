"""Arbitrary-precision arithmetic plumbing.

All extended-precision computation in this package runs on ``gmpy2.mpfr``
(binary floating point with an explicit mantissa size).  A value together
with its mantissa bit count is what the rest of the code calls a *big real*.
Every public routine takes a ``bits`` argument and evaluates inside a local
gmpy2 context of that precision, so results are reproducible and independent
of any global state.

Conventions
-----------
* ``bits >= MIN_BITS`` everywhere; the default working precision is
  ``DEFAULT_BITS``.
* combining two big reals is done at the larger of their precisions
  (see :func:`max_precision` / :func:`combined_context`);
* decimal serialization uses ``ceil(bits * log10(2)) + 2`` digits, which is
  enough for an exact binary round trip.
"""

from __future__ import annotations

import math
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

MIN_BITS = 64
DEFAULT_BITS = 256

# log10(2); digits = ceil(bits * LOG10_2) + 2 guarantees a lossless round trip
LOG10_2 = 0.30103


def context(bits: int = DEFAULT_BITS) -> gmpy2.context:
    """A gmpy2 context with ``bits`` of mantissa, usable as a context manager."""
    if bits < MIN_BITS:
        raise ValueError(f"precision must be at least {MIN_BITS} bits, got {bits}")
    return gmpy2.context(precision=bits)


def max_precision(*values) -> int:
    """Largest mantissa size among the given mpfr values (floats count as 53)."""
    bits = MIN_BITS
    for v in values:
        bits = max(bits, getattr(v, "precision", 53))
    return bits


def combined_context(*values) -> gmpy2.context:
    """Context at the maximum precision of the operands, for mixed arithmetic."""
    return gmpy2.context(precision=max_precision(*values))


def to_mpfr(x, bits: int = DEFAULT_BITS) -> mpfr:
    """Convert ``x`` (int, float, str, Fraction or mpfr) to mpfr at ``bits``."""
    with context(bits):
        if isinstance(x, Fraction):
            return mpfr(x.numerator) / mpfr(x.denominator)
        return mpfr(x)


def serialization_digits(bits: int) -> int:
    return math.ceil(bits * LOG10_2) + 2


def to_decimal(x: mpfr) -> str:
    """Decimal string carrying enough digits to reproduce ``x`` exactly."""
    if not gmpy2.is_finite(x):
        return str(x)
    mant, exp, _ = gmpy2.digits(x, 10, serialization_digits(x.precision))
    sign = ""
    if mant.startswith("-"):
        sign, mant = "-", mant[1:]
    if not mant.strip("0"):
        return "0"
    return f"{sign}0.{mant}e{exp}"


def from_decimal(s: str, bits: int) -> mpfr:
    return to_mpfr(s, bits)


def log_2pi(bits: int) -> mpfr:
    with context(bits):
        return gmpy2.log(2 * gmpy2.const_pi())
