"""Exact (arbitrary-accuracy) evaluation of log Z_n.

Three independent routes are implemented.

1.  Closed forms: the Ginibre partition function

        Z_N = N^{-N(N+1)/2} prod_{k<=N} k! = N^{-N(N+1)/2} G(N+2),

    the rotationally symmetric case t = 0 (a Gamma product, regrouped into
    Barnes G factors), and the dual potential |z|^{2/d}.

2.  The multi-fold decomposition.  Writing n = dN + m, the d-fold symmetric
    ensemble factorizes into d Gaussian-with-point-charge problems at

        a = sqrt(n/N) t,     gamma_{l,c} = -2 (1 - (l+1+c)/d),

    giving  log Z_n = A1 + A2 + A3  with a fully explicit prefactor A1,
    A2 a sum of d log-moments of Ginibre characteristic polynomials, and
    A3 a sum of m highest-degree squared norms.  The squared norms
    h_j^{(c)}(a) of the monic polynomials orthogonal for
    |z - a|^{2c} e^{-N|z|^2} come from a Cholesky factorization of the
    moment matrix in the basis u^j, u = z - a.  In that basis the matrix
    elements have an exact series with positive terms,

        int u^j conj(u)^k |u|^{2c} e^{-N|u+a|^2} d2u/pi
            = (-1)^{j+k} e^{-N a^2} sum_{s >= max(j,k)}
              (N a)^{2s-j-k} / ((s-j)! (s-k)!) * Gamma(s+c+1) / N^{s+c+1},

    so no cancellation occurs while assembling the matrix; all conditioning
    is handled inside the extended-precision Cholesky (ratios of leading
    principal minors), with automatic precision escalation.

3.  The Gram-determinant oracle: Z_n = n! det(moments of the lemniscate
    weight), using the exact banded series for those moments (entries vanish
    unless j = k mod d).  This route shares no algebra with route 2 and is
    used for validation at small n.

A brute-force 2-D polar quadrature (``planar_moment``) provides the
independent oracle for the series moments themselves.
"""

from __future__ import annotations

import csv
import math
import threading
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr

from .errors import AccuracyError, DomainError, PrecisionEscalationError
from .model import LemniscateParams
from .precision import DEFAULT_BITS, combined_context, context
from .quadrature import graded_edges_toward, panel_nodes
from .specfun import log_barnes_g, log_gamma

DEGREE_CAP = 512         # largest polynomial degree a norm table will hold
GRAM_CAP = 25            # largest n for the determinant oracle
ESCALATION_CAP = 1024    # precision-doubling ceiling for Cholesky failures

_GUARD = 24


# ---------------------------------------------------------------------------
# signed log-magnitude numbers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LogValue:
    """A real number stored as (sign, log|value|); products never overflow."""

    sign: int
    log_abs: mpfr

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise DomainError(f"sign must be -1, 0 or +1, got {self.sign}")

    @classmethod
    def zero(cls):
        return cls(0, mpfr(0))

    @classmethod
    def from_number(cls, x, bits: int = DEFAULT_BITS) -> "LogValue":
        with context(bits):
            xv = mpfr(x)
            if xv == 0:
                return cls.zero()
            return cls(1 if xv > 0 else -1, gmpy2.log(abs(xv)))

    @classmethod
    def from_log(cls, log_abs, sign: int = 1) -> "LogValue":
        return cls(sign, mpfr(log_abs))

    def __mul__(self, other: "LogValue") -> "LogValue":
        if self.sign == 0 or other.sign == 0:
            return LogValue.zero()
        with combined_context(self.log_abs, other.log_abs):
            return LogValue(self.sign * other.sign, self.log_abs + other.log_abs)

    def __truediv__(self, other: "LogValue") -> "LogValue":
        if other.sign == 0:
            raise ZeroDivisionError("division by LogValue zero")
        if self.sign == 0:
            return LogValue.zero()
        with combined_context(self.log_abs, other.log_abs):
            return LogValue(self.sign * other.sign, self.log_abs - other.log_abs)

    def __pow__(self, k: int) -> "LogValue":
        if self.sign == 0:
            return LogValue.zero() if k != 0 else LogValue.from_number(1)
        sign = 1 if (self.sign == 1 or k % 2 == 0) else -1
        with combined_context(self.log_abs):
            return LogValue(sign, self.log_abs * k)

    @property
    def log(self) -> mpfr:
        if self.sign <= 0:
            raise DomainError("log of a nonpositive LogValue")
        return self.log_abs

    def to_float(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(float(self.log_abs))


# ---------------------------------------------------------------------------
# reduced parameters of the multi-fold decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReducedParams:
    """n = d N + m, rescaled charge position a, and the d charge exponents."""

    N: int
    m: int
    a: mpfr
    gammas: tuple


def map_parameters(n: int, p: LemniscateParams, bits: int = DEFAULT_BITS) -> ReducedParams:
    if n < p.d:
        raise DomainError(f"n = {n} is below the symmetry order d = {p.d}")
    N, m = divmod(n, p.d)
    with context(bits):
        a = gmpy2.sqrt(mpfr(n) / N) * mpfr(p.t)
        gammas = tuple(-2 + 2 * (ell + 1 + mpfr(p.c)) / p.d for ell in range(p.d))
    return ReducedParams(N=N, m=m, a=a, gammas=gammas)


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


def log_Z_ginibre(N: int, bits: int = DEFAULT_BITS) -> mpfr:
    """log of N^{-N(N+1)/2} G(N+2)."""
    if N < 1:
        raise DomainError(f"N must be positive, got {N}")
    with context(bits + _GUARD):
        res = -mpfr(N * (N + 1)) / 2 * gmpy2.log(N) + log_barnes_g(N + 2, bits=bits + _GUARD)
    with context(bits):
        return +res


def log_Z_radial(n: int, d: int, c, bits: int = DEFAULT_BITS) -> mpfr:
    """log Z_n at t = 0 via the Barnes-G regrouping of the Gamma product.

    Z_n = n! d^{-n} n^{-n(n+2c+1)/(2d)} prod_{j<n} Gamma((j+c+1)/d); the
    product collapses to d Barnes ratios after splitting j = d k + l.
    """
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    if d < 1:
        raise DomainError(f"d must be positive, got {d}")
    N, m = divmod(n, d)
    work = bits + _GUARD
    with context(work):
        cw = mpfr(c)
        if not cw > -1:
            raise DomainError(f"c must exceed -1, got {c}")
        res = log_gamma(n + 1, bits=work) - n * gmpy2.log(d)
        res -= mpfr(n) * (n + 2 * cw + 1) / (2 * d) * gmpy2.log(n)
        for ell in range(d):
            frac = (ell + cw + 1) / d
            res -= log_barnes_g(frac, bits=work)
            if ell < m:
                res += log_barnes_g(N + 1 + frac, bits=work)
            else:
                res += log_barnes_g(N + frac, bits=work)
    with context(bits):
        return +res


def log_Z_dual_potential(n: int, d: int, bits: int = DEFAULT_BITS) -> mpfr:
    """log Z_n for the dual potential |z|^{2/d} (diverging density at 0).

    Z_n = n! d^{dn(n+1)/2 + n/2} n^{-dn(n+1)/2} (2 pi)^{n(1-d)/2}
          prod_{l<d} G(n+1+l/d) / G(1+l/d).
    """
    if n < 1 or d < 1:
        raise DomainError(f"n and d must be positive, got n={n}, d={d}")
    work = bits + _GUARD
    with context(work):
        half_sum = mpfr(d) * n * (n + 1) / 2
        res = log_gamma(n + 1, bits=work)
        res += (half_sum + mpfr(n) / 2) * gmpy2.log(d)
        res -= half_sum * gmpy2.log(n)
        res += mpfr(n) * (1 - d) / 2 * gmpy2.log(2 * gmpy2.const_pi())
        for ell in range(d):
            frac = mpfr(ell) / d
            res += log_barnes_g(n + 1 + frac, bits=work) - log_barnes_g(1 + frac, bits=work)
    with context(bits):
        return +res


def prefactor_log_cNdm(N: int, d: int, m: int, c, bits: int = DEFAULT_BITS) -> mpfr:
    """log of the combinatorial prefactor c_{N,d}(m) of the decomposition:

    c_{N,d}(m) = (dN+m)!/(N!)^d * d^{-(dN+m)}
                 * (N/(dN+m))^{(d/2)N^2 + (1+2c+2m)N/2 + m(1+2c+m)/(2d)}.
    """
    if not 0 <= m < d:
        raise DomainError(f"m must lie in [0, d), got m={m}, d={d}")
    n = d * N + m
    work = bits + _GUARD
    with context(work):
        cw = mpfr(c)
        res = log_gamma(n + 1, bits=work) - d * log_gamma(N + 1, bits=work)
        res -= n * gmpy2.log(d)
        expo = mpfr(d) / 2 * N * N + (1 + 2 * cw + 2 * m) / 2 * N + m * (1 + 2 * cw + m) / (2 * d)
        res += expo * (gmpy2.log(N) - gmpy2.log(n))
    with context(bits):
        return +res


# ---------------------------------------------------------------------------
# moment matrices and squared orthogonal norms
# ---------------------------------------------------------------------------


@dataclass
class OrthoNormTable:
    """Squared norms h_j^{(c)}(a), j = 0..n_max, of the monic polynomials
    orthogonal for |z - a|^{2c} e^{-N|z|^2} d2z/pi."""

    N: int
    c: float
    a: float
    norms: list
    precision_bits: int

    @property
    def log_norms(self) -> list:
        with context(self.precision_bits):
            return [gmpy2.log(h) for h in self.norms]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["j", "log_h_j"])
            for j, lh in enumerate(self.log_norms):
                writer.writerow([j, str(lh)])


def _positive_moment_rows(N: int, c, a, size: int, eps: mpfr):
    """Sign-stripped translated moment matrix B (all entries positive).

    B[j][k] = |int u^j conj(u)^k |u|^{2c} e^{-N|u+a|^2} d2u/pi|; the true
    matrix is D B D with D = diag((-1)^j), which has the same leading
    principal minors.  Entries are evaluated by the positive-term series,
    accumulating g[s] = (Na)^{2s} Gamma(s+c+1)/N^{s+c+1} against inverse
    factorials.
    """
    na = N * a
    lam_f = float(na * a)
    c_f = float(c)
    g = [gmpy2.exp(log_gamma(c + 1, bits=gmpy2.get_context().precision) - (c + 1) * gmpy2.log(N))]
    na2 = na * na
    invfact = [mpfr(1)]
    napow = [mpfr(1)]  # (N a)^{-i}
    inv_na = 1 / na
    ratio_base = na2 / N

    def extend(upto):
        while len(g) <= upto:
            s = len(g)
            g.append(g[s - 1] * ratio_base * (s + c))
        while len(invfact) <= upto:
            i = len(invfact)
            invfact.append(invfact[i - 1] / i)

    def entry(j, k):
        s = max(j, k)
        extend(s)
        while len(napow) <= j + k:
            napow.append(napow[-1] * inv_na)
        total = g[s] * invfact[s - j] * invfact[s - k]
        while True:
            s += 1
            extend(s)
            term = g[s] * invfact[s - j] * invfact[s - k]
            total += term
            # stop only on the decaying side of the term profile
            if (s - j) * (s - k) > lam_f * (s + c_f + 1) and term < total * eps:
                break
        return total * napow[j + k]

    rows = [[None] * size for _ in range(size)]
    for j in range(size):
        for k in range(j, size):
            val = entry(j, k)
            rows[j][k] = val
            rows[k][j] = val
    pref = gmpy2.exp(-na * a)
    for j in range(size):
        for k in range(size):
            rows[j][k] *= pref
    return rows


def _cholesky_scaled(rows, size: int, min_pivot=None):
    """Cholesky of diag-scaled ``rows``.

    Returns (L, scales, fail_index); on loss of positive definiteness the
    factor is valid up to (excluding) row ``fail_index``.  The scaled pivot
    L_jj^2 equals h_j / B_jj, which is exactly the cancellation the factor
    has to resolve, so a pivot below ``min_pivot`` means the working
    precision cannot certify the requested accuracy and is reported as a
    failure as well (silent loss would otherwise go unnoticed: the matrix
    stays numerically positive definite long after the pivots are wrong).
    """
    scales = [1 / gmpy2.sqrt(rows[j][j]) for j in range(size)]
    low = [[mpfr(0)] * size for _ in range(size)]
    for i in range(size):
        for j in range(i + 1):
            acc = rows[i][j] * scales[i] * scales[j]
            li = low[i]
            lj = low[j]
            for m in range(j):
                acc -= li[m] * lj[m]
            if i == j:
                if not acc > 0 or (min_pivot is not None and acc < min_pivot):
                    return low, scales, i
                li[i] = gmpy2.sqrt(acc)
            else:
                li[j] = acc / lj[j]
    return low, scales, None


def _diagonal_moment(N: int, c, a, deg: int, bits: int = 64) -> mpfr:
    """Single diagonal entry B[deg][deg] of the shifted moment matrix."""
    with context(bits):
        cw, aw = mpfr(c), mpfr(a)
        na = N * aw
        lam = float(na * aw)
        eps = mpfr(2) ** (-(bits + 16))
        term = gmpy2.exp(log_gamma(deg + cw + 1, bits=bits) - (deg + cw + 1) * gmpy2.log(N) - na * aw)
        total = term
        s = deg
        while True:
            s += 1
            term *= na * aw * (s + cw) / ((s - deg) * (s - deg))  # term ratio at j = k = deg
            total += term
            if (s - deg) ** 2 > lam * (s + float(c) + 1) and term < total * eps:
                break
        return total


def _conditioning_bits(N: int, c_f: float, a_f: float, n_max: int) -> int:
    """Estimated bits of cancellation in the deepest minor ratio h_n / B_nn.

    log B_nn is evaluated cheaply from the series at low precision and
    log h_n from the top-norm asymptotics; their gap is the headroom the
    Cholesky needs on top of the requested accuracy.
    """
    if a_f == 0.0:
        return 0
    log2_bnn = float(gmpy2.log2(_diagonal_moment(N, c_f, a_f, n_max)))
    ln_h = -n_max + 0.5 * math.log(2 * math.pi / N)
    if a_f > 1:
        ln_h += 2 * c_f * math.log(a_f)
    ln_h -= abs(c_f) * 4 + 8  # slack for the O(1) amplitude
    return max(0, int(log2_bnn - ln_h / math.log(2)))


def ortho_norms(N: int, c, a, n_max: int, bits: int = DEFAULT_BITS) -> OrthoNormTable:
    """Norm table h_0..h_{n_max} via Cholesky minor ratios, with automatic
    precision doubling (up to ESCALATION_CAP) on loss of positive
    definiteness."""
    if N < 1:
        raise DomainError(f"N must be positive, got {N}")
    if not float(c) > -1:
        raise DomainError(f"c must exceed -1, got {c}")
    if float(a) < 0:
        raise DomainError(f"a must be nonnegative, got {a}")
    if not 0 <= n_max <= DEGREE_CAP:
        raise DomainError(f"n_max must lie in [0, {DEGREE_CAP}], got {n_max}")
    size = n_max + 1

    if float(a) == 0.0:
        with context(bits + _GUARD):
            cw = mpfr(c)
            logn = gmpy2.log(N)
            norms = [gmpy2.exp(log_gamma(j + cw + 1, bits=bits + _GUARD) - (j + cw + 1) * logn) for j in range(size)]
        with context(bits):
            norms = [+h for h in norms]
        return OrthoNormTable(N=N, c=float(c), a=0.0, norms=norms, precision_bits=bits)

    headroom = _conditioning_bits(N, float(c), float(a), n_max)
    work = bits + headroom + 64
    cap = max(ESCALATION_CAP, work)
    fail = None
    while work <= cap:
        with context(work + _GUARD):
            eps = mpfr(2) ** (-(work + 16))
            rows = _positive_moment_rows(N, mpfr(c), mpfr(a), size, eps)
            min_pivot = mpfr(2) ** (-(work - bits - 48)) if work - bits > 48 else None
            low, scales, fail = _cholesky_scaled(rows, size, min_pivot)
            if fail is None:
                norms = [low[j][j] ** 2 * rows[j][j] for j in range(size)]
                with context(bits):
                    norms = [+h for h in norms]
                return OrthoNormTable(N=N, c=float(c), a=float(a), norms=norms, precision_bits=bits)
        if work == cap:
            break
        work = min(2 * work, cap)
    raise PrecisionEscalationError(
        f"norm table could not be certified at degree {fail} even at {cap} bits "
        f"(N={N}, c={c}, a={a})",
        degree=fail,
    )


def norm_c1_incomplete_gamma(N: int, a, k: int, bits: int = DEFAULT_BITS) -> mpfr:
    """Closed form for c = 1:  h_k^{(1)}(a) = (k+1)!/N^{k+2} * Q(k+2, Na^2)/Q(k+1, Na^2)."""
    if k < 0:
        raise DomainError(f"k must be nonnegative, got {k}")
    from .specfun import regularized_gamma_q

    work = bits + _GUARD
    with context(work):
        aw = mpfr(a)
        x = N * aw * aw
        res = gmpy2.exp(log_gamma(k + 2, bits=work) - (k + 2) * gmpy2.log(N))
        res *= regularized_gamma_q(k + 2, x, bits=work) / regularized_gamma_q(k + 1, x, bits=work)
    with context(bits):
        return +res


def monic_coefficients(N: int, c, a, bits: int = DEFAULT_BITS):
    """Coefficients (alpha_0..alpha_{N-1}, 1) of the degree-N monic orthogonal
    polynomial in the shifted basis u^j, u = z - a."""
    if N < 1:
        raise DomainError(f"N must be positive, got {N}")
    size = N + 1
    work = bits + _conditioning_bits(N, float(c), float(a), N) + 64
    cap = max(ESCALATION_CAP, work)
    while True:
        with context(work + _GUARD):
            eps = mpfr(2) ** (-(work + 16))
            rows = _positive_moment_rows(N, mpfr(c), mpfr(a), size, eps)
            min_pivot = mpfr(2) ** (-(work - bits - 48)) if work - bits > 48 else None
            low, scales, fail = _cholesky_scaled(rows, size, min_pivot)
            if fail is not None and fail < N:
                if work == cap:
                    raise PrecisionEscalationError(
                        f"moment matrix could not be certified at degree {fail}", degree=fail
                    )
                work = min(2 * work, cap)
                continue
            # solve B beta = -(-1)^N b over the leading N x N block,
            # where b_j = B[j][N]; then alpha_k = (-1)^k beta_k
            rhs = [-rows[j][N] * scales[j] * (1 if N % 2 == 0 else -1) for j in range(N)]
            # forward substitution L y = rhs, then L^T x = y
            y = [mpfr(0)] * N
            for i in range(N):
                acc = rhs[i]
                for m in range(i):
                    acc -= low[i][m] * y[m]
                y[i] = acc / low[i][i]
            x = [mpfr(0)] * N
            for i in reversed(range(N)):
                acc = y[i]
                for m in range(i + 1, N):
                    acc -= low[m][i] * x[m]
                x[i] = acc / low[i][i]
            alphas = [x[j] * scales[j] * (1 if j % 2 == 0 else -1) for j in range(N)]
        with context(bits):
            return [+v for v in alphas] + [mpfr(1)]


# ---------------------------------------------------------------------------
# the multi-fold decomposition and the Gram-determinant oracle
# ---------------------------------------------------------------------------


def log_Z_lemniscate(n: int, p: LemniscateParams, bits: int = DEFAULT_BITS) -> mpfr:
    """log Z_n via the multi-fold decomposition A1 + A2 + A3."""
    red = map_parameters(n, p, bits + _GUARD)
    N, m = red.N, red.m
    work = bits + _GUARD
    with context(work):
        t = mpfr(p.t)
        a1 = mpfr(n) ** 2 * t * t
        a1 += prefactor_log_cNdm(N, p.d, m, p.c, bits=work)
        a1 += p.d * log_Z_ginibre(N, bits=work)
        log_n_fact = log_gamma(N + 1, bits=work)
        log_gin = log_Z_ginibre(N, bits=work)
        a2 = mpfr(0)
        a3 = mpfr(0)
        for ell, gamma in enumerate(red.gammas):
            n_max = N if ell < m else N - 1
            table = ortho_norms(N, gamma / 2, red.a, n_max, bits=work)
            logs = table.log_norms
            a2 += log_n_fact - log_gin
            for j in range(N):
                a2 += logs[j]
            if ell < m:
                a3 += logs[N]
        res = a1 + a2 + a3
    with context(bits):
        return +res


def lemniscate_moment(n: int, p: LemniscateParams, j: int, k: int, bits: int = DEFAULT_BITS) -> mpfr:
    """Moment int z^j conj(z)^k |z|^{2c} e^{-n V(z)} d2z/pi by the exact
    banded series; vanishes unless j = k (mod d)."""
    if j < 0 or k < 0:
        raise DomainError("moment degrees must be nonnegative")
    d = p.d
    with context(bits + _GUARD):
        if (j - k) % d != 0:
            res = mpfr(0)
        else:
            ell = j % d
            J, K = (j - ell) // d, (k - ell) // d
            cw = mpfr(p.c)
            t = mpfr(p.t)
            alpha = (ell + cw + 1) / d
            logn = gmpy2.log(n)
            s = max(J, K)
            nt2 = mpfr(n) * t * t
            log_t0 = log_gamma(s + alpha, bits=bits + _GUARD) - (s + alpha) * logn - gmpy2.log(d)
            if s > J:
                log_t0 += (s - J + s - K) * gmpy2.log(n * t) - log_gamma(s - J + 1, bits=bits + _GUARD) - log_gamma(
                    s - K + 1, bits=bits + _GUARD
                )
            elif s > K:
                log_t0 += (s - K) * gmpy2.log(n * t) - log_gamma(s - K + 1, bits=bits + _GUARD)
            term = gmpy2.exp(log_t0)
            total = term
            eps = mpfr(2) ** (-(bits + 16))
            if t > 0:
                while True:
                    ratio = (s + alpha) * t * t * n / ((s + 1 - J) * (s + 1 - K))
                    term *= ratio
                    s += 1
                    total += term
                    if ratio < mpfr(1) / 2 and term < total * eps:
                        break
            res = total
    with context(bits):
        return +res


def log_Z_gram(n: int, p: LemniscateParams, bits: int = DEFAULT_BITS) -> mpfr:
    """log Z_n = log(n! det M) with M the lemniscate moment matrix.

    The determinant splits over residue classes mod d (band structure), and
    each block determinant is a product of Cholesky pivots, accumulated as
    a LogValue.  Validation route only; capped at n <= GRAM_CAP.
    """
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    if n > GRAM_CAP:
        raise DomainError(f"Gram-determinant route is capped at n = {GRAM_CAP}, got {n}")
    d = p.d
    work = bits + _GUARD
    while True:
        with context(work):
            det = LogValue.from_number(1)
            fail = False
            for ell in range(min(d, n)):
                degrees = list(range(ell, n, d))
                size = len(degrees)
                rows = [[lemniscate_moment(n, p, dj, dk, bits=work) for dk in degrees] for dj in degrees]
                low, scales, bad = _cholesky_scaled(rows, size)
                if bad is not None:
                    fail = True
                    break
                for i in range(size):
                    det = det * LogValue.from_log(2 * gmpy2.log(low[i][i]) + gmpy2.log(rows[i][i]))
            if not fail:
                res = log_gamma(n + 1, bits=work) + det.log
                with context(bits):
                    return +res
        if work >= ESCALATION_CAP:
            raise PrecisionEscalationError("Gram determinant lost positive definiteness", degree=n)
        work = min(2 * work, ESCALATION_CAP)


# ---------------------------------------------------------------------------
# brute-force polar quadrature (oracle for the series moments)
# ---------------------------------------------------------------------------


def _planar_rmax(N: int, power: float, bits: int) -> float:
    """Radius where r^power e^{-N r^2} underflows the accuracy target."""
    budget = (bits / 2 + 32) * math.log(2)
    r = math.sqrt(max(budget, 4.0) / N)
    for _ in range(30):
        r = math.sqrt((budget + max(power, 0.0) * math.log(max(r, 1.0))) / N)
    return r


def planar_moment(
    N: int,
    c,
    a,
    j: int,
    k: int,
    bits: int = DEFAULT_BITS,
    max_refinements: int = 6,
) -> mpfr:
    """int z^j conj(z)^k |z - a|^{2c} e^{-N|z|^2} d2z/pi by polar quadrature.

    Radial direction: composite Gauss-Legendre on [0, rmax], with panels
    graded geometrically toward r = a where the angular integrand loses
    smoothness for non-integer c.  Angular direction: uniform nodes
    (trapezoid), count 8*max(j,k) + 64, doubled on each refinement.
    Refinement stops when two sweeps agree to 2^(-bits/2) relative;
    exhausting ``max_refinements`` raises AccuracyError with the estimate.
    """
    if j < 0 or k < 0:
        raise DomainError("moment degrees must be nonnegative")
    cf = float(c)
    if not cf > -1:
        raise DomainError(f"c must exceed -1, got {c}")
    af = float(a)
    if af < 0:
        raise DomainError(f"a must be nonnegative, got {a}")
    work = bits + _GUARD
    target = mpfr(2) ** (-(bits // 2))
    rmax = _planar_rmax(N, j + k + 2 * cf + 1, bits)
    fractional = abs(cf - round(cf)) > 1e-12
    prev = None
    with context(work):
        cw = mpfr(c)
        aw = mpfr(a)
        for level in range(max_refinements):
            order = 16
            # radial panel edges: graded toward the kink at r = a (if any),
            # plus a uniform background fine enough for the Gaussian decay
            n_bg = max(8, int(rmax * math.sqrt(N))) * (1 << level)
            edges = {mpfr(i) * rmax / n_bg for i in range(n_bg + 1)}
            if fractional and 0.0 < af < rmax:
                levels = min(80, int((bits / 2 + 16) / max(2 * cf + 2, 0.5)) + 4) + 4 * level
                edges.update(graded_edges_toward(aw, mpfr(0), levels))
                edges.update(graded_edges_toward(aw, mpfr(rmax), levels))
            r_nodes, r_weights = panel_nodes(sorted(edges), order, work)
            n_theta = (8 * max(j, k, 1) + 64) * (1 << level)
            # theta in [0, pi], doubled by symmetry of the real part
            thetas = [(gmpy2.const_pi() * (2 * i + 1)) / (2 * n_theta) for i in range(n_theta)]
            cos_s = [gmpy2.cos((j - k) * th) for th in thetas]
            cos_1 = [gmpy2.cos(th) for th in thetas]
            dtheta = gmpy2.const_pi() / n_theta
            total = mpfr(0)
            mag = mpfr(0)
            for r, wr in zip(r_nodes, r_weights):
                r2a2 = r * r + aw * aw
                two_ar = 2 * aw * r
                ang = mpfr(0)
                ang_abs = mpfr(0)
                for cs, c1 in zip(cos_s, cos_1):
                    term = cs * (r2a2 - two_ar * c1) ** cw
                    ang += term
                    ang_abs += abs(term)
                radial = wr * r ** (j + k + 1) * gmpy2.exp(-N * r * r) * dtheta
                total += radial * ang
                mag += radial * ang_abs
            val = total * 2 / gmpy2.const_pi()
            mag = mag * 2 / gmpy2.const_pi()
            # scale the target by the absolute-integrand mass so that moments
            # vanishing by symmetry still converge
            if prev is not None and abs(val - prev) <= target * max(abs(val), mag):
                with context(bits):
                    return +val
            prev = val
    raise AccuracyError(
        f"planar moment did not reach 2^-{bits // 2} after {max_refinements} refinements",
        estimate=prev,
    )


def lemniscate_moment_quad(
    n: int,
    p: LemniscateParams,
    j: int,
    k: int,
    bits: int = DEFAULT_BITS,
    max_refinements: int = 6,
) -> mpfr:
    """2-D polar quadrature of int z^j conj(z)^k |z|^{2c} e^{-n V} d2z/pi.

    Oracle for ``lemniscate_moment``; the angular factor e^{2 n t r^d cos(d
    theta)} is entire, so uniform angular nodes converge spectrally, and the
    only radial care is the r^{2c} endpoint at 0 (graded panels) plus the
    e^{-n r^{2d}} tail (truncation).
    """
    d, t, c = p.d, p.t, p.c
    # decay n(r^{2d} - 2 t r^d) = budget has the closed-form solution below
    budget = (bits / 2 + 32) * math.log(2)
    rho = t + math.sqrt(t * t + budget / n)
    rmax = rho ** (1.0 / d)
    work = bits + _GUARD
    target = mpfr(2) ** (-(bits // 2))
    prev = None
    with context(work):
        cw = mpfr(c)
        tw = mpfr(t)
        for level in range(max_refinements):
            n_bg = max(8, int(2 * rmax * math.sqrt(n) * d)) * (1 << level)
            edges = {mpfr(i) * rmax / n_bg for i in range(n_bg + 1)}
            if abs(c - round(c)) > 1e-12:
                levels = min(80, int((bits / 2 + 16) / max(2 * c + 2, 0.5)) + 4) + 4 * level
                edges.update(graded_edges_toward(mpfr(0), mpfr(rmax) / n_bg, levels))
            r_nodes, r_weights = panel_nodes(sorted(edges), 16, work)
            n_theta = (8 * max(j, k, d) + 64) * (1 << level)
            thetas = [(gmpy2.const_pi() * (2 * i + 1)) / (2 * n_theta) for i in range(n_theta)]
            cos_s = [gmpy2.cos((j - k) * th) for th in thetas]
            cos_d = [gmpy2.cos(d * th) for th in thetas]
            dtheta = gmpy2.const_pi() / n_theta
            total = mpfr(0)
            mag = mpfr(0)
            for r, wr in zip(r_nodes, r_weights):
                rd = r**d
                radial = wr * r ** (j + k + 1) * r ** (2 * cw) * gmpy2.exp(-n * rd * rd) * dtheta
                ang = mpfr(0)
                ang_abs = mpfr(0)
                for cs, cd in zip(cos_s, cos_d):
                    term = cs * gmpy2.exp(2 * n * tw * rd * cd)
                    ang += term
                    ang_abs += abs(term)
                total += radial * ang
                mag += radial * ang_abs
            val = total * 2 / gmpy2.const_pi()
            mag = mag * 2 / gmpy2.const_pi()
            if prev is not None and abs(val - prev) <= target * max(abs(val), mag):
                with context(bits):
                    return +val
            prev = val
    raise AccuracyError(
        f"lemniscate moment did not reach 2^-{bits // 2} after {max_refinements} refinements",
        estimate=prev,
    )
