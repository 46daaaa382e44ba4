"""Extended-precision and exact arithmetic helpers.

Reals are ``mpmath.mpf`` values, rationals are ``fractions.Fraction``.
Functions decorated with :func:`with_precision` accept a ``dps`` keyword
(decimal digits, default :data:`DEFAULT_DPS`) and evaluate inside
``mpmath.workdps``.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
from mpmath import mp, mpf

from .errors import AccuracyError, AccuracyWarning, BracketError, DomainError

DEFAULT_DPS = 64
MIN_DPS = 16


def with_precision(func):
    @functools.wraps(func)
    def wrapper(*args, dps: int | None = None, **kwargs):
        dps = DEFAULT_DPS if dps is None else int(dps)
        if dps < MIN_DPS:
            raise DomainError(f"precision must be at least {MIN_DPS} digits, got {dps}")
        with mp.workdps(dps):
            return func(*args, **kwargs)

    return wrapper


def to_mpf(x) -> mpf:
    if isinstance(x, Fraction):
        return mpf(x.numerator) / x.denominator
    return mpf(x)


def parse_number(text: str):
    """Parse ``p/q`` into a Fraction and anything else into a Fraction of the decimal.

    Decimal strings are kept exact (``0.5`` -> ``1/2``) so they can feed
    the exact routes; callers convert to mpf when they need a real.
    """
    text = text.strip()
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"cannot parse number {text!r}") from exc


# ---------------------------------------------------------------------------
# special functions


@with_precision
def log_gamma(x) -> mpf:
    x = to_mpf(x)
    if x <= 0:
        raise DomainError(f"log_gamma needs x > 0, got {x}")
    return mpmath.loggamma(x)


@with_precision
def zeta_prime_minus_one() -> mpf:
    """zeta'(-1) = 1/12 - log A with A the Glaisher-Kinkelin constant."""
    return mpf(1) / 12 - mpmath.log(mpmath.glaisher)


def _barnes_tail(z: mpf, eps: mpf) -> mpf:
    # sum_{k>=1} B_{2k+2} / (4k(k+1) z^{2k}); asymptotic, stop at the smallest term
    total = mpf(0)
    z2 = z * z
    zpow = z2
    prev = None
    k = 1
    while True:
        term = mpmath.bernoulli(2 * k + 2) / (4 * k * (k + 1) * zpow)
        if prev is not None and abs(term) > abs(prev):
            raise AccuracyError("Barnes G asymptotic series diverged before convergence", best=total)
        total += term
        if abs(term) < eps * max(1, abs(total)):
            return total
        prev = term
        zpow *= z2
        k += 1


@with_precision
def log_barnes_g(x) -> mpf:
    """log G(x) for real x > 0.

    Shifts the argument up with G(z+1) = Gamma(z) G(z) until the large-z
    expansion of log G(z+1) converges at the working precision.
    """
    x = to_mpf(x)
    if x <= 0:
        raise DomainError(f"log_barnes_g needs x > 0, got {x}")
    threshold = max(20, mp.dps / 2)
    eps = mpf(10) ** (-mp.dps - 2)
    with mp.extradps(10):
        shift = mpf(0)
        y = x
        while y < threshold:
            shift += mpmath.loggamma(y)
            y += 1
        z = y - 1
        lz = mpmath.log(z)
        value = (
            z * z * lz / 2
            - mpf(3) / 4 * z * z
            + mpmath.log(2 * mpmath.pi) * z / 2
            - lz / 12
            + zeta_prime_minus_one(dps=mp.dps)
            + _barnes_tail(z, eps)
        )
        value -= shift
    return +value


@with_precision
def barnes_g_ratio_log(numer: Sequence, denom: Sequence) -> mpf:
    return mpmath.fsum(log_barnes_g(v, dps=mp.dps) for v in numer) - mpmath.fsum(
        log_barnes_g(v, dps=mp.dps) for v in denom
    )


def _exact_incomplete_beta(x: Fraction, p: int, q: int) -> Fraction:
    # int_0^x s^{p-1} (1-s)^{q-1} ds, binomial expansion of (1-s)^{q-1}
    total = Fraction(0)
    xp = x ** p
    for i in range(q):
        total += Fraction((-1) ** i * math.comb(q - 1, i), p + i) * xp
        xp *= x
    return total


def incomplete_beta(x, p, q, *, dps: int | None = None):
    """Lower incomplete beta integral; exact Fraction for rational x and integer p, q."""
    exact = (
        isinstance(x, (Fraction, int))
        and _is_integer(p)
        and _is_integer(q)
    )
    if exact:
        x = Fraction(x)
        if not 0 <= x <= 1:
            raise DomainError(f"incomplete_beta needs 0 <= x <= 1, got {x}")
        p, q = int(p), int(q)
        if p <= 0 or q <= 0:
            raise DomainError("incomplete_beta needs p, q > 0")
        return _exact_incomplete_beta(x, p, q)
    return _real_incomplete_beta(x, p, q, dps=dps)


@with_precision
def _real_incomplete_beta(x, p, q) -> mpf:
    x, p, q = to_mpf(x), to_mpf(p), to_mpf(q)
    if not 0 <= x <= 1:
        raise DomainError(f"incomplete_beta needs 0 <= x <= 1, got {x}")
    if p <= 0 or q <= 0:
        raise DomainError("incomplete_beta needs p, q > 0")
    return mpmath.betainc(p, q, 0, x)


def _is_integer(v) -> bool:
    if isinstance(v, bool):
        return False
    if isinstance(v, int):
        return True
    if isinstance(v, Fraction):
        return v.denominator == 1
    return False


# ---------------------------------------------------------------------------
# determinants


def bareiss_det(matrix: Sequence[Sequence]) -> Fraction:
    """Exact determinant by fraction-free (Bareiss) elimination.

    Rational input is first scaled row-wise to integers, so every
    intermediate quotient is an exact integer division.
    """
    n = len(matrix)
    if n == 0:
        return Fraction(1)
    rows = []
    scale = Fraction(1)
    for row in matrix:
        row = [Fraction(v) for v in row]
        if len(row) != n:
            raise DomainError("bareiss_det needs a square matrix")
        lcm = 1
        for v in row:
            lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
        rows.append([int(v * lcm) for v in row])
        scale /= lcm
    sign = 1
    prev = 1
    for k in range(n - 1):
        if rows[k][k] == 0:
            for i in range(k + 1, n):
                if rows[i][k] != 0:
                    rows[k], rows[i] = rows[i], rows[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        pivot = rows[k][k]
        rk = rows[k]
        for i in range(k + 1, n):
            ri = rows[i]
            rik = ri[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * pivot - rik * rk[j]) // prev
            ri[k] = 0
        prev = pivot
    return sign * rows[n - 1][n - 1] * scale


@with_precision
def lu_logdet(matrix: Sequence[Sequence]) -> tuple[int, mpf]:
    """Sign and log|det| by partial-pivot LU at working precision."""
    n = len(matrix)
    a = [[to_mpf(v) for v in row] for row in matrix]
    sign = 1
    logabs = mpf(0)
    for k in range(n):
        piv = max(range(k, n), key=lambda i: abs(a[i][k]))
        if a[piv][k] == 0:
            return 0, mpf("-inf")
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        pivot = a[k][k]
        if pivot < 0:
            sign = -sign
        logabs += mpmath.log(abs(pivot))
        for i in range(k + 1, n):
            f = a[i][k] / pivot
            if f:
                ai, ak = a[i], a[k]
                for j in range(k + 1, n):
                    ai[j] -= f * ak[j]
    return sign, logabs


# ---------------------------------------------------------------------------
# quadrature


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss rule on [a, b] for the weight (x-a)^ea (b-x)^eb."""

    a: object
    b: object
    ea: object = Fraction(-1, 2)
    eb: object = Fraction(-1, 2)
    n: int = 32

    def __post_init__(self):
        if not to_mpf(self.a) < to_mpf(self.b):
            raise DomainError("quadrature interval needs a < b")
        if to_mpf(self.ea) <= -1 or to_mpf(self.eb) <= -1:
            raise DomainError("edge exponents must exceed -1")
        if self.n < 1:
            raise DomainError("node count must be positive")

    def with_nodes(self, n: int) -> "QuadratureRule":
        return QuadratureRule(self.a, self.b, self.ea, self.eb, n)

    def nodes_weights(self, *, dps: int | None = None):
        return _nodes_weights(self.a, self.b, Fraction(self.ea), Fraction(self.eb), self.n, dps=dps)


_HALF = Fraction(1, 2)


def _chebyshev_reference(ea: Fraction, eb: Fraction, n: int):
    """Closed-form Gauss-Chebyshev nodes/weights on [-1,1], weight (1+t)^ea (1-t)^eb."""
    pi = mpmath.pi
    ts, ws = [], []
    if ea == -_HALF and eb == -_HALF:
        for k in range(1, n + 1):
            ts.append(mpmath.cos((2 * k - 1) * pi / (2 * n)))
            ws.append(pi / n)
    elif ea == _HALF and eb == _HALF:
        for k in range(1, n + 1):
            th = k * pi / (n + 1)
            ts.append(mpmath.cos(th))
            ws.append(pi / (n + 1) * mpmath.sin(th) ** 2)
    elif ea == _HALF and eb == -_HALF:
        # weight sqrt((1+t)/(1-t))
        for k in range(1, n + 1):
            t = mpmath.cos((2 * k - 1) * pi / (2 * n + 1))
            ts.append(t)
            ws.append(2 * pi / (2 * n + 1) * (1 + t))
    elif ea == -_HALF and eb == _HALF:
        # weight sqrt((1-t)/(1+t))
        for k in range(1, n + 1):
            t = mpmath.cos(2 * k * pi / (2 * n + 1))
            ts.append(t)
            ws.append(2 * pi / (2 * n + 1) * (1 - t))
    else:
        return None
    return ts, ws


def golub_welsch(alpha, beta, n: int, *, dps: int | None = None):
    """Gauss-Jacobi nodes and weights on [-1, 1] for (1-t)^alpha (1+t)^beta.

    Eigen-decomposition of the symmetric Jacobi matrix of the monic
    recurrence, carried out at the working precision.
    """
    return _golub_welsch(alpha, beta, n, dps=dps)


@with_precision
def _golub_welsch(alpha, beta, n):
    al, be = to_mpf(alpha), to_mpf(beta)
    diag, off = [], []
    for k in range(n):
        s = 2 * k + al + be
        if k == 0:
            diag.append((be - al) / (al + be + 2))
        else:
            diag.append((be * be - al * al) / (s * (s + 2)))
        if k == 1:
            # general formula is 0/0 when alpha + beta = -1
            off.append(mpmath.sqrt(4 * (1 + al) * (1 + be) / ((2 + al + be) ** 2 * (3 + al + be))))
        elif k > 1:
            num = 4 * k * (k + al) * (k + be) * (k + al + be)
            den = s * s * (s + 1) * (s - 1)
            off.append(mpmath.sqrt(num / den))
    jac = mpmath.zeros(n, n)
    for k in range(n):
        jac[k, k] = diag[k]
    for k in range(n - 1):
        jac[k, k + 1] = jac[k + 1, k] = off[k]
    evals, evecs = mpmath.eigsy(jac)
    mu0 = 2 ** (al + be + 1) * mpmath.beta(al + 1, be + 1)
    pairs = sorted((evals[i], mu0 * evecs[0, i] ** 2) for i in range(n))
    return [p[0] for p in pairs], [p[1] for p in pairs]


@with_precision
def _nodes_weights(a, b, ea: Fraction, eb: Fraction, n: int):
    a, b = to_mpf(a), to_mpf(b)
    ref = _chebyshev_reference(ea, eb, n)
    if ref is None:
        # weight (1+t)^ea (1-t)^eb == Jacobi with alpha=eb, beta=ea
        ref = _golub_welsch(eb, ea, n, dps=mp.dps)
    ts, ws = ref
    c, r = (a + b) / 2, (b - a) / 2
    jac = r ** (1 + to_mpf(ea) + to_mpf(eb))
    return [c + r * t for t in ts], [w * jac for w in ws]


@with_precision
def gauss_jacobi_sum(rule: QuadratureRule, f: Callable) -> mpf:
    xs, ws = _nodes_weights(rule.a, rule.b, Fraction(rule.ea), Fraction(rule.eb), rule.n, dps=mp.dps)
    return mpmath.fsum(w * f(x) for x, w in zip(xs, ws))


@with_precision
def gauss_jacobi_integrate(rule: QuadratureRule, f: Callable, tol=None, max_nodes: int = 1 << 14) -> mpf:
    """Integrate f against the rule's edge weight, doubling nodes until converged."""
    tol = mpf(10) ** (-(mp.dps // 2)) if tol is None else to_mpf(tol)
    current = rule
    prev = gauss_jacobi_sum(current, f, dps=mp.dps)
    while True:
        nxt_rule = current.with_nodes(2 * current.n)
        if nxt_rule.n > max_nodes:
            raise AccuracyError(
                f"quadrature did not converge to {mpmath.nstr(tol, 3)} with {current.n} nodes", best=prev
            )
        nxt = gauss_jacobi_sum(nxt_rule, f, dps=mp.dps)
        if abs(nxt - prev) < tol:
            return nxt
        prev, current = nxt, nxt_rule


# ---------------------------------------------------------------------------
# root finding and differentiation


@with_precision
def brent_root(f: Callable, lo, hi, tol=None, maxiter: int = 500) -> mpf:
    """Brent's method on a sign-changing bracket [lo, hi]."""
    a, b = to_mpf(lo), to_mpf(hi)
    tol = mpf(10) ** (-(mp.dps // 2)) if tol is None else to_mpf(tol)
    fa, fb = f(a), f(b)
    if fa == 0:
        return a
    if fb == 0:
        return b
    if fa * fb > 0:
        raise BracketError(f"no sign change on [{mpmath.nstr(a, 8)}, {mpmath.nstr(b, 8)}]")
    if abs(fa) < abs(fb):
        a, b, fa, fb = b, a, fb, fa
    c, fc = a, fa
    d = e = b - a
    eps = mpf(2) ** (-mp.prec)
    for _ in range(maxiter):
        if fb * fc > 0:
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol1 = 2 * eps * abs(b) + tol / 2
        xm = (c - b) / 2
        if abs(xm) <= tol1 or fb == 0:
            return b
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p, q = 2 * xm * s, 1 - s
            else:
                q, r = fa / fc, fb / fc
                p = s * (2 * xm * q * (q - r) - (b - a) * (r - 1))
                q = (q - 1) * (r - 1) * (s - 1)
            if p > 0:
                q = -q
            p = abs(p)
            if 2 * p < min(3 * xm * q - abs(tol1 * q), abs(e * q)):
                e, d = d, p / q
            else:
                d = e = xm
        else:
            d = e = xm
        a, fa = b, fb
        b = b + d if abs(d) > tol1 else b + (tol1 if xm > 0 else -tol1)
        fb = f(b)
    raise AccuracyError("brent_root exceeded iteration cap", best=b)


@with_precision
def central_derivative(f: Callable, x, h=None, tol=None) -> mpf:
    """First derivative by central differences with one Richardson step (h, h/2)."""
    x = to_mpf(x)
    h = mpf(10) ** (-(mp.dps // 3)) * max(1, abs(x)) if h is None else to_mpf(h)
    tol = mpf(10) ** (-(mp.dps // 2)) if tol is None else to_mpf(tol)
    d1 = (f(x + h) - f(x - h)) / (2 * h)
    h2 = h / 2
    d2 = (f(x + h2) - f(x - h2)) / (2 * h2)
    rich = (4 * d2 - d1) / 3
    err = abs(rich - d2)
    if err > tol * max(1, abs(rich)):
        warnings.warn(
            f"central_derivative error estimate {mpmath.nstr(err, 3)} above tolerance", AccuracyWarning, stacklevel=2
        )
    return rich
