"""Exact finite-size random-matrix quantities.

JUE largest-eigenvalue distribution through the Andreief moment
determinant, TUE normalisation and characteristic-polynomial moments,
CUE averages through their Schur expansion, the Selberg and Morris
products, and the transposition identities between Jacobi-type and
circular Schur averages.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
from mpmath import mp, mpf

from .combinatorics import Box, Partition, conjugate, hyp_coeff, partitions_in_box, schur_at_ones
from .errors import AccuracyError, CapacityError, DomainError
from .numerics import (
    DEFAULT_DPS,
    bareiss_det,
    incomplete_beta,
    log_barnes_g,
    lu_logdet,
    to_mpf,
    with_precision,
    _is_integer,
)

#: largest box (as a partition count) the exact Schur routes accept: a 12 x 12 box
EXACT_BOX_CAP = math.comb(24, 12)


class Route(str, enum.Enum):
    SCHUR_SUM = "SchurSum"
    JUE_DETERMINANT = "JueDeterminant"
    MEIXNER_DETERMINANT = "MeixnerDeterminant"


@dataclass(frozen=True)
class ExactValue:
    value: object  # Fraction when certified_exact, mpf otherwise
    route: Route
    certified_exact: bool

    def as_mpf(self, dps: int = DEFAULT_DPS) -> mpf:
        with mp.workdps(dps):
            return to_mpf(self.value)

    def log(self, dps: int = DEFAULT_DPS) -> mpf:
        with mp.workdps(dps):
            return mpmath.log(to_mpf(self.value))


@dataclass(frozen=True)
class JueParams:
    n: int
    lam1: object
    lam2: object

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"JUE size must be a positive integer, got {self.n}")
        if to_mpf(self.lam1) <= -1 or to_mpf(self.lam2) <= -1:
            raise DomainError("JUE parameters must exceed -1")

    @property
    def integer_mode(self) -> bool:
        return _is_integer(self.lam1) and _is_integer(self.lam2)


@dataclass(frozen=True)
class TueParams:
    N: int
    M: int
    radius: object = 0
    moment_order: int = 1

    def __post_init__(self):
        if self.N < 1 or self.M < self.N + 1:
            raise DomainError("TUE needs M >= N + 1 >= 2")
        if not 0 <= to_mpf(self.radius) < 1:
            raise DomainError("TUE radius must lie in [0, 1)")


@dataclass(frozen=True)
class MomentMatrix:
    """Hankel matrix stored by its anti-diagonal values."""

    antidiagonal: tuple
    provenance: str = ""

    @property
    def size(self) -> int:
        return (len(self.antidiagonal) + 1) // 2

    def rows(self) -> list[list]:
        n = self.size
        return [[self.antidiagonal[j + k] for k in range(n)] for j in range(n)]


def _check_box(m: int, ell: int):
    box = Box(m, ell)
    if box.count > EXACT_BOX_CAP:
        raise CapacityError(
            f"box ({m}, {ell}) holds {box.count} partitions, above the exact cap {EXACT_BOX_CAP}; "
            "use the JUE determinant route"
        )
    return box


def _exact_input(*vals) -> bool:
    return all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in vals)


# ---------------------------------------------------------------------------
# JUE


def jue_moment_matrix(p: JueParams, x, *, dps: int | None = None) -> MomentMatrix:
    """Andreief matrix M(x)_{jk} = int_0^x s^{lam1+j+k} (1-s)^{lam2} ds."""
    n = p.n
    if p.integer_mode and _exact_input(x):
        l1, l2 = int(p.lam1), int(p.lam2)
        vals = tuple(incomplete_beta(Fraction(x), l1 + s + 1, l2 + 1) for s in range(2 * n - 1))
    else:
        with mp.workdps(dps or DEFAULT_DPS):
            l1, l2, xx = to_mpf(p.lam1), to_mpf(p.lam2), to_mpf(x)
            vals = tuple(mpmath.betainc(l1 + s + 1, l2 + 1, 0, xx) for s in range(2 * n - 1))
    return MomentMatrix(vals, provenance=f"jacobi weight lam1={p.lam1} lam2={p.lam2} on [0,{x}]")


def jue_cdf_max(p: JueParams, x, *, dps: int | None = None) -> ExactValue:
    """P(largest JUE eigenvalue <= x) as det M(x) / det M(1)."""
    if to_mpf(x) < 0 or to_mpf(x) > 1:
        raise DomainError(f"jue_cdf_max needs 0 <= x <= 1, got {x}")
    if x == 0:
        return ExactValue(Fraction(0), Route.JUE_DETERMINANT, True)
    if x == 1:
        return ExactValue(Fraction(1), Route.JUE_DETERMINANT, True)
    num = jue_moment_matrix(p, x, dps=dps)
    den = jue_moment_matrix(p, 1 if _exact_input(x) else mpf(1), dps=dps)
    if p.integer_mode and _exact_input(x):
        value = bareiss_det(num.rows()) / bareiss_det(den.rows())
        return ExactValue(value, Route.JUE_DETERMINANT, True)
    dps = dps or DEFAULT_DPS
    with mp.workdps(dps):
        s1, l1 = lu_logdet(num.rows(), dps=dps)
        s2, l2 = lu_logdet(den.rows(), dps=dps)
        if s1 <= 0 or s2 <= 0:
            raise AccuracyError(f"moment determinant lost positivity at {dps} digits; raise the precision")
        value = mpmath.exp(l1 - l2)
    return ExactValue(value, Route.JUE_DETERMINANT, False)


@with_precision
def jue_log_partition(p: JueParams, form: str = "gamma") -> mpf:
    """log Z_n(lam1, lam2), the Selberg normalisation of the JUE density."""
    n, l1, l2 = p.n, to_mpf(p.lam1), to_mpf(p.lam2)
    if form == "gamma":
        return mpmath.fsum(
            mpmath.loggamma(j + 2) + mpmath.loggamma(l1 + 1 + j) + mpmath.loggamma(l2 + 1 + j)
            - mpmath.loggamma(l1 + l2 + 1 + n + j)
            for j in range(n)
        )
    if form == "barnes":
        g = lambda v: log_barnes_g(v, dps=mp.dps)
        return (
            g(n + 2) + g(l1 + n + 1) - g(l1 + 1) + g(l2 + n + 1) - g(l2 + 1)
            + g(l1 + l2 + n + 1) - g(l1 + l2 + 2 * n + 1)
        )
    raise DomainError(f"unknown form {form!r}")


def jue_partition_exact(p: JueParams) -> Fraction:
    """Z_n(lam1, lam2) as an exact rational in integer mode."""
    if not p.integer_mode:
        raise DomainError("exact JUE partition function needs integer parameters")
    n, l1, l2 = p.n, int(p.lam1), int(p.lam2)
    out = Fraction(1)
    for j in range(n):
        out *= Fraction(
            math.factorial(j + 1) * math.factorial(l1 + j) * math.factorial(l2 + j),
            math.factorial(l1 + l2 + n + j),
        )
    return out


# ---------------------------------------------------------------------------
# TUE / CUE


@with_precision
def tue_log_partition(N: int, M: int, form: str = "gamma") -> mpf:
    """log Z^trunc_{N,M} of the truncated unitary eigenvalue density."""
    if not (M > N >= 1):
        raise DomainError("tue_log_partition needs M > N >= 1")
    s = M - N
    if form == "gamma":
        return mpmath.loggamma(N + 1) + mpmath.fsum(
            mpmath.loggamma(k + 1) + mpmath.loggamma(s) - mpmath.loggamma(s + k + 1) for k in range(N)
        )
    if form == "barnes":
        g = lambda v: log_barnes_g(v, dps=mp.dps)
        return mpmath.loggamma(N + 1) + N * mpmath.loggamma(s) + g(N + 1) + g(s + 1) - g(M + 1)
    raise DomainError(f"unknown form {form!r}")


def lpp_tue_constant(ell: int, n: int, m: int) -> Fraction:
    """c_{ell,n,m} = prod_j (ell+n-m+j-1)! (j-1)! / ((n-m+j-1)! (ell+j-1)!)."""
    if n < m:
        raise DomainError("lpp_tue_constant needs n >= m")
    f = math.factorial
    out = Fraction(1)
    for j in range(1, m + 1):
        out *= Fraction(f(ell + n - m + j - 1) * f(j - 1), f(n - m + j - 1) * f(ell + j - 1))
    return out


@with_precision
def lpp_tue_constant_log_barnes(ell: int, n: int, m: int) -> mpf:
    g = lambda v: log_barnes_g(v, dps=mp.dps)
    return (
        g(ell + 1) + g(m + 1) + g(ell + n + 1) + g(n - m + 1)
        - g(ell + m + 1) - g(ell + n - m + 1) - g(n + 1)
    )


def _power_sum(terms, exact: bool):
    if exact:
        return sum(terms, Fraction(0))
    return mpmath.fsum(terms)


def schur_pair_sum(n: int, m: int, ell: int, q2, *, dps: int | None = None):
    """sum over lambda in the (m, ell) box of s_lambda(1_n) s_lambda(1_m) q2^|lambda|."""
    box = _check_box(m, ell)
    exact = _exact_input(q2)
    with mp.workdps(dps or DEFAULT_DPS):
        base = Fraction(q2) if exact else to_mpf(q2)
        terms = (
            schur_at_ones(lam, n) * schur_at_ones(lam, m) * base ** lam.weight
            for lam in partitions_in_box(box)
        )
        return _power_sum(terms, exact)


def cue_average(ell: int, n: int, m: int, q2, *, dps: int | None = None) -> ExactValue:
    """E det(1+U)^n det(1+q2 U^dagger)^m over ell x ell Haar unitaries, via Schur functions."""
    value = schur_pair_sum(n, m, ell, q2, dps=dps)
    return ExactValue(value, Route.SCHUR_SUM, _exact_input(q2))


def tue_char_moment(ell: int, n: int, m: int, q2, *, dps: int | None = None) -> ExactValue:
    """E |det(T - q)|^{2m} for T the ell x ell truncation of an (ell+n-m)-dim Haar unitary.

    Only q^2 enters, so the argument is ``q2``; a Fraction keeps the
    result exact.
    """
    if not (n >= m >= 1) or ell < 0:
        raise DomainError("tue_char_moment needs n >= m >= 1 and ell >= 0")
    box = _check_box(m, ell)
    exact = _exact_input(q2)
    f = math.factorial
    with mp.workdps(dps or DEFAULT_DPS):
        base = Fraction(q2) if exact else to_mpf(q2)
        pref = Fraction(1)
        for j in range(1, m + 1):
            pref *= Fraction(f(ell + j - 1), f(ell + n - m + j - 1))
        terms = []
        for lam in partitions_in_box(box):
            ratio = 1
            for j in range(1, m + 1):
                lj = lam.part(j)
                ratio *= Fraction(f(lj + n - j), f(lj + m - j))
            terms.append(schur_at_ones(lam, m) ** 2 * ratio * base ** lam.weight)
        if exact:
            value = pref * sum(terms, Fraction(0))
        else:
            value = to_mpf(pref) * mpmath.fsum(to_mpf(t) if isinstance(t, Fraction) else t for t in terms)
    return ExactValue(value, Route.SCHUR_SUM, exact)


# ---------------------------------------------------------------------------
# Selberg / Morris


@with_precision
def selberg(N: int, alpha, beta) -> mpf:
    a, b = to_mpf(alpha), to_mpf(beta)
    if a <= -1 or b <= -1:
        raise DomainError("Selberg integral needs alpha, beta > -1")
    out = mpf(1)
    for j in range(N):
        out *= mpmath.gamma(a + j + 1) * mpmath.gamma(b + j + 1) * mpmath.gamma(j + 2) * mpmath.rgamma(
            a + b + N + j + 1
        )
    return out


@with_precision
def morris(N: int, alpha, beta) -> mpf:
    a, b = to_mpf(alpha), to_mpf(beta)
    if a + b <= -1:
        raise DomainError("Morris integral needs alpha + beta > -1")
    out = (2 * mpmath.pi) ** N
    for j in range(N):
        out *= mpmath.gamma(a + b + j + 1) * mpmath.gamma(j + 2) * mpmath.rgamma(a + j + 1) * mpmath.rgamma(b + j + 1)
    return out


@with_precision
def log_selberg(N: int, alpha, beta) -> mpf:
    return mpmath.log(selberg(N, alpha, beta, dps=mp.dps))


@with_precision
def log_morris(N: int, alpha, beta) -> mpf:
    value = morris(N, alpha, beta, dps=mp.dps)
    if value <= 0:
        raise DomainError("Morris product is not positive at these parameters; log undefined")
    return mpmath.log(value)


# ---------------------------------------------------------------------------
# identity campaign


@dataclass
class IdentityCheck:
    name: str
    anchor: str
    passed: bool
    max_deviation: float
    detail: str = ""


def _random_rational(rng: random.Random, lo: float, span: float) -> Fraction:
    """Non-integer rational in (lo, lo + span) with denominator in 2..7."""
    while True:
        den = rng.randint(2, 7)
        num = rng.randint(math.ceil(lo * den) + 1, math.floor((lo + span) * den) - 1)
        v = Fraction(num, den)
        if v.denominator != 1:
            return v


def dual_summands(m: int, N: int, eta1, eta2, t):
    """Term families of the two Schur expansions of the JUE/CUE duality.

    Returns dicts keyed by partition: the Jacobi-side family indexed by
    the (m, N) box and the circular-side family indexed by the (N, m) box.
    """
    jac, circ = {}, {}
    for lam in partitions_in_box(Box(m, N)):
        jac[lam] = (
            (-t) ** lam.weight * schur_at_ones(conjugate(lam), N) * schur_at_ones(lam, m)
            * hyp_coeff(eta2, lam) / hyp_coeff(-eta1 - N, lam)
        )
    for mu in partitions_in_box(Box(N, m)):
        muc = conjugate(mu)
        circ[mu] = (
            (-t) ** mu.weight * schur_at_ones(muc, m) * schur_at_ones(mu, N)
            * hyp_coeff(eta2, muc) / hyp_coeff(-eta1 - N, muc)
        )
    return jac, circ


def verify_schur_identities(
    max_box: int = 4,
    max_size: int = 6,
    samples: int = 3,
    seed: int = 20240601,
    tol: float = 1e-10,
    dps: int = DEFAULT_DPS,
) -> list[IdentityCheck]:
    """Check the Schur-expansion identities linking Jacobi and circular averages."""
    rng = random.Random(seed)
    checks: list[IdentityCheck] = []

    # transposition of the hypergeometric coefficient
    worst = Fraction(0)
    ok = True
    for _ in range(samples):
        u = _random_rational(rng, -5, 10)
        for lam in partitions_in_box(Box(max_box, max_box)):
            lhs = hyp_coeff(-u, lam)
            rhs = (-1) ** lam.weight * hyp_coeff(u, conjugate(lam))
            if lhs != rhs:
                ok = False
                worst = max(worst, abs(lhs - rhs))
    checks.append(IdentityCheck("hyp_coeff_transposition", "[-u]_lam = (-1)^|lam| [u]_lam'", ok, float(worst)))

    # term-by-term equality of the two summand families under lam <-> lam'
    ok = True
    mismatches = 0
    for m in range(1, max_box + 1):
        for N in range(1, max_box + 1):
            eta2 = m - 1 + _random_rational(rng, 0, 4)
            eta1 = _random_rational(rng, -1, 5)
            t = _random_rational(rng, -2, 4)
            jac, circ = dual_summands(m, N, eta1, eta2, t)
            for lam, term in jac.items():
                if circ[conjugate(lam)] != term:
                    ok = False
                    mismatches += 1
            if sum(jac.values()) != sum(circ.values()):
                ok = False
    checks.append(
        IdentityCheck("dual_summand_transposition", "Jacobi vs circular Schur sums", ok, float(mismatches))
    )

    with mp.workdps(dps):
        worst = mpf(0)
        for m in range(1, max_size + 1):
            for N in range(1, max_size + 1):
                for _ in range(samples):
                    eta2 = m - 1 + _random_rational(rng, 0, 4)
                    eta1 = _random_rational(rng, -1, 5)
                    e1, e2 = to_mpf(eta1), to_mpf(eta2)
                    lhs = selberg(m, e2 - m, e1 + N, dps=dps) / selberg(m, e2 - m, e1, dps=dps)
                    rhs = morris(m, e1 + e2 + N, -e2, dps=dps) / morris(m, e1 + e2, -e2, dps=dps)
                    worst = max(worst, abs(lhs / rhs - 1))
        checks.append(
            IdentityCheck("morris_selberg_t0", "Selberg ratio = Morris ratio (t=0)", worst < tol, float(worst))
        )

        worst = mpf(0)
        for m in range(1, max_size + 1):
            for N in range(1, max_size + 1):
                for _ in range(samples):
                    eta2 = m - 1 + _random_rational(rng, 0, 4)
                    eta1 = _random_rational(rng, -1, 5)
                    e1, e2 = to_mpf(eta1), to_mpf(eta2)
                    lhs = selberg(m, e2 - m, e1, dps=dps) / selberg(m, e2 - m, e1 + N, dps=dps)
                    rhs = morris(N, e1 + m, e2, dps=dps) / morris(N, e1, e2, dps=dps)
                    worst = max(worst, abs(lhs / rhs - 1))
        checks.append(IdentityCheck("morris_selberg_t1", "Selberg ratio = Morris ratio (t=1)", worst < tol, float(worst)))
    return checks
