"""Large-deviation expansions for LPP tails, TUE moments and JUE edge probabilities.

Every expansion is returned as an :class:`Expansion`, the four numbers
(c2, c1, clog, c0) of  c2 N^2 + c1 N + clog log N + c0.  Probabilities and
moments are therefore always handled in log form.

The second half of the module evaluates the general Hankel-determinant
coefficients by quadrature against equilibrium densities, together with
the closed-form integrals used to simplify them, so that the closed-form
expansions can be rebuilt from first principles.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable

import mpmath
from mpmath import mp, mpf

from .equilibrium import HALF, constrained_density, edges, solve_mfrak, solve_mfrak_d
from .errors import DomainError, RegimeError
from .lpp import omega
from .numerics import (
    QuadratureRule,
    central_derivative,
    gauss_jacobi_integrate,
    log_barnes_g,
    to_mpf,
    with_precision,
    zeta_prime_minus_one,
)


class Regime(str, enum.Enum):
    LOWER_SQUARE = "LowerSquare"
    LOWER_RECT = "LowerRect"
    UPPER = "Upper"
    TUE_POST_WEAK = "TuePostWeak"
    TUE_PRE_WEAK = "TuePreWeak"
    TUE_POST_STRONG = "TuePostStrong"
    TUE_PRE_STRONG = "TuePreStrong"
    JUE_PULLED = "JuePulled"
    JUE_PUSHED = "JuePushed"
    PARTITION = "Partition"


@dataclass(frozen=True)
class Expansion:
    c2: mpf
    c1: mpf
    clog: mpf
    c0: mpf
    regime: Regime
    remainder_note: str = ""

    def evaluate(self, N) -> mpf:
        N = to_mpf(N)
        return self.c2 * N * N + self.c1 * N + self.clog * mpmath.log(N) + self.c0

    def __sub__(self, other: "Expansion") -> "Expansion":
        return Expansion(
            self.c2 - other.c2,
            self.c1 - other.c1,
            self.clog - other.clog,
            self.c0 - other.c0,
            self.regime,
            self.remainder_note,
        )

    def as_tuple(self) -> tuple:
        return (self.c2, self.c1, self.clog, self.c0)


@dataclass(frozen=True)
class RateFunctionPoint:
    x: mpf
    value: mpf
    derivative_x: mpf | None
    derivative_gamma_total: mpf | None


def _q_check(q):
    q = to_mpf(q)
    if not 0 < q < 1:
        raise DomainError(f"q must lie in (0, 1), got {q}")
    return q


# ---------------------------------------------------------------------------
# lower tails


@with_precision
def lower_tail_square(q, delta, nshift=0, *, check_regime: bool = True) -> Expansion:
    """log P[G_{N+n, N} <= delta N] for bounded shift n."""
    q, dl, n = _q_check(q), to_mpf(delta), to_mpf(nshift)
    if dl <= 0:
        raise DomainError("delta must be positive")
    if check_regime and dl >= omega(1, q, dps=mp.dps):
        raise RegimeError("lower tail needs delta < omega(1, q)")
    log = mpmath.log
    L1 = (
        log((1 - q) / 2)
        + (1 + dl) ** 2 * log((1 + q) / 2)
        - dl**2 / 2 * log(q)
        - (1 + dl) ** 2 * log(1 + dl)
        + (dl**2 / 2 * log(dl) if dl else 0)
        + (2 + dl) ** 2 / 2 * log(2 + dl)
    )
    L2 = n * (log((1 - q * q) / 4) - dl * log(2 / (1 + q)) - (1 + dl) * log(1 + dl) + (2 + dl) * log(2 + dl))
    L4 = (
        zeta_prime_minus_one(dps=mp.dps)
        + log(2 * (1 + dl) ** 2 / (dl * (2 + dl))) / 12
        - log((2 * q + dl * q - dl) * (2 + dl - dl * q) / (4 * q)) / 8
        + n**2 / 2 * log((2 + dl - dl * q) * (2 + dl) / (4 * (1 + dl)))
    )
    return Expansion(L1, L2, mpf(-1) / 12, L4, Regime.LOWER_SQUARE, "O(log N / N)")


@with_precision
def lower_tail_rect(q, gamma, delta, nshift=0, *, mfrak=None) -> Expansion:
    """log P[G_{gamma N + n, N} <= delta N] for gamma > 1."""
    q, g, dl, n = _q_check(q), to_mpf(gamma), to_mpf(delta), to_mpf(nshift)
    if g <= 1:
        raise DomainError("lower_tail_rect needs gamma > 1")
    if dl <= 0:
        raise DomainError("delta must be positive")
    if dl >= omega(g, q, dps=mp.dps):
        raise RegimeError("lower tail needs delta < omega(gamma, q)")
    m = solve_mfrak(g, dl, q, dps=mp.dps) if mfrak is None else to_mpf(mfrak)
    log, sqrt = mpmath.log, mpmath.sqrt
    d = 1 - q * q
    sm, sd, s1m = sqrt(m), sqrt(d), sqrt(1 - m)
    mix = sqrt(m * q * q) + sqrt(d * (1 - m))
    s = 1 + g + dl
    L1 = (
        log((d - m) / 4)
        + s * ((g - 1) * log((sm + sd) / 2) + dl * log((s1m + q) / 2))
        - (g - 1) * dl * log(mix / 2)
        - g**2 / 2 * log(g)
        - (1 + dl) ** 2 / 2 * log(1 + dl)
        - (g + dl) ** 2 / 2 * log(g + dl)
        + (g - 1) ** 2 / 4 * log((g - 1) ** 2 / (m * d))
        + dl**2 / 4 * log(dl**2 / ((1 - m) * q * q))
        + s**2 / 2 * log(s)
    )
    L2 = n * (
        s * log((sm + sd) / 2)
        + (g - 1) * log((sm + sd) / (2 * sqrt(m * d)))
        - dl * log(mix / (s1m + q))
        - g * log(g)
        - (g + dl) * log(g + dl)
        + (2 + dl) * log(s)
        + (g - 1) * log((g - 1) * s)
    )
    L4 = (
        zeta_prime_minus_one(dps=mp.dps)
        - log((d - m) / 4) / 6
        - log((g - 1) / sqrt(m * d) - dl / sqrt((1 - m) * q * q)) / 8
        - log((g - 1) * sd / m**1.5 - dl * q / (1 - m) ** 1.5) / 24
        - log((g - 1) * dl * s / (g * (1 + dl) * (g + dl))) / 12
        + n**2 / 2 * log((sm + sd) ** 2 / (4 * sd) * (g - 1) / sm * s / (g * (g + dl)))
    )
    return Expansion(L1, L2, mpf(-1) / 12, L4, Regime.LOWER_RECT, "O(log N / N)")


@with_precision
def two_point_action(alpha, beta, x, y) -> mpf:
    """The two-point action S(x, y) whose difference gives the leading lower-tail rate."""
    al, be, x, y = to_mpf(alpha), to_mpf(beta), to_mpf(x), to_mpf(y)
    log, sqrt = mpmath.log, mpmath.sqrt
    return (
        -log((y - x) / 4)
        + al * be * log((sqrt(x * (1 - y)) + sqrt(y * (1 - x))) / 2)
        + al**2 / 4 * log(x * y)
        + be**2 / 4 * log((1 - x) * (1 - y))
        - (2 + al + be) * (al * log((sqrt(x) + sqrt(y)) / 2) + be * log((sqrt(1 - x) + sqrt(1 - y)) / 2))
    )


# ---------------------------------------------------------------------------
# upper tail


def _phi_raw(g, dl, x):
    e = edges(g, dl, dps=mp.dps)
    a, b = e.a, e.b
    log, sqrt = mpmath.log, mpmath.sqrt
    r = sqrt((x - b) * (x - a))
    return (
        -log((2 * x - a - b + 2 * r) / (b - a))
        + (g - 1) * log((sqrt(a * b) + x - r) / ((sqrt(a) + sqrt(b)) * sqrt(x)))
        + dl * log((sqrt((1 - a) * (1 - b)) - x + 1 + r) / ((sqrt(1 - a) + sqrt(1 - b)) * sqrt(1 - x)))
    )


@with_precision
def phi_value(gamma, delta, x) -> mpf:
    """Upper-tail rate function Phi_{gamma,delta}(x) for b <= x < 1."""
    g, dl, x = to_mpf(gamma), to_mpf(delta), to_mpf(x)
    if g < 1 or dl <= 0:
        raise DomainError("phi needs gamma >= 1 and delta > 0")
    b = edges(g, dl, dps=mp.dps).b
    if x < b or x >= 1:
        raise DomainError(f"phi needs b <= x < 1 (b = {mpmath.nstr(b, 15)}), got {mpmath.nstr(x, 15)}")
    return _phi_raw(g, dl, x)


@with_precision
def phi(gamma, delta, x) -> RateFunctionPoint:
    """Phi with its x-derivative and total gamma-derivative (Richardson central differences).

    At gamma = 1 the gamma-derivative is the right derivative.

    Derivatives are omitted (None) when x sits too close to the edge b for
    a symmetric stencil.
    """
    g, dl, x = to_mpf(gamma), to_mpf(delta), to_mpf(x)
    value = phi_value(g, dl, x, dps=mp.dps)
    b = edges(g, dl, dps=mp.dps).b
    h = mpf(10) ** (-(mp.dps // 3)) * max(1, abs(x))
    dx = dg = None
    if x - 2 * h > b and x + 2 * h < 1:
        dx = central_derivative(lambda y: _phi_raw(g, dl, y), x, dps=mp.dps)
    hg = mpf(10) ** (-(mp.dps // 3)) * max(1, g)
    if edges(g + 2 * hg, dl, dps=mp.dps).b < x:
        if g - 2 * hg >= 1:
            dg = central_derivative(lambda gg: _phi_raw(gg, dl, x), g, dps=mp.dps)
        else:
            # sqrt(a) has a kink at gamma = 1, so only the right derivative exists
            dg = mpmath.diff(lambda gg: _phi_raw(gg, dl, x), g, direction=1)
    return RateFunctionPoint(x, value, dx, dg)


@with_precision
def phi_delta_derivative(gamma, delta, x) -> mpf:
    """Total delta-derivative of Phi_{gamma,delta}(x) (edges move with delta)."""
    g, dl, x = to_mpf(gamma), to_mpf(delta), to_mpf(x)
    return central_derivative(lambda dd: _phi_raw(g, dd, x), dl, dps=mp.dps)


@with_precision
def upper_tail(q, gamma, delta, nshift=0, *, strict_inequality: bool = False) -> Expansion:
    """log P[G_{gamma N + n, N} >= delta N] (or > delta N when strict_inequality).

    The JUE edge asymptotics with lambda2 = delta N describe the event
    G > delta N.  The event G >= delta N is the same event with delta N
    replaced by delta N - 1, which moves delta by -1/N and so adds
    2 dPhi/ddelta to the constant term.
    """
    q, g, dl, n = _q_check(q), to_mpf(gamma), to_mpf(delta), to_mpf(nshift)
    if g < 1:
        raise DomainError("upper_tail needs gamma >= 1")
    if dl <= omega(g, q, dps=mp.dps):
        raise RegimeError("upper tail needs delta > omega(gamma, q)")
    x = 1 - q * q
    e = edges(g, dl, dps=mp.dps)
    a, b = e.a, e.b
    pt = phi(g, dl, x, dps=mp.dps)
    prod = (x - a) * (x - b)
    if prod <= 0:
        raise RegimeError("edge product (1-q^2-a)(1-q^2-b) is not positive; parameters are not in the pulled regime")
    U1 = -2 * pt.value
    U3 = mpmath.log((b - a) / (8 * mpmath.pi) / prod / (2 * pt.derivative_x))
    if n:
        U3 -= 2 * n * pt.derivative_gamma_total
    if not strict_inequality:
        U3 += 2 * phi_delta_derivative(g, dl, x, dps=mp.dps)
    return Expansion(mpf(0), U1, mpf(-1), U3, Regime.UPPER, "o(1)")


@with_precision
def edge_log_integral(x, B) -> mpf:
    """Closed form of int_1^x (x - y) / (sqrt(y^2 - 1) (y + B)) dy for x >= 1, |B| >= 1."""
    x, B = to_mpf(x), to_mpf(B)
    if x < 1:
        raise DomainError("edge_log_integral needs x >= 1")
    if abs(B) < 1:
        raise DomainError("edge_log_integral needs |B| >= 1")
    log, sqrt = mpmath.log, mpmath.sqrt
    r = sqrt(x * x - 1)
    first = (B + x) / sqrt(B * B - 1) * log((1 + B * x + sqrt((B * B - 1) * (x * x - 1))) / (B + x))
    return first + log((x - r) / (x + r)) / 2


@with_precision
def edge_log_integral_quadrature(x, B) -> mpf:
    """Direct numerical integral matching :func:`edge_log_integral` (substitution y = cosh u)."""
    x, B = to_mpf(x), to_mpf(B)
    U = mpmath.acosh(x)
    return mpmath.quad(lambda u: (x - mpmath.cosh(u)) / (mpmath.cosh(u) + B), [0, U])


@with_precision
def upper_rate_closed_form(t, gamma, q) -> mpf:
    g, q, t = to_mpf(gamma), _q_check(q), to_mpf(t)
    sg = mpmath.sqrt(g)
    sa = (1 - q * sg) ** 2 / (1 - q * q)
    sb = (1 + q * sg) ** 2 / (1 - q * q)
    x = 2 * (t - sa) / (sb - sa) - 1
    if x < 1:
        raise DomainError("upper_rate_closed_form needs t >= b")
    B = (g + q * q) / (2 * q * sg)
    D = (1 + q * q * g) / (2 * q * sg)
    I = lambda c: edge_log_integral(x, c, dps=mp.dps)
    return (sb - sa) / (8 * q * sg) * ((g - q * q) * I(B) + (1 - q * q * g) * I(D))


# ---------------------------------------------------------------------------
# TUE moments


def _pick_regime(value, critical, regime: str, pre_name: str, post_name: str):
    if value == critical:
        raise RegimeError("|z| lies on the critical circle; no expansion applies")
    auto = "pre" if value > critical else "post"
    if regime == "auto":
        return auto
    if regime not in ("pre", "post"):
        raise DomainError(f"regime must be 'pre', 'post' or 'auto', got {regime!r}")
    if regime != auto:
        raise RegimeError(f"requested {regime}-critical expansion but |z| is in the {auto}-critical regime")
    return regime


@with_precision
def tue_weak_expansion(c, z, s: int, regime: str = "auto") -> Expansion:
    """log E|det(T_{N,N+s} - z)|^{2cN}.

    The constant c0 carries the full log prefactor (including zeta'(-1)
    in the pre-critical regime) and clog the power of N.
    """
    c, z = to_mpf(c), to_mpf(abs(z))
    if c <= 0 or not 0 < z < 1:
        raise DomainError("tue_weak_expansion needs c > 0 and 0 < |z| < 1")
    if int(s) != s or s < 0:
        raise DomainError("s = M - N must be a non-negative integer")
    s = int(s)
    log = mpmath.log
    crit = 1 / (2 * c + 1)
    which = _pick_regime(z, crit, regime, "pre", "post")
    H0 = -(c**2) * log(1 - z * z)
    H1 = s * (-c * log(1 - z * z) + c * log(c) - (c + 1) * log(c + 1))
    logG = s**2 / 2 * log(c / (c + 1)) + s / 2 * log(2 * mpmath.pi) - log_barnes_g(s + 1, dps=mp.dps)
    if which == "post":
        return Expansion(H0, H1, mpf(s**2) / 2, logG, Regime.TUE_POST_WEAK, "sum d_k N^-k + O(e^{-eps N})")
    L = lower_tail_square(z, 1 / c, s, dps=mp.dps)
    logG_pre = (
        logG
        - log((1 + 2 * c - 1 / z) * (1 + 2 * c - z) / (4 * c**2)) / 8
        + s**2 / 2 * log((1 + 2 * c - z) * (1 + 2 * c) / (4 * c * (1 + c)))
        + log(2 * (1 + c) ** 2 / (c * (1 + 2 * c))) / 12
    )
    c0 = zeta_prime_minus_one(dps=mp.dps) + logG_pre
    return Expansion(H0 + c**2 * L.c2, H1 + c * L.c1, mpf(s**2) / 2 - mpf(1) / 12, c0, Regime.TUE_PRE_WEAK, "O(1/N)")


@with_precision
def tue_strong_critical_radius(c, rho) -> mpf:
    c, rho = to_mpf(c), to_mpf(rho)
    return (mpmath.sqrt((rho + c + 1) * (c + 1)) - mpmath.sqrt((rho + c) * c)) / (rho + 2 * c + 1)


def _xlogx_ratio(u, v):
    """log(u^{u^2} / v^{v^2}) with 0 log 0 = 0."""
    f = lambda w: w * w * mpmath.log(w) if w else mpf(0)
    return f(u) - f(v)


@with_precision
def tue_strong_expansion(c, rho, z, t=0, regime: str = "auto") -> Expansion:
    """log E|det(sqrt(1+rho) T_{N,M} - z)|^{2cN} with M = (1+rho)N + t."""
    c, rho, z, t = to_mpf(c), to_mpf(rho), to_mpf(abs(z)), to_mpf(t)
    if c <= 0 or rho <= 0:
        raise DomainError("tue_strong_expansion needs c > 0 and rho > 0")
    qq = z / mpmath.sqrt(1 + rho)
    if not 0 < qq < 1:
        raise DomainError("need 0 < |z| / sqrt(1 + rho) < 1")
    log = mpmath.log
    which = _pick_regime(qq, tue_strong_critical_radius(c, rho, dps=mp.dps), regime, "pre", "post")
    lz = log(1 - qq * qq)
    H0 = (
        -c * (rho + c) * lz
        + c * log(1 + rho)
        + (_xlogx_ratio(c + 1, c) + _xlogx_ratio(rho + 1, rho) - _xlogx_ratio(c + rho + 1, c + rho)) / 2
    )
    H1 = -t * (
        c * lz
        + rho * log(rho) - (rho + 1) * log(rho + 1)
        - ((rho + c) * log(rho + c) - (rho + c + 1) * log(rho + c + 1))
    )
    e = (6 * t * t - 1) / 12
    # Barnes-G asymptotics of the duality constant give exactly these two factors
    logG = log(c / (c + 1)) / 12 + e * log((rho + 1) * (rho + c) / (rho * (rho + c + 1)))
    zp = zeta_prime_minus_one(dps=mp.dps)
    if which == "post":
        return Expansion(H0, H1, mpf(1) / 12, logG - zp, Regime.TUE_POST_STRONG, "sum b_k N^-k + O(e^{-eps N})")
    L = lower_tail_rect(qq, rho / c + 1, 1 / c, t, dps=mp.dps)
    # the post-critical N^{1/12} e^{-zeta'(-1)} cancels against the L3 log(cN) and zeta'(-1) in L4
    c0 = logG - zp - log(c) / 12 + L.c0
    return Expansion(H0 + c**2 * L.c2, H1 + c * L.c1, mpf(0), c0, Regime.TUE_PRE_STRONG, "O(1/N)")


# ---------------------------------------------------------------------------
# JUE edge deviations


@with_precision
def jue_ldp(alpha, beta, d, t=None) -> Expansion:
    """Edge large deviations of the JUE largest eigenvalue.

    With ``t=None`` the exponents are (alpha, beta n) for fixed alpha > -1
    (hard left edge); otherwise they are (alpha n + t, beta n) with alpha > 0
    (two soft edges).  For d > b the expansion is of log P(x_max > d), for
    d < b of log P(x_max < d).
    """
    al, be, d = to_mpf(alpha), to_mpf(beta), to_mpf(d)
    if be <= 0 or not 0 < d < 1:
        raise DomainError("jue_ldp needs beta > 0 and 0 < d < 1")
    if t is None:
        if al <= -1:
            raise DomainError("alpha must exceed -1")
        g, shift = mpf(1), al
    else:
        if al <= 0:
            raise DomainError("two soft edges need alpha > 0")
        g, shift = al + 1, to_mpf(t)
    q = mpmath.sqrt(1 - d)
    b = edges(g, be, dps=mp.dps).b
    if d == b:
        raise RegimeError("d equals the equilibrium edge b")
    if d > b:
        U = upper_tail(q, g, be, shift, strict_inequality=True, dps=mp.dps)
        return replace(U, regime=Regime.JUE_PULLED)
    if t is None:
        L = lower_tail_square(q, be, shift, dps=mp.dps)
    else:
        L = lower_tail_rect(q, g, be, shift, dps=mp.dps)
    return replace(L, regime=Regime.JUE_PUSHED)


# ---------------------------------------------------------------------------
# Hankel determinant coefficients


def _hilbert_pv(gfun: Callable, a, b, x, tol) -> mpf:
    """PV int_a^b g(y) sqrt((b-y)(y-a)) / (x-y) dy by subtracting g(x)."""
    gx = gfun(x)
    near = mpf(10) ** (-(mp.dps // 3))
    taylor = []

    def smooth(y):
        h = y - x
        if abs(h) < near:
            # a node next to x: the difference quotient would cancel, so expand g
            if not taylor:
                taylor.extend(mpmath.diff(gfun, x, k) for k in (1, 2, 3))
            return -(taylor[0] + taylor[1] * h / 2 + taylor[2] * h * h / 6)
        return (gfun(y) - gx) / (x - y)

    rule = QuadratureRule(a, b, HALF, HALF, 32)
    regular = gauss_jacobi_integrate(rule, smooth, tol=tol, dps=mp.dps)
    return regular + gx * mpmath.pi * (x - (a + b) / 2)


@with_precision
def pv_inner(Wprime: Callable, a, b, x, tol=None) -> mpf:
    """Principal-value inner integral of the C4 double integral at a single x."""
    tol = mpf(10) ** (-(mp.dps // 2)) if tol is None else to_mpf(tol)
    return _hilbert_pv(Wprime, to_mpf(a), to_mpf(b), to_mpf(x), tol)


def _c4_double(W, Wprime, a, b, inner, tol):
    if inner is None:
        inner = lambda x: _hilbert_pv(Wprime, a, b, x, tol)
    rule = QuadratureRule(a, b, -HALF, -HALF, 32)
    return gauss_jacobi_integrate(rule, lambda x: W(x) * inner(x), tol=tol, dps=mp.dps)


@with_precision
def hankel_coeffs_soft_hard(
    V: Callable, W: Callable, psi: Callable, a, b, *, Wprime: Callable | None = None, inner: Callable | None = None, tol=None
) -> tuple:
    """(C1, C2, C3, C4) for a density psi(x) sqrt((x-a)/(b-x)) with soft edge a and hard edge b.

    The principal value in C4 uses ``inner`` when given (a closed form of
    the inner integral as a function of x); otherwise it is computed by
    singularity subtraction from ``Wprime``.
    """
    a, b = to_mpf(a), to_mpf(b)
    tol = mpf(10) ** (-(mp.dps // 2)) if tol is None else to_mpf(tol)
    pi, log = mpmath.pi, mpmath.log
    soft_hard = QuadratureRule(a, b, HALF, -HALF, 32)
    integrand = lambda x: (V(x) - 4 * (b - x) / (b - a)) * (2 / ((b - a) * pi) + psi(x))
    C1 = log((b - a) / 4) - mpf(3) / 2 - gauss_jacobi_integrate(soft_hard, integrand, tol=tol, dps=mp.dps) / 2
    C2 = log(2 * pi) + gauss_jacobi_integrate(soft_hard, lambda x: W(x) * psi(x), tol=tol, dps=mp.dps)
    C3 = mpf(-1) / 6
    if inner is None and Wprime is None:
        Wprime = lambda x: mpmath.diff(W, x)
    double = _c4_double(W, Wprime, a, b, inner, tol)
    C4 = (
        2 * zeta_prime_minus_one(dps=mp.dps)
        - log((b - a) / 2 * pi * psi(b)) / 8
        - log((b - a) / 2 * pi * psi(a)) / 24
        + double / (4 * pi**2)
    )
    return C1, C2, C3, C4


@with_precision
def hankel_coeffs_two_hard(V: Callable, psi: Callable, a, b, alpha, *, tol=None) -> tuple:
    """(C1, C2, C3, C4) for a density psi(x) / sqrt((b-x)(x-a)) and a Jacobi factor (x-a)^alpha."""
    a, b, al = to_mpf(a), to_mpf(b), to_mpf(alpha)
    tol = mpf(10) ** (-(mp.dps // 2)) if tol is None else to_mpf(tol)
    pi, log = mpmath.pi, mpmath.log
    rule = QuadratureRule(a, b, -HALF, -HALF, 32)
    C1 = log((b - a) / 4) - gauss_jacobi_integrate(rule, lambda x: V(x) * (1 / pi + psi(x)), tol=tol, dps=mp.dps) / 2
    C2 = (
        al * log((b - a) / 2)
        + log(2 * pi)
        - al * log(2)
        - al / (2 * pi) * gauss_jacobi_integrate(rule, V, tol=tol, dps=mp.dps)
        + al / 2 * V(a)
    )
    C3 = -mpf(1) / 4 + al**2 / 2
    C4 = (
        3 * zeta_prime_minus_one(dps=mp.dps)
        + log(2) / 12
        - log(pi * psi(b)) / 8
        - (1 - 4 * al**2) / 8 * log(pi * psi(a))
        + al / 2 * log(2 * pi)
        - al**2 / 2 * log(2)
        - log_barnes_g(1 + al, dps=mp.dps)
    )
    return C1, C2, C3, C4


# ---------------------------------------------------------------------------
# JUE normalisation expansions (Z_n / n!)


@with_precision
def jue_partition_expansion_soft(alpha, beta, t=0) -> Expansion:
    """log(Z_n(alpha n + t, beta n) / n!) for alpha, beta > 0."""
    al, be, t = to_mpf(alpha), to_mpf(beta), to_mpf(t)
    log = mpmath.log
    xl = lambda u: u * u / 2 * log(u)
    D1 = xl(1 + al) + xl(1 + be) + xl(1 + al + be) - xl(al) - xl(be) - xl(2 + al + be)
    D2 = log(2 * mpmath.pi) + t * (
        (1 + al) * log(1 + al) + (1 + al + be) * log(1 + al + be) - (2 + be) * log(2 + al + be) - al * log(al * (2 + al + be))
    )
    D4 = (
        zeta_prime_minus_one(dps=mp.dps)
        + log(al * be * (2 + al + be) / ((1 + al) * (1 + be) * (1 + al + be))) / 12
        + t**2 / 2 * log((1 + al) * (1 + al + be) / (al * (2 + al + be)))
    )
    return Expansion(D1, D2, mpf(-1) / 12, D4, Regime.PARTITION, "O(1/n)")


@with_precision
def jue_partition_expansion_hard(alpha, beta) -> Expansion:
    """log(Z_n(alpha, beta n) / n!) for fixed alpha > -1."""
    al, be = to_mpf(alpha), to_mpf(beta)
    log = mpmath.log
    C1 = (1 + be) ** 2 * log(1 + be) - be**2 / 2 * log(be) - (2 + be) ** 2 / 2 * log(2 + be)
    C2 = log(2 * mpmath.pi) + al * (1 + be) * log(1 + be) - al * (2 + be) * log(2 + be)
    C3 = (3 * al**2 - 1) / 6
    C4 = (
        2 * zeta_prime_minus_one(dps=mp.dps)
        - al**2 * mpmath.acoth(3 + 2 * be)
        + al / 2 * log(2 * mpmath.pi)
        + log(be * (2 + be) / (1 + be) ** 2) / 12
        - log_barnes_g(1 + al, dps=mp.dps)
    )
    return Expansion(C1, C2, C3, C4, Regime.PARTITION, "O(1/n)")


@with_precision
def reconstruct_lower_rect(q, gamma, delta, nshift=0, *, generic_pv: bool = False, tol=None) -> Expansion:
    """Rebuild the rectangular lower-tail coefficients from Hankel coefficients minus the normaliser."""
    q, g, dl, t = _q_check(q), to_mpf(gamma), to_mpf(delta), to_mpf(nshift)
    al, be, d = g - 1, dl, 1 - q * q
    mu = constrained_density(al, be, d, dps=mp.dps)
    m = mu.left
    V = lambda x: -al * mpmath.log(x) - be * mpmath.log(1 - x)
    W = lambda x: t * mpmath.log(x)
    Wp = lambda x: t / x
    inner = None if generic_pv else (lambda x: mpmath.pi * t * (1 - mpmath.sqrt(m * d) / x))
    C = hankel_coeffs_soft_hard(V, W, mu.psi, m, d, Wprime=Wp, inner=inner, tol=tol, dps=mp.dps)
    hat = Expansion(*C, Regime.LOWER_RECT)
    return hat - jue_partition_expansion_soft(al, be, t, dps=mp.dps)


@with_precision
def reconstruct_lower_square(q, delta, nshift=0, *, tol=None) -> Expansion:
    """Rebuild the almost-square lower-tail coefficients from Hankel coefficients minus the normaliser."""
    q, be, al = _q_check(q), to_mpf(delta), to_mpf(nshift)
    d = 1 - q * q
    mu = constrained_density(0, be, d, dps=mp.dps)
    V = lambda x: -be * mpmath.log(1 - x)
    C = hankel_coeffs_two_hard(V, mu.psi, 0, d, al, tol=tol, dps=mp.dps)
    hat = Expansion(*C, Regime.LOWER_SQUARE)
    return hat - jue_partition_expansion_hard(al, be, dps=mp.dps)


# ---------------------------------------------------------------------------
# closed-form integrals and their quadrature counterparts


INTEGRAL_IDENTITIES = ("log_over_x", "log_over_one_minus_x", "hilbert_of_log", "log_double", "arcsine_log", "arcsine_log_over", "hard_edge_potential", "soft_edge_potential")


@with_precision
def integral_closed_form(which: str, **p) -> mpf:
    """Closed forms of the integrals that simplify the Hankel coefficients.

    With W(x) = t log x and weights on [a, b]:

    ``log_over_x``            int W(x)/x sqrt((x-a)/(b-x)) dx            (a, b, t)
    ``log_over_one_minus_x``  int W(x)/(1-x) sqrt((x-a)/(b-x)) dx        (a, b, t)
    ``hilbert_of_log``        PV int W'(y) sqrt((b-y)(y-a))/(x-y) dy      (a, b, t, x)
    ``log_double``            int W(x)/sqrt((b-x)(x-a)) (the PV above) dx (a, b, t)

    On [0, d] against 1/sqrt(x(d-x)):

    ``arcsine_log``           int log(1-x)                               (d)
    ``arcsine_log_over``      int log(1-x)/(1-x)                         (d)
    ``hard_edge_potential``   int V (1/pi + psi), V = -beta log(1-x)      (beta, d)

    ``soft_edge_potential`` is the first soft/hard Hankel integral for the
    pushed Jacobi measure on [m, d]                                      (alpha, beta, d)
    """
    log, sqrt, pi = mpmath.log, mpmath.sqrt, mpmath.pi
    P = {k: to_mpf(v) for k, v in p.items()}
    if which in ("log_over_x", "log_over_one_minus_x", "hilbert_of_log", "log_double"):
        a, b, t = P["a"], P["b"], P["t"]
        if not 0 < a < b:
            raise DomainError("need 0 < a < b")
        sa, sb = sqrt(a), sqrt(b)
        if which == "log_over_x":
            return 2 * pi * t * (log((sa + sb) / 2) + sa / sb * log((sa + sb) / (2 * sqrt(a * b))))
        if which == "log_over_one_minus_x":
            if b >= 1:
                raise DomainError("log_over_one_minus_x needs b < 1")
            return 2 * pi * t * (
                log(2 / (sa + sb))
                + sqrt(1 - a) / sqrt(1 - b)
                * log((sqrt(a * (1 - b)) + sqrt(b * (1 - a))) / (sqrt(1 - a) + sqrt(1 - b)))
            )
        if which == "hilbert_of_log":
            return pi * t * (1 - sqrt(a * b) / P["x"])
        return (2 * pi * t) ** 2 * log((sa + sb) / (2 * (a * b) ** (mpf(1) / 4)))
    if which in ("arcsine_log", "arcsine_log_over", "hard_edge_potential"):
        d = P["d"]
        if not 0 < d < 1:
            raise DomainError("need 0 < d < 1")
        s = sqrt(1 - d)
        A = log(2 / (1 + s))
        Bq = log(4 * (1 - d) / d * (1 - s) / (1 + s))
        if which == "arcsine_log":
            return -2 * pi * A
        if which == "arcsine_log_over":
            return pi / s * Bq
        be = P["beta"]
        return be * ((be + 4) * A + be / 2 * Bq)
    if which == "soft_edge_potential":
        al, be, d = P["alpha"], P["beta"], P["d"]
        m = solve_mfrak_d(al, be, d, dps=mp.dps)
        return (
            -3
            + al**2 / 2 * log(m * d)
            + 2 * al * be * log((sqrt(m * (1 - d)) + sqrt(d * (1 - m))) / 2)
            + be**2 / 2 * log((1 - m) * (1 - d))
            - 2 * (2 + al + be) * (al * log((sqrt(m) + sqrt(d)) / 2) + be * log((sqrt(1 - m) + sqrt(1 - d)) / 2))
        )
    raise DomainError(f"unknown identity {which!r}; choose from {INTEGRAL_IDENTITIES}")


@with_precision
def integral_quadrature(which: str, tol=None, **p) -> mpf:
    """Left-hand sides of the same identities, by Gauss-Jacobi quadrature."""
    tol = mpf(10) ** (-(mp.dps // 2)) if tol is None else to_mpf(tol)
    log, pi = mpmath.log, mpmath.pi
    P = {k: to_mpf(v) for k, v in p.items()}
    if which in ("log_over_x", "log_over_one_minus_x", "hilbert_of_log", "log_double"):
        a, b, t = P["a"], P["b"], P["t"]
        W = lambda x: t * log(x)
        if which == "log_over_x":
            return gauss_jacobi_integrate(QuadratureRule(a, b, HALF, -HALF), lambda x: W(x) / x, tol=tol, dps=mp.dps)
        if which == "log_over_one_minus_x":
            return gauss_jacobi_integrate(QuadratureRule(a, b, HALF, -HALF), lambda x: W(x) / (1 - x), tol=tol, dps=mp.dps)
        if which == "hilbert_of_log":
            return _hilbert_pv(lambda y: t / y, a, b, P["x"], tol)
        return _c4_double(W, lambda y: t / y, a, b, None, tol)
    if which in ("arcsine_log", "arcsine_log_over", "hard_edge_potential"):
        d = P["d"]
        rule = QuadratureRule(0, d, -HALF, -HALF)
        if which == "arcsine_log":
            return gauss_jacobi_integrate(rule, lambda x: log(1 - x), tol=tol, dps=mp.dps)
        if which == "arcsine_log_over":
            return gauss_jacobi_integrate(rule, lambda x: log(1 - x) / (1 - x), tol=tol, dps=mp.dps)
        be = P["beta"]
        # the pushed-measure density part, valid up to and including d = b
        psi = lambda x: (1 + be / 2 - be * mpmath.sqrt(1 - d) / (2 * (1 - x))) / pi
        return gauss_jacobi_integrate(rule, lambda x: -be * log(1 - x) * (1 / pi + psi(x)), tol=tol, dps=mp.dps)
    if which == "soft_edge_potential":
        al, be, d = P["alpha"], P["beta"], P["d"]
        mu = constrained_density(al, be, d, dps=mp.dps)
        m = mu.left
        V = lambda x: -al * log(x) - be * log(1 - x)
        f = lambda x: (V(x) - 4 * (d - x) / (d - m)) * (2 / ((d - m) * pi) + mu.psi(x))
        return gauss_jacobi_integrate(QuadratureRule(m, d, HALF, -HALF), f, tol=tol, dps=mp.dps)
    raise DomainError(f"unknown identity {which!r}; choose from {INTEGRAL_IDENTITIES}")
