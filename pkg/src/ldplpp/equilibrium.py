"""Equilibrium measures of the (constrained) Jacobi ensemble.

Parametrisation: the JUE exponents scale as lam1 = alpha n, lam2 = beta n,
and the largest eigenvalue is conditioned below d. In LPP variables
alpha = gamma - 1, beta = delta and d = 1 - q^2.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import mpmath
from mpmath import mp, mpf

from .errors import DomainError, RegimeError
from .numerics import QuadratureRule, brent_root, gauss_jacobi_integrate, to_mpf, with_precision

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class EdgeData:
    a: mpf
    b: mpf
    mfrak: mpf | None = None


@with_precision
def edges(gamma, delta) -> EdgeData:
    """Support [a, b] of the Wachter law with alpha = gamma - 1, beta = delta."""
    g, d = to_mpf(gamma), to_mpf(delta)
    if g < 1:
        raise DomainError(f"gamma must be >= 1, got {gamma}")
    if d <= 0:
        raise DomainError(f"delta must be > 0, got {delta}")
    s = g + d + 1
    u, v = mpmath.sqrt(g * (g + d)), mpmath.sqrt(d + 1)
    return EdgeData(((u - v) / s) ** 2, ((u + v) / s) ** 2)


def _alpha_beta_d(gamma, delta, q):
    g, dl, q = to_mpf(gamma), to_mpf(delta), to_mpf(q)
    if not 0 < q < 1:
        raise DomainError(f"q must lie in (0, 1), got {q}")
    return g - 1, dl, 1 - q * q


def mfrak_equation(alpha, beta, d) -> Callable[[mpf], mpf]:
    """The left-edge equation as a function whose root is the soft edge."""
    alpha, beta, d = to_mpf(alpha), to_mpf(beta), to_mpf(d)
    sd, s1d = mpmath.sqrt(d), mpmath.sqrt(1 - d)
    return lambda m: alpha * (sd / mpmath.sqrt(m) - 1) + beta * (s1d / mpmath.sqrt(1 - m) - 1) - 2


def _check_pushed(alpha, beta, d):
    if alpha <= 0:
        raise DomainError("the soft left edge needs alpha = gamma - 1 > 0")
    if beta <= 0:
        raise DomainError("beta = delta must be positive")
    e = edges(alpha + 1, beta, dps=mp.dps)
    if not 0 < d < e.b:
        raise RegimeError(
            f"pushed regime needs d < b (delta < omega); got d={mpmath.nstr(d, 12)}, b={mpmath.nstr(e.b, 12)}"
        )
    return e


@with_precision
def solve_mfrak_d(alpha, beta, d, tol=None) -> mpf:
    """Soft left edge of the pushed measure, by Brent on (1e-30 a, a)."""
    alpha, beta, d = to_mpf(alpha), to_mpf(beta), to_mpf(d)
    e = _check_pushed(alpha, beta, d)
    f = mfrak_equation(alpha, beta, d)
    tol = mpf(10) ** (-(mp.dps - 10)) if tol is None else tol
    return brent_root(f, mpf(10) ** -30 * e.a, e.a, tol=tol, dps=mp.dps)


@with_precision
def solve_mfrak(gamma, delta, q, tol=None) -> mpf:
    return solve_mfrak_d(*_alpha_beta_d(gamma, delta, q), tol=tol, dps=mp.dps)


def _real_cbrt(z):
    z = mpmath.mpmathify(z)
    if isinstance(z, mpmath.mpc):
        return mpmath.cbrt(z)
    return mpmath.cbrt(z) if z >= 0 else -mpmath.cbrt(-z)


@with_precision
def closed_form_mfrak_d(alpha, beta, d) -> mpf:
    """Quartic-root closed form of the soft left edge.

    When Q^3 + R^2 < 0 the two cube roots are complex conjugates and their
    sum is taken as twice the real part of the principal root; otherwise
    real cube roots are used.
    """
    alpha, beta, d = to_mpf(alpha), to_mpf(beta), to_mpf(d)
    _check_pushed(alpha, beta, d)
    s = alpha + beta + 2
    B = alpha * mpmath.sqrt(d) / s
    C = beta * mpmath.sqrt(1 - d) / s
    B2, C2 = B * B, C * C
    Q = -((1 - B2 - C2) ** 2) / 9
    R = (B2**3 - 3 * B2**2 * (1 - C2) + 3 * B2 * (1 + 16 * C2 + C2 * C2) - (1 - C2) ** 3) / 27
    disc = Q**3 + R**2
    if disc < 0:
        root = mpmath.cbrt(mpmath.mpc(R, mpmath.sqrt(-disc)))
        cube_sum = 2 * root.real
    else:
        sq = mpmath.sqrt(disc)
        cube_sum = _real_cbrt(R + sq) + _real_cbrt(R - sq)
    x0 = -(2 * C2 - B2 - 2) / 3 + cube_sum
    inner = B2 - 2 * C2 + 2 - x0 - 2 / mpmath.sqrt(x0) * B * (C2 + 1)
    return (B + mpmath.sqrt(x0) - mpmath.sqrt(inner)) ** 2 / 4


@with_precision
def closed_form_mfrak(gamma, delta, q) -> mpf:
    return closed_form_mfrak_d(*_alpha_beta_d(gamma, delta, q), dps=mp.dps)


class MeasureKind(str, enum.Enum):
    WACHTER = "Wachter"
    HARD_HARD = "HardHard"  # pushed, alpha = 0
    SOFT_HARD = "SoftHard"  # pushed, alpha > 0


@dataclass(frozen=True)
class ConstrainedMeasure:
    """Density psi(x) (x - left)^ea (right - x)^eb on [left, right]."""

    kind: MeasureKind
    alpha: mpf
    beta: mpf
    d: mpf
    left: mpf
    right: mpf
    ea: Fraction
    eb: Fraction
    psi: Callable

    def density(self, x) -> mpf:
        x = to_mpf(x)
        if not self.left < x < self.right:
            return mpf(0)
        return self.psi(x) * (x - self.left) ** self.ea * (self.right - x) ** self.eb

    def integrate(self, f: Callable, tol=None, dps: int | None = None) -> mpf:
        """Integral of f against the measure, by Gauss-Jacobi with matching edge exponents."""
        rule = QuadratureRule(self.left, self.right, self.ea, self.eb, 32)
        return gauss_jacobi_integrate(rule, lambda x: self.psi(x) * f(x), tol=tol, dps=dps)

    def mass(self, tol=None, dps: int | None = None) -> mpf:
        return self.integrate(lambda x: 1, tol=tol, dps=dps)


@with_precision
def constrained_density(alpha, beta, d) -> ConstrainedMeasure:
    """Equilibrium measure of the JUE with exponents (alpha n, beta n) conditioned below d."""
    alpha, beta, d = to_mpf(alpha), to_mpf(beta), to_mpf(d)
    if alpha < 0 or beta <= 0:
        raise DomainError("constrained_density needs alpha >= 0 and beta > 0")
    if not 0 < d <= 1:
        raise DomainError("constrained_density needs 0 < d <= 1")
    e = edges(alpha + 1, beta, dps=mp.dps)
    c = alpha + beta + 2
    if d >= e.b:
        if alpha == 0:
            # a = 0: sqrt(b - x) / sqrt(x) edge behaviour
            psi = lambda x: c / (2 * mpmath.pi * (1 - x))
            return ConstrainedMeasure(MeasureKind.WACHTER, alpha, beta, d, e.a, e.b, -HALF, HALF, psi)
        psi = lambda x: c / (2 * mpmath.pi * x * (1 - x))
        return ConstrainedMeasure(MeasureKind.WACHTER, alpha, beta, d, e.a, e.b, HALF, HALF, psi)
    s1d = mpmath.sqrt(1 - d)
    if alpha == 0:
        psi = lambda x: (1 + beta / 2 - beta * s1d / (2 * (1 - x))) / mpmath.pi
        return ConstrainedMeasure(MeasureKind.HARD_HARD, alpha, beta, d, mpf(0), d, -HALF, -HALF, psi)
    m = solve_mfrak_d(alpha, beta, d, dps=mp.dps)
    k1 = alpha * mpmath.sqrt(d) / mpmath.sqrt(m)
    k2 = beta * s1d / mpmath.sqrt(1 - m)
    psi = lambda x: (k1 / x - k2 / (1 - x)) / (2 * mpmath.pi)
    return ConstrainedMeasure(MeasureKind.SOFT_HARD, alpha, beta, d, m, d, HALF, -HALF, psi)
