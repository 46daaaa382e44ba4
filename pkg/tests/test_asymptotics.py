import random
from fractions import Fraction

import mpmath
import pytest
from mpmath import mpf

from ldplpp.asymptotics import (
    INTEGRAL_IDENTITIES,
    Regime,
    edge_log_integral,
    edge_log_integral_quadrature,
    hankel_coeffs_soft_hard,
    hankel_coeffs_two_hard,
    integral_closed_form,
    integral_quadrature,
    jue_ldp,
    lower_tail_rect,
    lower_tail_square,
    phi,
    phi_value,
    pv_inner,
    reconstruct_lower_rect,
    reconstruct_lower_square,
    tue_strong_critical_radius,
    tue_strong_expansion,
    tue_weak_expansion,
    two_point_action,
    upper_rate_closed_form,
    upper_tail,
)
from ldplpp.ensembles import JueParams, jue_cdf_max, lpp_tue_constant
from ldplpp.equilibrium import edges, solve_mfrak
from ldplpp.errors import DomainError, RegimeError
from ldplpp.lpp import omega

SQ = mpmath.sqrt(mpf(1) / 2)


def test_square_lower_tail_shape():
    E = lower_tail_square(SQ, 1)
    assert E.clog == mpf(-1) / 12 and E.c1 == 0 and E.regime is Regime.LOWER_SQUARE
    assert lower_tail_square(SQ, 1, 2).c1 != 0


def test_square_rate_vanishes_at_typical_value():
    E = lower_tail_square(mpf(1) / 3, 1, check_regime=False)
    assert abs(E.c2) < mpf(10) ** -20


def test_square_lower_tail_regime_checks():
    with pytest.raises(RegimeError):
        lower_tail_square(mpf(1) / 3, 2)
    with pytest.raises(DomainError):
        lower_tail_square(SQ, -1)


def test_rect_rate_is_difference_of_actions():
    g, dl = 2, 1
    E = lower_tail_rect(SQ, g, dl)
    e = edges(g, dl)
    m = solve_mfrak(g, dl, SQ)
    S = lambda x, y: two_point_action(g - 1, dl, x, y)
    assert abs(E.c2 + (S(m, mpf(1) / 2) - S(e.a, e.b))) < mpf(10) ** -15
    assert E.clog == mpf(-1) / 12


def test_rect_needs_gamma_above_one():
    with pytest.raises(DomainError):
        lower_tail_rect(SQ, 1, 1)


def _exact_lower(q2, n, N, ell, dps):
    with mpmath.mp.workdps(dps):
        return jue_cdf_max(JueParams(N, n - N, ell), 1 - q2, dps=dps).log(dps)


@pytest.mark.parametrize("gamma,delta,nshift", [(1, 1, 0), (1, 1, 2), (2, 1, 1), (3, 2, 0)])
def test_lower_tail_residuals_shrink(gamma, delta, nshift):
    q2 = Fraction(1, 2)
    q = mpmath.sqrt(mpf(1) / 2)
    E = lower_tail_square(q, delta, nshift) if gamma == 1 else lower_tail_rect(q, gamma, delta, nshift)
    res = [abs(_exact_lower(q2, gamma * N + nshift, N, delta * N, 8 * N) - E.evaluate(N)) for N in (8, 16, 32)]
    assert res[0] > res[1] > res[2]


def test_gamma_continuity_lipschitz():
    base = lower_tail_square(SQ, 1)
    ratios = []
    for h in (mpf(10) ** -2, mpf(10) ** -3, mpf(10) ** -4):
        R = lower_tail_rect(SQ, 1 + h, 1)
        ratios.append(max(abs(R.c2 - base.c2), abs(R.c1 - base.c1), abs(R.c0 - base.c0)) / h)
    assert max(ratios) < 1


def test_phi_vanishes_at_edge_and_increases():
    for g, dl in ((1, 1), (1.5, 2), (2, 0.5), (3, 4), (1, 7)):
        b = edges(g, dl).b
        assert abs(phi_value(g, dl, b)) < mpf(10) ** -20
        xs = [b + (1 - b) * k / 40 for k in range(40)]
        vals = [phi_value(g, dl, x) for x in xs]
        assert all(u < v for u, v in zip(vals, vals[1:]))


def test_phi_edge_case_gamma_one():
    assert abs(edges(1, 1).b - mpf(8) / 9) < mpf(10) ** -50
    assert abs(phi_value(1, 1, mpf(8) / 9)) < mpf(10) ** -20


def test_phi_rejects_points_inside_support():
    with pytest.raises(DomainError):
        phi(2, 1, edges(2, 1).b - mpf(10) ** -3)


def test_phi_derivatives():
    g, dl, x = mpf(3) / 2, 2, mpf(9) / 10
    pt = phi(g, dl, x)
    h = mpf(10) ** -20
    fd = (phi_value(g, dl, x + h) - phi_value(g, dl, x - h)) / (2 * h)
    assert pt.derivative_x > 0 and abs(pt.derivative_x - fd) < 1e-10
    fg = (phi_value(g + h, dl, x) - phi_value(g - h, dl, x)) / (2 * h)
    assert abs(pt.derivative_gamma_total - fg) < 1e-10


def test_upper_tail_shape_and_regime():
    U = upper_tail(SQ, 1, 6)
    assert U.clog == -1 and U.c2 == 0 and U.regime is Regime.UPPER
    with pytest.raises(RegimeError):
        upper_tail(SQ, 1, 4)


def test_upper_rate_vanishes_at_typical_value():
    om = omega(1, SQ)
    vals = [abs(upper_tail(SQ, 1, om + eps).c1) for eps in (mpf(10) ** -1, mpf(10) ** -2, mpf(10) ** -3)]
    assert vals[-1] < 1e-2
    assert vals[0] > vals[1] > vals[2]


def test_strict_and_weak_events_differ_by_delta_derivative():
    weak, strict = upper_tail(SQ, 1, 6), upper_tail(SQ, 1, 6, strict_inequality=True)
    assert weak.c1 == strict.c1 and weak.c0 > strict.c0


def test_edge_log_integral():
    assert edge_log_integral(1, 3) == 0
    assert abs(edge_log_integral(2, 3) - edge_log_integral_quadrature(2, 3)) < 1e-10
    rng = random.Random(8)
    for _ in range(10):
        x, B = 1 + 4 * rng.random(), (1 + 5 * rng.random()) * rng.choice((1, -1))
        if B < 0 and -B <= x:
            B = -B  # keep the pole at -B outside [1, x]
        assert abs(edge_log_integral(x, B) - edge_log_integral_quadrature(x, B)) < 1e-10
    with pytest.raises(DomainError):
        edge_log_integral(0.5, 3)


def test_upper_rate_matches_closed_form():
    g, q, t = mpf(3) / 2, mpf(1) / 2, 6
    ref = upper_rate_closed_form(t, g, q)
    assert abs(phi_value(g, t - 1, 1 - q * q) / ref - 1) < 1e-10
    sb = (1 + q * mpmath.sqrt(g)) ** 2 / (1 - q * q)
    assert abs(upper_rate_closed_form(sb, g, q)) < mpf(10) ** -30
    eps = mpf(1) / 10
    assert abs(2 * upper_rate_closed_form(sb + eps, g, q) + upper_tail(q, g, sb + eps - 1).c1) < 1e-30


def _exact_tue_log_moment(N, m, M, q2, dps):
    # E|det(T - q)|^{2m} recovered from the last-passage probability it is dual to
    with mpmath.mp.workdps(dps):
        n = m + M - N
        lp = jue_cdf_max(JueParams(m, n - m, N), 1 - q2, dps=dps).log(dps)
        c = lpp_tue_constant(N, n, m)
        return lp - mpmath.log(mpf(c.numerator) / c.denominator) - n * m * mpmath.log(1 - q2)


def test_tue_weak_examples():
    assert abs(tue_weak_expansion(1, mpf(10) ** -30, 0).c2) < mpf(10) ** -50
    z = mpf(3) / 10
    E = tue_weak_expansion(mpf(1) / 2, z, 0)
    assert abs(E.c2 + mpmath.log(1 - z * z) / 4) < mpf(10) ** -50
    assert E.c1 == 0 and E.clog == 0 and abs(E.c0) < mpf(10) ** -50
    with pytest.raises(RegimeError):
        tue_weak_expansion(mpf(1) / 2, mpf(1) / 2, 1)
    with pytest.raises(RegimeError):
        tue_weak_expansion(mpf(1) / 2, mpf(3) / 10, 1, regime="pre")


def test_tue_weak_pre_reuses_square_coefficients():
    rng = random.Random(4)
    for _ in range(10):
        c = mpf(rng.uniform(0.2, 2))
        z = 1 / (2 * c + 1) + (1 - 1 / (2 * c + 1)) * mpf(rng.uniform(0.05, 0.95))
        s = rng.randint(0, 3)
        pre = tue_weak_expansion(c, z, s)
        L = lower_tail_square(z, 1 / c, s)
        assert pre.regime is Regime.TUE_PRE_WEAK
        lz = mpmath.log(1 - z * z)
        assert abs(pre.c2 - (-(c**2) * lz + c**2 * L.c2)) < mpf(10) ** -40
        H1 = s * (-c * lz + c * mpmath.log(c) - (c + 1) * mpmath.log(c + 1))
        assert abs(pre.c1 - (H1 + c * L.c1)) < mpf(10) ** -40
        assert abs(pre.clog - (mpf(s * s) / 2 - mpf(1) / 12)) < mpf(10) ** -50


@pytest.mark.parametrize("z", [mpf(3) / 10, mpf(4) / 5])
def test_tue_weak_expansion_converges(z):
    c, s = mpf(1) / 2, 1
    E = tue_weak_expansion(c, z, s)
    q2 = z * z
    res = [abs(_exact_tue_log_moment(N, N // 2, N + s, q2, 8 * N) - E.evaluate(N)) for N in (8, 16, 32)]
    assert res[0] > res[1] > res[2]


def test_tue_strong_examples():
    assert abs(tue_strong_critical_radius(1, 1) - (mpmath.sqrt(6) - mpmath.sqrt(2)) / 4) < mpf(10) ** -50
    assert tue_strong_expansion(1, 1, mpf(1) / 10).c1 == 0
    c, z = mpf(1) / 2, mpf(1) / 2
    far = tue_strong_expansion(c, 10**6, z).c2
    limit = c * z * z - 3 * c / 2 + ((c + 1) ** 2 * mpmath.log(c + 1) - c**2 * mpmath.log(c)) / 2
    assert abs(far - limit) < 1e-4


@pytest.mark.parametrize("qq", [mpf(1) / 5, mpf(3) / 5])
def test_tue_strong_expansion_converges(qq):
    c, rho, t = mpf(1) / 2, 1, 1
    z = qq * mpmath.sqrt(1 + rho)
    E = tue_strong_expansion(c, rho, z, t)
    res = []
    for N in (8, 16, 32):
        exact = _exact_tue_log_moment(N, N // 2, 2 * N + t, qq * qq, 8 * N) + (N // 2) * N * mpmath.log(2)
        res.append(abs(exact - E.evaluate(N)))
    assert res[0] > res[1] > res[2]


def test_jue_ldp_wraps_lpp_expansions():
    d = mpf(6) / 10
    assert jue_ldp(0, 2, d).as_tuple() == lower_tail_square(mpmath.sqrt(1 - d), 2, 0).as_tuple()
    assert jue_ldp(0, 2, d).regime is Regime.JUE_PUSHED
    assert jue_ldp(0, 2, mpf(9) / 10).clog == -1
    assert jue_ldp(1, 1, mpf(3) / 10, t=0).clog == mpf(-1) / 12
    with pytest.raises(RegimeError):
        jue_ldp(0, 2, mpf(3) / 4)


def test_hankel_c3_constants():
    V = lambda x: -mpmath.log(1 - x)
    psi = lambda x: 1 / mpmath.pi
    assert hankel_coeffs_two_hard(V, psi, 0, mpf(1) / 2, 0)[2] == mpf(-1) / 4
    assert hankel_coeffs_two_hard(V, psi, 0, mpf(1) / 2, mpf(3) / 2)[2] == mpf(-1) / 4 + mpf(9) / 8
    C = hankel_coeffs_soft_hard(V, lambda x: mpmath.log(x), psi, mpf(1) / 10, mpf(1) / 2)
    assert C[2] == mpf(-1) / 6


def test_pv_inner_closed_form():
    a, b, t = mpf(1) / 10, mpf(3) / 5, mpf(7) / 4
    for x in (mpf(1) / 5, mpf(1) / 3, mpf(11) / 20):
        assert abs(pv_inner(lambda y: t / y, a, b, x) - mpmath.pi * t * (1 - mpmath.sqrt(a * b) / x)) < 1e-20


def test_reconstructions():
    L = lower_tail_rect(SQ, 2, 1, 1)
    R = reconstruct_lower_rect(SQ, 2, 1, 1)
    assert all(abs(u - v) < 1e-8 for u, v in zip(L.as_tuple(), R.as_tuple()))
    Rg = reconstruct_lower_rect(SQ, 2, 1, 1, generic_pv=True, dps=30)
    assert all(abs(u - v) < 1e-8 for u, v in zip(L.as_tuple(), Rg.as_tuple()))
    q = mpmath.sqrt(mpf(4) / 10)
    S, T = lower_tail_square(q, 2, 1), reconstruct_lower_square(q, 2, 1)
    assert all(abs(u - v) < 1e-8 for u, v in zip(S.as_tuple(), T.as_tuple()))


GRID = {
    "log_over_x": dict(a=0.1, b=0.7, t=1.5),
    "log_over_one_minus_x": dict(a=0.2, b=0.9, t=-0.5),
    "hilbert_of_log": dict(a=0.1, b=0.7, t=2, x=0.4),
    "log_double": dict(a=0.25, b=1, t=1),
    "arcsine_log": dict(d=0.75),
    "arcsine_log_over": dict(d=0.4),
    "hard_edge_potential": dict(beta=2, d=0.75),
    "soft_edge_potential": dict(alpha=1, beta=1, d=0.5),
}


@pytest.mark.parametrize("which", INTEGRAL_IDENTITIES)
def test_integral_identity(which):
    p = GRID[which]
    assert abs(integral_closed_form(which, **p) - integral_quadrature(which, **p)) < 1e-10


def test_integral_examples():
    assert abs(integral_closed_form("log_double", a=0.25, b=1, t=1) - mpf("2.325")) < 1e-3
    assert abs(integral_closed_form("arcsine_log", d=0.75) + 2 * mpmath.pi * mpmath.log(mpf(4) / 3)) < 1e-50
    assert abs(integral_closed_form("log_over_x", a=0.5, b=0.5 + 1e-4, t=1)
               - integral_quadrature("log_over_x", a=0.5, b=0.5 + 1e-4, t=1)) < 1e-6
    with pytest.raises(DomainError):
        integral_closed_form("nope")
