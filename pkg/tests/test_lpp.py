import math
from fractions import Fraction
from itertools import product

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ldplpp.errors import CapacityError, DomainError
from ldplpp.lpp import (
    LppParams,
    WeightGrid,
    last_passage,
    monte_carlo_tails,
    omega,
    prob_leq_jue,
    prob_leq_meixner,
    prob_leq_schur,
    sample_weights,
    sigma,
    simulate_last_passage,
)

ROUTES = (prob_leq_schur, prob_leq_jue, prob_leq_meixner)


def test_params_validation_and_symmetry():
    p = LppParams(Fraction(1, 2), 2, 5, 3)
    assert (p.n, p.m) == (5, 2)
    with pytest.raises(DomainError):
        LppParams(Fraction(3, 2), 2, 2)
    with pytest.raises(DomainError):
        LppParams(Fraction(1, 2), 0, 2)


def test_sampler_near_zero_q():
    grid = sample_weights(LppParams(1e-9, 100, 100), seed=3)
    assert grid.weights.sum() == 0


def test_sampler_is_deterministic_and_geometric():
    p = LppParams(0.5, 200, 200)
    a, b = sample_weights(p, 11), sample_weights(p, 11)
    assert np.array_equal(a.weights, b.weights)
    # mean of geometric(q2) on {0,1,...} is q2/(1-q2) = 1
    assert abs(a.weights.mean() - 1) < 0.05


def test_last_passage_examples():
    assert last_passage(WeightGrid(np.zeros((3, 4), dtype=int)))[0] == 0
    row = np.array([[3, 1, 4, 1, 5]])
    assert last_passage(WeightGrid(row))[0] == 14
    g, path = last_passage(WeightGrid(np.array([[1, 2], [3, 4]])))
    assert g == 8
    assert path == [(1, 1), (2, 1), (2, 2)]


def test_last_passage_matches_path_enumeration():
    rng = np.random.default_rng(5)
    for _ in range(30):
        n, m = rng.integers(1, 5, size=2)
        w = rng.integers(0, 6, size=(n, m))
        best = 0
        for steps in set(product((0, 1), repeat=n + m - 2)):
            if sum(steps) != n - 1:
                continue
            i = j = 0
            total = w[0, 0]
            for s in steps:
                i, j = (i + 1, j) if s else (i, j + 1)
                total += w[i, j]
            best = max(best, total)
        g, path = last_passage(WeightGrid(w))
        assert g == best
        assert sum(w[i - 1, j - 1] for i, j in path) == g


@settings(max_examples=80)
@given(arrays(np.int64, st.tuples(st.integers(1, 6), st.integers(1, 6)), elements=st.integers(0, 9)),
       st.integers(0, 35), st.integers(1, 5))
def test_last_passage_monotone_in_weights(w, idx, bump):
    before = last_passage(WeightGrid(w))[0]
    w2 = w.copy()
    w2.flat[idx % w.size] += bump
    assert last_passage(WeightGrid(w2))[0] >= before


def test_batched_simulation_agrees_with_single_grid_dp():
    g = simulate_last_passage(0.5, 5, 4, trials=20, seed=9)
    for t in range(20):
        w = np.floor(np.log(1.0 - np.random.default_rng([9, t]).random((5, 4))) / math.log(0.5)).astype(np.int64)
        assert g[t] == last_passage(WeightGrid(w))[0]


@pytest.mark.parametrize("route", ROUTES)
def test_route_examples(route):
    q2 = Fraction(1, 3)
    assert route(LppParams(q2, 3, 2, 0)).value == (1 - q2) ** 6
    assert route(LppParams(q2, 1, 1, 4)).value == 1 - q2**5
    assert route(LppParams(Fraction(1, 2), 2, 1, 1)).value == Fraction(1, 2)


def test_jue_route_single_site():
    assert prob_leq_jue(LppParams(Fraction(1, 2), 1, 1, 1)).value == Fraction(3, 4)


def test_jue_route_large_threshold_is_one():
    v = prob_leq_jue(LppParams(Fraction(1, 2), 2, 2, 100)).as_mpf()
    assert abs(v - 1) < 1e-10


def test_routes_agree_exactly_on_grid():
    for q2 in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
        for n in range(1, 6):
            for m in range(1, n + 1):
                for ell in range(6):
                    p = LppParams(q2, n, m, ell)
                    vals = [r(p) for r in ROUTES]
                    assert all(v.certified_exact for v in vals)
                    assert vals[0].value == vals[1].value == vals[2].value


def test_routes_monotone_in_threshold_and_bounded():
    p = LppParams(Fraction(2, 3), 4, 3)
    vals = [prob_leq_jue(p.with_ell(ell)).value for ell in range(12)]
    assert all(0 <= v <= 1 for v in vals)
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_real_mode_matches_exact():
    exact = prob_leq_schur(LppParams(Fraction(1, 2), 4, 3, 4)).value
    for route in ROUTES:
        v = route(LppParams(0.5, 4, 3, 4))
        assert not v.certified_exact
        tol = 1e-28 if route is prob_leq_meixner else 1e-40  # Meixner truncates its normalising series
        assert abs(v.as_mpf() - mpmath.mpf(exact.numerator) / exact.denominator) < tol


def test_schur_route_capacity():
    with pytest.raises(CapacityError):
        prob_leq_schur(LppParams(Fraction(1, 2), 20, 13, 13))


def test_omega_sigma_examples():
    assert omega(1, 1 / mpmath.sqrt(2)) - (2 + 2 * mpmath.sqrt(2)) < mpmath.mpf(10) ** -50
    assert abs(omega(1, mpmath.mpf(1) / 3) - 1) < mpmath.mpf(10) ** -60
    assert omega(1, 1e-4) < 1e-3
    assert sigma(2, 0.5) > 0
    with pytest.raises(DomainError):
        omega(0.5, 0.5)


def test_monte_carlo_is_deterministic():
    a = monte_carlo_tails(0.5, 1, 10, trials=1, seed=4, deltas=(1,))
    b = monte_carlo_tails(0.5, 1, 10, trials=1, seed=4, deltas=(1,))
    assert a.mean_g_over_n == b.mean_g_over_n and a.hist_counts == b.hist_counts
    with pytest.raises(DomainError):
        monte_carlo_tails(0.5, 1, 10, trials=0)


def test_monte_carlo_lower_tail_frequency_matches_exact():
    trials = 40000
    s = monte_carlo_tails(0.5, 1, 8, trials=trials, seed=12, deltas=(1,))
    p = float(prob_leq_jue(LppParams(Fraction(1, 2), 8, 8, 8)).as_mpf())
    se = math.sqrt(p * (1 - p) / trials)
    assert abs(s.leq_freq[1.0] - p) < 4 * se


def test_row_conventions():
    assert monte_carlo_tails(0.5, 1.5, 5, trials=2, seed=0).n == 7
    assert monte_carlo_tails(0.5, 1.5, 4, trials=2, seed=0, convention="shift", nshift=1).n == 7
    with pytest.raises(DomainError):
        monte_carlo_tails(0.5, 1.5, 5, trials=2, convention="shift")
