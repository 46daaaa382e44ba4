import math
import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ldplpp.combinatorics import (
    Box,
    Partition,
    conjugate,
    hyp_coeff,
    partitions_in_box,
    schur_at_ones,
    schur_bialternant,
)
from ldplpp.errors import DomainError


def test_partition_normalises_and_validates():
    assert Partition((3, 1, 0, 0)) == (3, 1)
    assert Partition((3, 1)).weight == 4 and Partition((3, 1)).length == 2
    with pytest.raises(DomainError):
        Partition((1, 2))
    with pytest.raises(DomainError):
        Partition((2, -1))


def test_box_fits():
    box = Box(2, 3)
    assert Partition((3, 3)).fits(box)
    assert not Partition((4,)).fits(box)
    assert not Partition((1, 1, 1)).fits(box)


def test_box_enumeration_examples():
    assert list(partitions_in_box(Box(0, 5))) == [Partition(())]
    assert len(list(partitions_in_box(Box(3, 3)))) == 20
    first = next(iter(partitions_in_box(Box(2, 2))))
    assert first == (2, 2)


@pytest.mark.parametrize("m,ell", [(m, ell) for m in range(9) for ell in range(9)])
def test_box_count_is_binomial(m, ell):
    parts = list(partitions_in_box(Box(m, ell)))
    assert len(parts) == math.comb(m + ell, m) == Box(m, ell).count
    assert len(set(parts)) == len(parts)
    assert all(p.fits(Box(m, ell)) for p in parts)


def test_conjugate_examples():
    assert conjugate(()) == ()
    assert conjugate((2, 1)) == (2, 1)
    assert conjugate((3,)) == (1, 1, 1)


def test_conjugate_involution_up_to_six():
    for lam in partitions_in_box(Box(6, 6)):
        assert conjugate(conjugate(lam)) == lam
        assert conjugate(lam).fits(Box(6, 6))


def test_schur_at_ones_examples():
    assert schur_at_ones((1,), 3) == 3
    assert schur_at_ones((2, 1), 3) == 8
    assert schur_at_ones((1, 1, 1), 2) == 0


def test_schur_bialternant_examples():
    assert schur_bialternant((), (Fraction(2), Fraction(5))) == 1
    assert schur_bialternant((1,), (Fraction(2), Fraction(5))) == 7
    assert schur_bialternant((2,), (1, 2)) == 7
    with pytest.raises(DomainError):
        schur_bialternant((1,), (1, 1))


def _interpolate_at_one(lam, n):
    # s_lambda(x, ..., x) = s_lambda(1_n) x^|lam|; evaluate along distinct points 1, 1+e, 1+2e, ...
    # and use homogeneity: s(t*xs) = t^|lam| s(xs), with xs = (1, 2, ..., n) scaled to have product structure.
    # Exact oracle: the principal specialisation s_lambda(1, x, ..., x^{n-1}) at x -> 1 via polynomial interpolation.
    deg = sum(lam) * n
    pts = [Fraction(k + 2) for k in range(deg + 1)]
    vals = [schur_bialternant(lam, [x**i for i in range(n)]) for x in pts]
    # Lagrange evaluation at x = 1
    total = Fraction(0)
    for i, (xi, yi) in enumerate(zip(pts, vals)):
        term = yi
        for j, xj in enumerate(pts):
            if i != j:
                term *= (1 - xj) / (xi - xj)
        total += term
    return total


def test_schur_at_ones_matches_bialternant_interpolation():
    for n in range(1, 5):
        for lam in partitions_in_box(Box(min(n, 4), 3)):
            assert _interpolate_at_one(lam, n) == schur_at_ones(lam, n)


def test_schur_at_ones_is_positive_integer():
    for lam in partitions_in_box(Box(4, 4)):
        v = schur_at_ones(lam, 5)
        assert isinstance(v, int) and v > 0


def test_dual_cauchy_identity():
    rng = random.Random(3)
    for m, ell in product(range(1, 4), repeat=2):
        xs = [Fraction(rng.randint(1, 9), rng.randint(1, 9)) + k for k in range(m)]
        ys = [Fraction(rng.randint(1, 9), rng.randint(1, 9)) + 10 * k for k in range(ell)]
        lhs = Fraction(1)
        for x in xs:
            for y in ys:
                lhs *= 1 + x * y
        rhs = sum(schur_bialternant(lam, xs) * schur_bialternant(conjugate(lam), ys) for lam in partitions_in_box(Box(m, ell)))
        assert lhs == rhs


def test_hyp_coeff_examples():
    assert hyp_coeff(Fraction(7, 3), ()) == 1
    assert hyp_coeff(Fraction(7, 3), (1,)) == Fraction(7, 3)
    # [u]_(2,1) = u (u+1) (u-1)
    u = Fraction(5, 2)
    assert hyp_coeff(u, (2, 1)) == u * (u + 1) * (u - 1)


@given(
    st.fractions(min_value=-20, max_value=20, max_denominator=7),
    st.lists(st.integers(min_value=0, max_value=5), max_size=5),
)
def test_hyp_coeff_transposition(u, parts):
    lam = Partition(sorted(parts, reverse=True))
    assert hyp_coeff(-u, lam) == (-1) ** lam.weight * hyp_coeff(u, conjugate(lam))
