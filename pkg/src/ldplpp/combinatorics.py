"""Partitions in a box, conjugation, Schur polynomials and hypergeometric coefficients."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import DomainError
from .numerics import bareiss_det


class Partition(tuple):
    """Weakly decreasing tuple of positive integers (trailing zeros dropped)."""

    def __new__(cls, parts: Sequence[int] = ()):
        parts = [int(p) for p in parts]
        if any(p < 0 for p in parts):
            raise DomainError(f"negative part in {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise DomainError(f"parts not weakly decreasing: {parts}")
        while parts and parts[-1] == 0:
            parts.pop()
        return super().__new__(cls, parts)

    @property
    def weight(self) -> int:
        return sum(self)

    @property
    def length(self) -> int:
        return len(self)

    def part(self, i: int) -> int:
        """1-based part, zero beyond the length."""
        return self[i - 1] if i <= len(self) else 0

    def conjugate(self) -> "Partition":
        return conjugate(self)

    def fits(self, box: "Box") -> bool:
        return self.length <= box.max_length and (not self or self[0] <= box.max_part)

    def __repr__(self):
        return f"Partition({tuple(self)!r})"


@dataclass(frozen=True)
class Box:
    max_length: int
    max_part: int

    def __post_init__(self):
        if self.max_length < 0 or self.max_part < 0:
            raise DomainError("box dimensions must be non-negative")

    @property
    def count(self) -> int:
        return math.comb(self.max_length + self.max_part, self.max_length)


def partitions_in_box(box: Box) -> Iterator[Partition]:
    """All partitions with at most ``max_length`` parts, each at most ``max_part``.

    Emitted in reverse-lexicographic order, starting from the full box.
    """

    def rec(prefix: list[int], rows_left: int, cap: int):
        if rows_left == 0 or cap == 0:
            yield Partition(prefix)
            return
        for p in range(cap, 0, -1):
            prefix.append(p)
            yield from rec(prefix, rows_left - 1, p)
            prefix.pop()
        yield Partition(prefix)

    yield from rec([], box.max_length, box.max_part)


def conjugate(lam: Sequence[int]) -> Partition:
    lam = Partition(lam)
    if not lam:
        return lam
    return Partition([sum(1 for p in lam if p >= j) for j in range(1, lam[0] + 1)])


def schur_at_ones(lam: Sequence[int], n: int) -> int:
    """s_lambda(1, ..., 1) with n ones: the hook-content style product over pairs i < j."""
    lam = Partition(lam)
    if lam.length > n:
        return 0
    parts = list(lam) + [0] * (n - lam.length)
    num = den = 1
    # pairs with both indices beyond the length contribute 1
    for i in range(lam.length):
        li = parts[i]
        for j in range(i + 1, n):
            num *= li - parts[j] + j - i
            den *= j - i
    return num // den


def vandermonde(xs: Sequence) -> Fraction:
    """prod_{i<j} (x_i - x_j)."""
    out = Fraction(1)
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            out *= Fraction(xs[i]) - Fraction(xs[j])
    return out


def schur_bialternant(lam: Sequence[int], xs: Sequence) -> Fraction:
    """Schur polynomial as a ratio of alternants at pairwise distinct rational points."""
    lam = Partition(lam)
    xs = [Fraction(x) for x in xs]
    m = len(xs)
    if len(set(xs)) != m:
        raise DomainError("schur_bialternant needs pairwise distinct points")
    if lam.length > m:
        return Fraction(0)
    mat = [[x ** (lam.part(j) + m - j) for j in range(1, m + 1)] for x in xs]
    return bareiss_det(mat) / vandermonde(xs)


def hyp_coeff(u, lam: Sequence[int]):
    """[u]_lambda = prod_j prod_{k < lambda_j} (u - j + 1 + k) as a finite product.

    Works for Fraction, int, float or mpf ``u``; the type of the result
    follows ``u``.
    """
    lam = Partition(lam)
    out = 1
    for j, lj in enumerate(lam, start=1):
        for k in range(lj):
            out = out * (u - j + 1 + k)
    return out
