"""Geometric last-passage percolation: sampling, the DP recursion, and exact tail probabilities.

Three independent exact routes compute P(G_{n,m} <= ell): a Schur sum over
the (m, ell) box, the largest-eigenvalue distribution of a Jacobi unitary
ensemble, and the largest particle of a Meixner ensemble.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np
from mpmath import mp, mpf

from .combinatorics import Box, partitions_in_box, schur_at_ones
from .ensembles import (
    EXACT_BOX_CAP,
    ExactValue,
    JueParams,
    Route,
    _check_box,
    _exact_input,
    jue_cdf_max,
    schur_pair_sum,
)
from .errors import AccuracyError, DomainError
from .numerics import DEFAULT_DPS, bareiss_det, lu_logdet, to_mpf, with_precision

__all__ = [
    "LppParams",
    "WeightGrid",
    "ExactValue",
    "Route",
    "sample_weights",
    "last_passage",
    "prob_leq_schur",
    "prob_leq_jue",
    "prob_leq_meixner",
    "omega",
    "sigma",
    "monte_carlo_tails",
    "simulate_last_passage",
    "TailSummary",
]


@dataclass(frozen=True)
class LppParams:
    """Geometric parameter q2 = q^2 and grid size; (n, m) is stored with n >= m."""

    q2: object
    n: int
    m: int
    ell: int | None = None

    def __post_init__(self):
        if int(self.n) != self.n or int(self.m) != self.m or self.n < 1 or self.m < 1:
            raise DomainError(f"grid sides must be positive integers, got ({self.n}, {self.m})")
        if not 0 < to_mpf(self.q2) < 1:
            raise DomainError(f"q2 must lie in (0, 1), got {self.q2}")
        if self.ell is not None and (int(self.ell) != self.ell or self.ell < 0):
            raise DomainError(f"threshold ell must be a non-negative integer, got {self.ell}")
        if self.n < self.m:
            n, m = self.m, self.n
            object.__setattr__(self, "n", n)
            object.__setattr__(self, "m", m)

    def with_ell(self, ell: int) -> "LppParams":
        return LppParams(self.q2, self.n, self.m, ell)

    @property
    def exact(self) -> bool:
        return _exact_input(self.q2)

    def _need_ell(self) -> int:
        if self.ell is None:
            raise DomainError("this operation needs a threshold ell")
        return int(self.ell)


@dataclass(frozen=True)
class WeightGrid:
    weights: np.ndarray
    seed: object = None

    def __post_init__(self):
        w = np.asarray(self.weights)
        if w.ndim != 2 or w.size == 0:
            raise DomainError("weight grid must be a non-empty 2-D array")
        if (w < 0).any():
            raise DomainError("weights must be non-negative")
        object.__setattr__(self, "weights", w)

    @property
    def shape(self) -> tuple[int, int]:
        return self.weights.shape


def _geometric(rng: np.random.Generator, log_q2: float, size) -> np.ndarray:
    # inversion: U uniform on (0, 1], k = floor(log U / log q2)
    u = 1.0 - rng.random(size)
    return np.floor(np.log(u) / log_q2).astype(np.int64)


def sample_weights(params: LppParams, seed) -> WeightGrid:
    """n x m i.i.d. geometric weights with P(w = k) = (1 - q2) q2^k."""
    rng = np.random.default_rng(seed)
    w = _geometric(rng, math.log(float(params.q2)), (params.n, params.m))
    return WeightGrid(w, seed)


def last_passage(grid: WeightGrid) -> tuple[int, list[tuple[int, int]]]:
    """Maximal up-right path weight and one maximising path (1-based sites).

    Ties in the backtracking prefer the predecessor (i, j-1).
    """
    w = grid.weights
    n, m = w.shape
    G = np.zeros((n, m), dtype=np.int64)
    for i in range(n):
        for j in range(m):
            best = 0
            if i and j:
                best = max(G[i - 1, j], G[i, j - 1])
            elif i:
                best = G[i - 1, j]
            elif j:
                best = G[i, j - 1]
            G[i, j] = w[i, j] + best
    path = [(n, m)]
    i, j = n - 1, m - 1
    while i or j:
        if j and (i == 0 or G[i, j - 1] >= G[i - 1, j]):
            j -= 1
        else:
            i -= 1
        path.append((i + 1, j + 1))
    path.reverse()
    return int(G[n - 1, m - 1]), path


def _one_minus_q2_pow(q2, k: int, exact: bool):
    return (1 - Fraction(q2)) ** k if exact else (1 - to_mpf(q2)) ** k


def prob_leq_schur(params: LppParams, *, dps: int | None = None) -> ExactValue:
    ell = params._need_ell()
    n, m = params.n, params.m
    _check_box(m, ell)
    total = schur_pair_sum(n, m, ell, params.q2, dps=dps)
    if params.exact:
        return ExactValue(_one_minus_q2_pow(params.q2, n * m, True) * total, Route.SCHUR_SUM, True)
    with mp.workdps(dps or DEFAULT_DPS):
        return ExactValue(_one_minus_q2_pow(params.q2, n * m, False) * total, Route.SCHUR_SUM, False)


def prob_leq_jue(params: LppParams, *, dps: int | None = None) -> ExactValue:
    ell = params._need_ell()
    n, m = params.n, params.m
    x = 1 - Fraction(params.q2) if params.exact else 1 - to_mpf(params.q2)
    return jue_cdf_max(JueParams(m, n - m, ell), x, dps=dps)


def _meixner_full_moments(a: int, x: Fraction, count: int) -> list[Fraction]:
    """sum_{h>=0} h^s binom(h+a, h) x^h for s < count, in closed form.

    Uses (x d/dx)^s (1-x)^{-(a+1)} = P_s(x) / (1-x)^{a+1+s}.
    """
    out = []
    poly = [1]  # coefficients of P_s in increasing degree
    k = a + 1
    for s in range(count):
        value = sum(Fraction(c) * x**i for i, c in enumerate(poly)) / (1 - x) ** (k + s)
        out.append(value)
        # x P'(1-x) + (k+s) x P
        nxt = [0] * (len(poly) + 1)
        for i, c in enumerate(poly):
            if i:
                nxt[i] += i * c
                nxt[i + 1] -= i * c
            nxt[i + 1] += (k + s) * c
        poly = nxt
    return out


def _meixner_tail_sum(a: int, x, count: int, tail_tol) -> list:
    """Truncated real moments; stop once a geometric tail bound on every moment is below tail_tol."""
    sums = [mpf(0)] * count
    h = 0
    term = mpf(1)  # binom(h+a, h) x^h
    cap = 10**7
    while True:
        hp = mpf(h)
        powers = [hp**s for s in range(count)]
        for s in range(count):
            sums[s] += powers[s] * term
        nxt = term * (h + 1 + a) * x / (h + 1)
        # ratio of successive top-moment terms; once below 1 it decreases in h
        top = nxt * (mpf(h + 1) ** (count - 1))
        cur = term * (hp ** (count - 1) if h else 1)
        if h > 0 and cur > 0:
            rho = top / cur
            if rho < 1 and top / (1 - rho) < tail_tol * max(1, sums[-1]):
                return sums
        h += 1
        term = nxt
        if h > cap:
            raise AccuracyError("Meixner normaliser did not converge; q2 too close to 1 for tail_tol")


def prob_leq_meixner(params: LppParams, tail_tol=None, *, dps: int | None = None) -> ExactValue:
    """Ratio of truncated to full Meixner moment determinants.

    With rational q2 the full moments are summed in closed form, so the
    result is exact; otherwise the normaliser is summed until a geometric
    tail bound drops below ``tail_tol`` (default 10^{-dps/2}).
    """
    ell = params._need_ell()
    n, m = params.n, params.m
    a = n - m
    top = ell + m - 1
    count = 2 * m - 1

    def partial(x):
        sums = [0] * count
        term = 1
        for h in range(top + 1):
            if h:
                term = term * (h + a) * x / h
            for s in range(count):
                sums[s] += h**s * term
        return sums

    if params.exact:
        x = Fraction(params.q2)
        num = partial(x)
        den = _meixner_full_moments(a, x, count)
        hank = lambda v: [[v[j + k] for k in range(m)] for j in range(m)]
        return ExactValue(bareiss_det(hank(num)) / bareiss_det(hank(den)), Route.MEIXNER_DETERMINANT, True)

    dps = dps or DEFAULT_DPS
    with mp.workdps(dps):
        x = to_mpf(params.q2)
        tol = mpf(10) ** (-(dps // 2)) if tail_tol is None else to_mpf(tail_tol)
        num = partial(x)
        den = _meixner_tail_sum(a, x, count, tol)
        hank = lambda v: [[v[j + k] for k in range(m)] for j in range(m)]
        s1, l1 = lu_logdet(hank(num), dps=dps)
        s2, l2 = lu_logdet(hank(den), dps=dps)
        if s1 <= 0 or s2 <= 0:
            raise AccuracyError("Meixner moment determinant lost positivity; raise the precision")
        return ExactValue(mpmath.exp(l1 - l2), Route.MEIXNER_DETERMINANT, False)


def _check_gq(gamma, q):
    if to_mpf(gamma) < 1:
        raise DomainError(f"gamma must be >= 1, got {gamma}")
    if not 0 < to_mpf(q) < 1:
        raise DomainError(f"q must lie in (0, 1), got {q}")


@with_precision
def omega(gamma, q) -> mpf:
    """Law-of-large-numbers constant: G_{gamma N, N} / N -> omega(gamma, q)."""
    _check_gq(gamma, q)
    g, q = to_mpf(gamma), to_mpf(q)
    return (1 + q * mpmath.sqrt(g)) ** 2 / (1 - q**2) - 1


@with_precision
def sigma(gamma, q) -> mpf:
    """Scale of the N^{1/3} fluctuations of G around N omega."""
    _check_gq(gamma, q)
    g, q = to_mpf(gamma), to_mpf(q)
    sg = mpmath.sqrt(g)
    return mpmath.cbrt(q) * g ** (-mpf(1) / 6) * mpmath.cbrt((sg + q) ** 2) * mpmath.cbrt((1 + q * sg) ** 2) / (1 - q**2)


# ---------------------------------------------------------------------------
# Monte Carlo


@dataclass
class TailSummary:
    N: int
    n: int
    gamma: float
    q2: float
    trials: int
    seed: int
    mean_g_over_n: float
    stderr_g_over_n: float
    omega: float
    sigma: float
    hist_edges: list[float]
    hist_counts: list[int]
    leq_freq: dict[float, float] = field(default_factory=dict)
    geq_freq: dict[float, float] = field(default_factory=dict)
    samples: np.ndarray | None = None


def _batch_last_passage(w: np.ndarray) -> np.ndarray:
    """Last-passage times for a stack of grids of shape (T, n, m).

    Row by row: G_row[j] = S_j + max_{k<=j}(G_prev[k] - S_{k-1}) with S the
    prefix sums of the current row.
    """
    T, n, m = w.shape
    prev = np.zeros((T, m), dtype=np.int64)
    for i in range(n):
        s = np.cumsum(w[:, i, :], axis=1)
        shifted = np.empty_like(s)
        shifted[:, 0] = 0
        shifted[:, 1:] = s[:, :-1]
        prev = s + np.maximum.accumulate(prev - shifted, axis=1)
    return prev[:, -1]


def simulate_last_passage(q2: float, n: int, m: int, trials: int, seed: int, batch: int = 64) -> np.ndarray:
    """G_{n,m} for ``trials`` independent grids; trial t uses the stream (seed, t)."""
    log_q2 = math.log(float(q2))
    out = np.empty(trials, dtype=np.int64)
    for start in range(0, trials, batch):
        stop = min(trials, start + batch)
        w = np.empty((stop - start, n, m), dtype=np.int64)
        for t in range(start, stop):
            w[t - start] = _geometric(np.random.default_rng([seed, t]), log_q2, (n, m))
        out[start:stop] = _batch_last_passage(w)
    return out


def monte_carlo_tails(
    q2,
    gamma,
    N: int,
    trials: int,
    seed: int = 0,
    deltas: Sequence = (),
    bins: int = 40,
    convention: str = "floor",
    nshift: int = 0,
    keep_samples: bool = False,
) -> TailSummary:
    """Simulate G_{n,N} with n = floor(gamma N) (or gamma N + nshift) and summarise its tails."""
    if trials < 1:
        raise DomainError("trials must be >= 1")
    n = _row_count(gamma, N, convention, nshift)
    q = math.sqrt(float(q2))
    g = simulate_last_passage(q2, n, N, trials, seed)
    x = g / N
    om = float(omega(gamma, q))
    sg = float(sigma(gamma, q))
    scaled = (g - N * om) / (sg * N ** (1 / 3))
    counts, edges = np.histogram(scaled, bins=bins)
    leq = {float(d): float(np.mean(g <= float(d) * N)) for d in deltas}
    geq = {float(d): float(np.mean(g >= float(d) * N)) for d in deltas}
    return TailSummary(
        N=N,
        n=n,
        gamma=float(gamma),
        q2=float(q2),
        trials=trials,
        seed=seed,
        mean_g_over_n=float(x.mean()),
        stderr_g_over_n=float(x.std(ddof=1) / math.sqrt(trials)) if trials > 1 else float("nan"),
        omega=om,
        sigma=sg,
        hist_edges=edges.tolist(),
        hist_counts=counts.tolist(),
        leq_freq=leq,
        geq_freq=geq,
        samples=g if keep_samples else None,
    )


def _row_count(gamma, N: int, convention: str, nshift: int) -> int:
    """Number of rows of the grid: floor(gamma N), or gamma N + nshift when that is an integer."""
    g = Fraction(gamma) if _exact_input(gamma) else Fraction(str(gamma))
    if convention == "floor":
        return math.floor(g * N)
    if convention == "shift":
        v = g * N + nshift
        if v.denominator != 1:
            raise DomainError(f"gamma*N + nshift = {v} is not an integer")
        return int(v)
    raise DomainError(f"unknown row convention {convention!r}")
