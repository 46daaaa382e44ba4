"""Verification campaigns, convergence tables and output writers behind the ``ldplpp`` CLI.

Every command is a plain function returning a :class:`Table` (metadata plus
rows) or a :class:`VerificationReport`, so the same numbers are reachable
from tests without going through the command line.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import mpmath
from mpmath import mp, mpf

from . import __version__
from .asymptotics import (
    INTEGRAL_IDENTITIES,
    Expansion,
    integral_closed_form,
    integral_quadrature,
    lower_tail_rect,
    lower_tail_square,
    tue_strong_expansion,
    tue_weak_expansion,
    upper_tail,
    jue_ldp,
)
from .ensembles import JueParams, jue_cdf_max, lpp_tue_constant, tue_char_moment, verify_schur_identities
from .equilibrium import closed_form_mfrak, constrained_density, solve_mfrak
from .errors import RegimeError, ValidationError
from .lpp import (
    LppParams,
    last_passage,
    monte_carlo_tails,
    omega,
    prob_leq_jue,
    prob_leq_meixner,
    prob_leq_schur,
    sample_weights,
)
from .numerics import DEFAULT_DPS, MIN_DPS, to_mpf

ROUTES = {"schur": prob_leq_schur, "jue": prob_leq_jue, "meixner": prob_leq_meixner}
FAULTS = ("duality-constant",)


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class RunConfig:
    command: str
    q2: Fraction | None = None
    gamma: Fraction = Fraction(1)
    delta: Fraction | None = None
    nshift: Fraction = Fraction(0)
    n: int | None = None
    m: int | None = None
    ell: int | None = None
    N_list: tuple = ()
    trials: int = 1
    seed: int = 0
    precision: int = DEFAULT_DPS
    fmt: str = "json"
    out: str | None = None
    route: str = "all"
    extra: dict = field(default_factory=dict)

    def params(self) -> dict:
        """Parameter echo for output metadata."""
        keys = ("q2", "gamma", "delta", "nshift", "n", "m", "ell", "N_list", "trials", "seed", "route")
        echo = {k: _plain(getattr(self, k)) for k in keys}
        echo.update({k: _plain(v) for k, v in self.extra.items()})
        return echo


def _plain(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, tuple):
        return [_plain(x) for x in v]
    return v


def validate(cfg: RunConfig) -> None:
    """Reject malformed configurations before any computation starts."""
    if cfg.precision < MIN_DPS:
        raise ValidationError(f"--precision must be at least {MIN_DPS}")
    if cfg.fmt not in ("json", "csv"):
        raise ValidationError("--format must be json or csv")
    if cfg.q2 is not None and not 0 < cfg.q2 < 1:
        raise ValidationError(f"q2 must lie in (0, 1), got {cfg.q2}")
    if cfg.gamma < 1:
        raise ValidationError("gamma must be >= 1")
    if cfg.delta is not None and cfg.delta <= 0:
        raise ValidationError("delta must be positive")
    if list(cfg.N_list) != sorted(set(cfg.N_list)) or any(N < 1 for N in cfg.N_list):
        raise ValidationError("--N-list must be strictly ascending positive integers")
    need = {
        "exact": ("q2", "n", "m", "ell"),
        "converge": ("q2", "delta"),
        "uptail": ("q2", "delta"),
        "simulate": ("q2",),
    }.get(cfg.command, ())
    missing = [k for k in need if getattr(cfg, k) is None]
    if missing:
        raise ValidationError(f"{cfg.command} needs --{' --'.join(missing)}")
    if cfg.command == "exact":
        if min(cfg.n, cfg.m) < 1 or cfg.ell < 0:
            raise ValidationError("need n, m >= 1 and ell >= 0")
        if cfg.route not in ("all", *ROUTES):
            raise ValidationError(f"unknown route {cfg.route!r}")
    if cfg.command in ("converge", "uptail") and not cfg.N_list:
        raise ValidationError(f"{cfg.command} needs --N-list")
    if cfg.command == "simulate" and cfg.trials < 1:
        raise ValidationError("trials must be >= 1")


# ---------------------------------------------------------------------------
# tables and serialisation


@dataclass
class Table:
    meta: dict
    rows: list[dict]

    def to_dict(self) -> dict:
        return {"meta": self.meta, "rows": self.rows}


def fmt_value(v, digits: int = 30):
    """JSON-safe rendering: exact rationals as 'p/q', reals as decimal strings."""
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else v.numerator
    if isinstance(v, float):
        return v
    if isinstance(v, (mpf, mpmath.mpc)):
        return mpmath.nstr(v, digits)
    if isinstance(v, dict):
        return {k: fmt_value(x, digits) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [fmt_value(x, digits) for x in v]
    return str(v)


def _meta(cfg: RunConfig, **more) -> dict:
    meta = {"tool": "ldplpp", "version": __version__, "command": cfg.command, "precision": cfg.precision, "seed": cfg.seed}
    meta["params"] = cfg.params()
    meta.update(more)
    return meta


def render(table: Table, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(fmt_value(table.to_dict()), indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    for key, value in table.meta.items():
        buf.write(f"# {key}: {json.dumps(fmt_value(value))}\n")
    fields: list[str] = []
    for row in table.rows:
        for k in row:
            if k not in fields:
                fields.append(k)
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in table.rows:
        writer.writerow({k: _csv_cell(fmt_value(v)) for k, v in row.items()})
    return buf.getvalue()


def _csv_cell(v):
    return json.dumps(v) if isinstance(v, (list, dict)) else v


def write_output(text: str, out: str | None) -> None:
    if out is None:
        print(text, end="")
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# exact


def cmd_exact(cfg: RunConfig) -> Table:
    validate(cfg)
    params = LppParams(cfg.q2, cfg.n, cfg.m, cfg.ell)
    routes = list(ROUTES) if cfg.route == "all" else [cfg.route]
    rows = []
    for name in routes:
        v = ROUTES[name](params, dps=cfg.precision)
        rows.append(
            {
                "route": v.route.value,
                "value": v.value,
                "decimal": v.as_mpf(cfg.precision),
                "certified_exact": v.certified_exact,
            }
        )
    return Table(_meta(cfg), rows)


# ---------------------------------------------------------------------------
# verification


@dataclass
class CheckRecord:
    name: str
    anchor: str
    status: str
    max_deviation: float
    runtime_s: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"


@dataclass
class VerificationReport:
    checks: list[CheckRecord]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": [asdict(c) for c in self.checks]}

    @classmethod
    def from_dict(cls, data: dict) -> "VerificationReport":
        report = cls([CheckRecord(**c) for c in data["checks"]])
        if report.passed != data["passed"]:
            raise ValidationError("report 'passed' flag disagrees with its checks")
        return report

    def to_table(self, meta: dict) -> Table:
        return Table({**meta, "passed": self.passed}, [asdict(c) for c in self.checks])


def _timed(name: str, anchor: str, fn: Callable[[], tuple]) -> CheckRecord:
    t0 = time.perf_counter()
    ok, dev, detail = fn()
    return CheckRecord(name, anchor, "pass" if ok else "fail", float(dev), round(time.perf_counter() - t0, 4), detail)


def duality_grid(
    max_n: int = 5,
    max_ell: int = 5,
    q2_values: Sequence = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)),
    fault: str | None = None,
) -> tuple[bool, int, str]:
    """Exact agreement of Schur sum, JUE ratio and c (1-q^2)^{nm} times the TUE moment.

    Returns (all equal, number of mismatching grid points, description of the first mismatch).
    """
    mismatches, first = 0, ""
    for q2 in q2_values:
        q2 = Fraction(q2)
        for n in range(1, max_n + 1):
            for m in range(1, n + 1):
                for ell in range(0, max_ell + 1):
                    p = LppParams(q2, n, m, ell)
                    schur = prob_leq_schur(p).value
                    jue = prob_leq_jue(p).value
                    const = lpp_tue_constant(ell, n, m)
                    if fault == "duality-constant":
                        const *= 1 + Fraction(1, 2**53)
                    tue = const * (1 - q2) ** (n * m) * tue_char_moment(ell, n, m, q2).value
                    if not (schur == jue == tue):
                        mismatches += 1
                        first = first or f"q2={q2} n={n} m={m} ell={ell}"
    return mismatches == 0, mismatches, first


INTEGRAL_GRID = {
    "log_over_x": [dict(a=Fraction(1, 4), b=1, t=1), dict(a=Fraction(1, 10), b=Fraction(1, 2), t=2), dict(a=Fraction(1, 3), b=Fraction(9, 10), t=Fraction(-1, 2))],
    "log_over_one_minus_x": [dict(a=Fraction(1, 4), b=Fraction(3, 4), t=1), dict(a=Fraction(1, 10), b=Fraction(1, 2), t=2), dict(a=Fraction(1, 3), b=Fraction(9, 10), t=Fraction(-1, 2))],
    "hilbert_of_log": [dict(a=Fraction(1, 4), b=1, t=1, x=Fraction(1, 2)), dict(a=Fraction(1, 10), b=Fraction(1, 2), t=2, x=Fraction(1, 5)), dict(a=Fraction(1, 3), b=Fraction(9, 10), t=Fraction(-1, 2), x=Fraction(8, 9))],
    "log_double": [dict(a=Fraction(1, 4), b=1, t=1), dict(a=Fraction(1, 10), b=Fraction(1, 2), t=2), dict(a=Fraction(1, 3), b=Fraction(9, 10), t=Fraction(-1, 2))],
    "arcsine_log": [dict(d=Fraction(3, 4)), dict(d=Fraction(1, 10)), dict(d=Fraction(19, 20))],
    "arcsine_log_over": [dict(d=Fraction(3, 4)), dict(d=Fraction(1, 10)), dict(d=Fraction(19, 20))],
    "hard_edge_potential": [dict(beta=2, d=Fraction(3, 4)), dict(beta=Fraction(1, 2), d=Fraction(1, 2)), dict(beta=5, d=Fraction(1, 5))],
    "soft_edge_potential": [dict(alpha=1, beta=1, d=Fraction(1, 2)), dict(alpha=2, beta=Fraction(1, 2), d=Fraction(3, 4)), dict(alpha=Fraction(1, 2), beta=3, d=Fraction(1, 5))],
}


def integral_suite(tol: float = 1e-10, dps: int = 40) -> tuple[bool, float, str]:
    """Every closed-form integral against its quadrature evaluation on a three-point grid."""
    worst, where = mpf(0), ""
    for which in INTEGRAL_IDENTITIES:
        for params in INTEGRAL_GRID[which]:
            closed = integral_closed_form(which, dps=dps, **params)
            quad = integral_quadrature(which, dps=dps, **params)
            dev = abs(closed - quad) / max(1, abs(closed))
            if dev > worst:
                worst, where = dev, f"{which} {params}"
    return worst < tol, worst, where


MFRAK_GRID = (
    tuple(Fraction(g) for g in ("3/2", "2", "3", "5", "8")),
    tuple(Fraction(d) for d in ("1/4", "1/2", "1", "2", "4")),
    tuple(Fraction(q) for q in ("1/10", "1/4", "1/2", "7/10", "9/10")),
)


def mfrak_dual_route(tol: float = 1e-12, dps: int = DEFAULT_DPS) -> tuple[bool, float, str]:
    """Root solve against the closed form over the pushed points of a 5x5x5 grid."""
    worst, count = mpf(0), 0
    for g in MFRAK_GRID[0]:
        for dl in MFRAK_GRID[1]:
            for q in MFRAK_GRID[2]:
                try:
                    a = solve_mfrak(g, dl, q, dps=dps)
                except RegimeError:
                    continue
                b = closed_form_mfrak(g, dl, q, dps=dps)
                worst = max(worst, abs(a - b))
                count += 1
    return worst < tol and count > 0, worst, f"{count} pushed grid points"


def normalisation_suite(tol: float = 1e-10, dps: int = 40) -> tuple[bool, float, str]:
    """Total mass of Wachter and both pushed measures."""
    worst, count = mpf(0), 0
    for alpha in (0, Fraction(1, 2), 1, 3):
        for beta in (Fraction(1, 2), 1, 4):
            for d in (Fraction(1, 5), Fraction(1, 2), Fraction(99, 100)):
                mu = constrained_density(alpha, beta, d, dps=dps)
                worst = max(worst, abs(mu.mass(dps=dps) - 1))
                count += 1
    return worst < tol, worst, f"{count} measures"


def run_verify(cfg: RunConfig | None = None, fault: str | None = None) -> VerificationReport:
    checks = [
        _timed("duality_grid", "LPP = Schur sum = JUE ratio = scaled TUE moment", lambda: duality_grid(fault=fault)),
    ]
    t0 = time.perf_counter()
    identities = verify_schur_identities()
    share = round((time.perf_counter() - t0) / len(identities), 4)
    for ic in identities:
        status = "pass" if ic.passed else "fail"
        checks.append(CheckRecord(ic.name, ic.anchor, status, float(ic.max_deviation), share, ic.detail or "runtime shared across the identity suite"))
    checks.append(_timed("integral_identities", "closed-form integrals vs quadrature", integral_suite))
    checks.append(_timed("mfrak_dual_route", "soft edge: root solve vs closed form", mfrak_dual_route))
    checks.append(_timed("measure_normalisation", "equilibrium measures have unit mass", normalisation_suite))
    return VerificationReport(checks)


# ---------------------------------------------------------------------------
# convergence tables


def _rows_for(gamma: Fraction, N: int, nshift: Fraction) -> int:
    n = gamma * N + nshift
    if n.denominator != 1:
        raise ValidationError(f"gamma*N + nshift = {n} is not an integer at N={N}")
    return int(n)


def lower_expansion(q2, gamma, delta, nshift, dps: int) -> Expansion:
    q = mpmath.sqrt(to_mpf(q2))
    if gamma == 1:
        return lower_tail_square(q, delta, nshift, dps=dps)
    return lower_tail_rect(q, gamma, delta, nshift, dps=dps)


def converge_rows(q2, gamma, delta, nshift, N_list: Iterable[int], base_dps: int = DEFAULT_DPS) -> list[dict]:
    """Exact log P(G_{gamma N + n, N} <= floor(delta N)) against the lower-tail expansion."""
    q2, gamma, delta, nshift = Fraction(q2), Fraction(gamma), Fraction(delta), Fraction(nshift)
    exp_ = lower_expansion(q2, gamma, delta, nshift, base_dps)
    rows = []
    for N in N_list:
        dps = max(base_dps, 8 * N)
        n = _rows_for(gamma, N, nshift)
        ell = math.floor(delta * N)
        with mp.workdps(dps):
            p = jue_cdf_max(JueParams(N, n - N, ell), 1 - q2, dps=dps)
            exact = p.log(dps)
            asym = exp_.evaluate(N)
            r = exact - asym
            rows.append(
                {
                    "N": N,
                    "n": n,
                    "ell": ell,
                    "delta_N": Fraction(ell, N),
                    "precision": dps,
                    "exact_log_p": +exact,
                    "asymptotic": +asym,
                    "residual": +r,
                    "normalized_residual": r * N / mpmath.log(N) if N > 1 else None,
                }
            )
    return rows


def cmd_converge(cfg: RunConfig) -> Table:
    validate(cfg)
    exp_ = lower_expansion(cfg.q2, cfg.gamma, cfg.delta, cfg.nshift, cfg.precision)
    rows = converge_rows(cfg.q2, cfg.gamma, cfg.delta, cfg.nshift, cfg.N_list, cfg.precision)
    coeffs = dict(zip(("c2", "c1", "clog", "c0"), exp_.as_tuple()))
    return Table(_meta(cfg, regime=exp_.regime.value, coefficients=coeffs), rows)


def uptail_rows(q2, gamma, delta, nshift, N_list: Iterable[int], base_dps: int = DEFAULT_DPS) -> list[dict]:
    """Exact log P(G >= floor(delta N)) = log(1 - P(G <= floor(delta N) - 1)) against the upper-tail expansion."""
    q2, gamma, delta, nshift = Fraction(q2), Fraction(gamma), Fraction(delta), Fraction(nshift)
    q = mpmath.sqrt(to_mpf(q2))
    U = upper_tail(q, gamma, delta, nshift, dps=base_dps)
    rows = []
    for N in N_list:
        dps = max(base_dps, 8 * N)
        n = _rows_for(gamma, N, nshift)
        ell = math.floor(delta * N)
        with mp.workdps(dps):
            p = jue_cdf_max(JueParams(N, n - N, ell - 1), 1 - q2, dps=dps)
            tail = 1 - p.value if p.certified_exact else 1 - p.as_mpf(dps)
            exact = mpmath.log(to_mpf(tail))
            asym = U.evaluate(N)
            rows.append(
                {
                    "N": N,
                    "n": n,
                    "threshold": ell,
                    "delta_N": Fraction(ell, N),
                    "precision": dps,
                    "exact_log_p": +exact,
                    "U1": U.c1,
                    "U2": U.clog,
                    "U3": U.c0,
                    "asymptotic": +asym,
                    "residual": +(exact - asym),
                }
            )
    return rows


def cmd_uptail(cfg: RunConfig) -> Table:
    validate(cfg)
    q = mpmath.sqrt(to_mpf(cfg.q2))
    om = omega(cfg.gamma, q, dps=cfg.precision)
    if to_mpf(cfg.delta) <= om:
        raise RegimeError(f"upper tail needs delta > omega = {mpmath.nstr(om, 12)}")
    rows = uptail_rows(cfg.q2, cfg.gamma, cfg.delta, cfg.nshift, cfg.N_list, cfg.precision)
    return Table(_meta(cfg, omega=om), rows)


# ---------------------------------------------------------------------------
# simulation


def cmd_simulate(cfg: RunConfig) -> Table:
    """Monte Carlo summary; rows are histogram bins, or raw samples with ``raw=True``."""
    validate(cfg)
    N = cfg.N_list[0] if cfg.N_list else (cfg.m or 100)
    deltas = [cfg.delta] if cfg.delta is not None else []
    raw = bool(cfg.extra.get("raw"))
    s = monte_carlo_tails(
        float(cfg.q2), cfg.gamma, N, cfg.trials, seed=cfg.seed, deltas=[float(d) for d in deltas], keep_samples=raw
    )
    scaled_mean = (s.mean_g_over_n - s.omega) * N ** (2 / 3) / s.sigma
    summary = {
        "N": s.N,
        "rows_n": s.n,
        "mean_g_over_n": s.mean_g_over_n,
        "stderr_g_over_n": s.stderr_g_over_n,
        "omega": s.omega,
        "sigma": s.sigma,
        "mean_scaled": scaled_mean,
        "leq_freq": {str(k): v for k, v in s.leq_freq.items()},
        "geq_freq": {str(k): v for k, v in s.geq_freq.items()},
    }
    if cfg.extra.get("path"):
        grid = sample_weights(LppParams(float(cfg.q2), s.n, N), cfg.seed)
        G, path = last_passage(grid)
        summary["path_seed"] = cfg.seed
        summary["path_last_passage"] = G
        summary["path"] = [list(p) for p in path]
    if raw:
        rows = [{"trial": i, "G": int(g)} for i, g in enumerate(s.samples)]
    else:
        e = s.hist_edges
        rows = [{"left": e[i], "right": e[i + 1], "count": c} for i, c in enumerate(s.hist_counts)]
    return Table(_meta(cfg, summary=summary), rows)


# ---------------------------------------------------------------------------
# asymptotic coefficients


def cmd_asymptote(cfg: RunConfig) -> Table:
    """Coefficients of the applicable expansion, evaluated at each N in the list.

    ``extra['kind']`` selects lpp (default, regime chosen from delta vs omega),
    tue-weak, tue-strong or jue.
    """
    validate(cfg)
    kind = cfg.extra.get("kind", "lpp")
    dps = cfg.precision
    x = cfg.extra
    if kind == "lpp":
        if cfg.q2 is None or cfg.delta is None:
            raise ValidationError("asymptote needs --q2 and --delta")
        q = mpmath.sqrt(to_mpf(cfg.q2))
        if to_mpf(cfg.delta) < omega(cfg.gamma, q, dps=dps):
            E = lower_expansion(cfg.q2, cfg.gamma, cfg.delta, cfg.nshift, dps)
        else:
            E = upper_tail(q, cfg.gamma, cfg.delta, cfg.nshift, dps=dps)
    elif kind == "tue-weak":
        E = tue_weak_expansion(x["c"], x["z"], int(x.get("s", 0)), x.get("regime", "auto"), dps=dps)
    elif kind == "tue-strong":
        E = tue_strong_expansion(x["c"], x["rho"], x["z"], x.get("t", 0), x.get("regime", "auto"), dps=dps)
    elif kind == "jue":
        E = jue_ldp(x["alpha"], x["beta"], x["d"], x.get("t"), dps=dps)
    else:
        raise ValidationError(f"unknown expansion kind {kind!r}")
    coeffs = dict(zip(("c2", "c1", "clog", "c0"), E.as_tuple()))
    rows = [{"N": N, "value": E.evaluate(N)} for N in cfg.N_list]
    return Table(_meta(cfg, regime=E.regime.value, remainder=E.remainder_note, coefficients=coeffs), rows)
