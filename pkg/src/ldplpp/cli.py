"""Command-line entry point: ``ldplpp <command> [flags]``."""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import harness
from .errors import LdplppError, ValidationError
from .numerics import DEFAULT_DPS, parse_number

EXIT_VERIFY_FAILED = 5


def _number(text: str) -> Fraction:
    try:
        return parse_number(text)
    except LdplppError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _n_list(text: str) -> tuple:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad --N-list {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q2", type=_number, help="geometric parameter q^2, as p/q or a decimal")
    common.add_argument("--gamma", type=_number, default=Fraction(1))
    common.add_argument("--delta", type=_number)
    common.add_argument("--nshift", type=_number, default=Fraction(0))
    common.add_argument("--n", type=int)
    common.add_argument("--m", type=int)
    common.add_argument("--ell", type=int)
    common.add_argument("--N-list", dest="N_list", type=_n_list, default=())
    common.add_argument("--trials", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--precision", type=int, default=DEFAULT_DPS, help="working decimal digits")
    common.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="output path (stdout when omitted)")

    parser = argparse.ArgumentParser(prog="ldplpp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", parents=[common], help="P(G_{n,m} <= ell) by the exact routes")
    p.add_argument("--route", choices=("all", *harness.ROUTES), default="all")

    p = sub.add_parser("verify", parents=[common], help="run the identity and duality campaign")
    p.add_argument("--inject-fault", choices=harness.FAULTS, help=argparse.SUPPRESS)

    sub.add_parser("converge", parents=[common], help="lower-tail residuals against exact values")
    sub.add_parser("uptail", parents=[common], help="upper-tail residuals against exact values")

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo last-passage times")
    p.add_argument("--raw", action="store_true", help="emit one row per sample instead of the histogram")
    p.add_argument("--path", action="store_true", help="include one maximising path in the metadata")

    p = sub.add_parser("asymptote", parents=[common], help="expansion coefficients")
    p.add_argument("--kind", choices=("lpp", "tue-weak", "tue-strong", "jue"), default="lpp")
    p.add_argument("--c", type=_number)
    p.add_argument("--z", type=_number)
    p.add_argument("--s", type=int, default=0)
    p.add_argument("--rho", type=_number)
    p.add_argument("--t", type=_number)
    p.add_argument("--alpha", type=_number)
    p.add_argument("--beta", type=_number)
    p.add_argument("--d", type=_number)
    p.add_argument("--regime", choices=("auto", "pre", "post"), default="auto")
    return parser


def config_from_args(ns: argparse.Namespace) -> harness.RunConfig:
    extra = {}
    for key in ("raw", "path", "kind", "c", "z", "s", "rho", "t", "alpha", "beta", "d", "regime"):
        v = getattr(ns, key, None)
        if v is not None and v is not False:
            extra[key] = v
    return harness.RunConfig(
        command=ns.command,
        q2=ns.q2,
        gamma=ns.gamma,
        delta=ns.delta,
        nshift=ns.nshift,
        n=ns.n,
        m=ns.m,
        ell=ns.ell,
        N_list=ns.N_list,
        trials=ns.trials,
        seed=ns.seed,
        precision=ns.precision,
        fmt=ns.fmt,
        out=ns.out,
        route=getattr(ns, "route", "all"),
        extra=extra,
    )


COMMANDS = {
    "exact": harness.cmd_exact,
    "converge": harness.cmd_converge,
    "uptail": harness.cmd_uptail,
    "simulate": harness.cmd_simulate,
    "asymptote": harness.cmd_asymptote,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and ValidationError.exit_code
    cfg = config_from_args(ns)
    try:
        if cfg.command == "verify":
            harness.validate(cfg)
            report = harness.run_verify(cfg, fault=ns.inject_fault)
            meta = harness._meta(cfg)
            harness.write_output(harness.render(report.to_table(meta), cfg.fmt), cfg.out)
            return 0 if report.passed else EXIT_VERIFY_FAILED
        table = COMMANDS[cfg.command](cfg)
        harness.write_output(harness.render(table, cfg.fmt), cfg.out)
        return 0
    except LdplppError as exc:
        print(f"ldplpp {cfg.command}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
