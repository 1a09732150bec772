"""Command line interface: ``fracwave {solve,study,verify}``.

Exit codes: 0 success, 1 failed verification, 2 bad arguments, 3 solver error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .caputo import check_alpha
from .norms import DEFAULT_SAMPLES_PER_CELL, NORM_NAMES
from .problems import PROBLEMS
from .study import StudySpec, parse_dt_rule, run_study, solve_and_measure, time_step, to_csv
from .verify import run_checks

EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_SOLVER = 3


def _norm_list(text: str) -> tuple[str, ...]:
    if text == "all":
        return NORM_NAMES
    names = tuple(s.strip() for s in text.split(",") if s.strip())
    unknown = [s for s in names if s not in NORM_NAMES]
    if unknown or not names:
        raise argparse.ArgumentTypeError(f"norms must be 'all' or a comma list of {', '.join(NORM_NAMES)}")
    return names


def _common(p: argparse.ArgumentParser, multi_n: bool):
    p.add_argument("--problem", default="paper-example", help=f"one of: {', '.join(sorted(PROBLEMS))}")
    p.add_argument("--alpha", type=float, default=1.5, help="fractional order, 1 < alpha < 2")
    if multi_n:
        p.add_argument("--n", type=int, action="append", default=[], help="elements per direction (repeatable)")
    else:
        p.add_argument("--n", type=int, required=True, help="elements per direction")
    p.add_argument("--dt-rule", default="h3", help="h3 (dt = 1/N^3), h (dt = 1/N) or fixed:<dt>")
    p.add_argument("--t-final", type=float, default=1.0)
    p.add_argument("--norms", type=_norm_list, default=NORM_NAMES, help="'all' or e.g. l2,linf")
    p.add_argument("--samples-per-cell", type=int, default=DEFAULT_SAMPLES_PER_CELL)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracwave",
        description="ADI spline collocation solver for the time-fractional diffusion-wave equation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="one solve with error report")
    _common(solve, multi_n=False)
    solve.add_argument("--dump", help="write the final coefficient matrix to this .npy file")

    study = sub.add_parser("study", help="convergence study written as CSV")
    _common(study, multi_n=True)
    study.add_argument("--out", help="CSV path (default: stdout)")

    verify = sub.add_parser("verify", help="run the self-check suite")
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--inject-weight-fault", type=float, default=0.0, help=argparse.SUPPRESS)
    return parser


def _validate(parser, args):
    if args.problem not in PROBLEMS:
        parser.error(f"unknown problem {args.problem!r}; available problems: {', '.join(sorted(PROBLEMS))}")
    try:
        check_alpha(args.alpha)
        parse_dt_rule(args.dt_rule)
    except ValueError as exc:
        parser.error(str(exc))
    if args.samples_per_cell < 2:
        parser.error("--samples-per-cell must be at least 2")
    if args.threads < 1:
        parser.error("--threads must be at least 1")
    if not args.t_final > 0:
        parser.error("--t-final must be positive")


def _fmt(value):
    return "-" if value is None else f"{value:.5e}"


def cmd_solve(args) -> int:
    dt = time_step(args.dt_rule, args.n)
    report, state = solve_and_measure(args.problem, args.alpha, args.n, dt, args.t_final, args.norms,
                                      args.samples_per_cell, args.threads)
    print(f"problem={args.problem} alpha={args.alpha} N={args.n} dt={dt:.6g} steps={state.n}")
    for name in NORM_NAMES:
        if name in args.norms:
            print(f"{name:>6} {_fmt(report.get(name))}")
    if args.dump:
        np.save(args.dump, state.gamma)
    return 0


def cmd_study(args) -> int:
    spec = StudySpec(args.problem, args.alpha, tuple(args.n), args.dt_rule, args.norms,
                     args.samples_per_cell, args.t_final, args.threads)
    text = to_csv(run_study(spec))
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_verify(args) -> int:
    results = run_checks(args.seed, weight_fault=args.inject_weight_fault)
    for r in results:
        print(r.line())
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"verification failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify":
        return cmd_verify(args)
    _validate(parser, args)
    if args.command == "study":
        if not args.n:
            parser.error("study needs at least one --n")
        if any(b <= a for a, b in zip(args.n, args.n[1:])) or min(args.n) < 1:
            parser.error("--n values must be positive and strictly increasing")
    elif args.n < 1:
        parser.error("--n must be positive")
    try:
        return cmd_solve(args) if args.command == "solve" else cmd_study(args)
    except (ValueError, ArithmeticError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
