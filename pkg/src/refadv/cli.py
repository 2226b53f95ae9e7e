"""Command-line entry point: ``refadv {solve,run,sweep,bounds}``."""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .bounds import BoundInputs, all_bounds
from .config import build_mdp, load_config
from .harness import run_single, run_sweep, trace_csv
from .mdp import load_mdp, solve_optimal


def _cmd_solve(args):
    spec = load_mdp(args.mdp)
    sol = solve_optimal(spec)
    with np.printoptions(precision=6, suppress=True):
        print("Vstar (rows h=1..H):")
        print(sol.Vstar[: spec.H])
    print(f"delta_min: {sol.delta_min!r}")
    print(f"qvar_max: {sol.qvar_max!r}")
    print(f"d_opt_size: {sol.d_opt_size}")
    print(f"d_opt_complement_size: {sol.d_opt_complement_size}")


def _cmd_run(args):
    cfg = load_config(args.config)
    out = args.output or cfg.output
    record, row = run_single(cfg)
    text = trace_csv(record)
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)
        print(f"total_regret={row['total_regret']!r} n_switch={row['n_switch']} "
              f"trace={out}")


def _cmd_sweep(args):
    cfg = load_config(args.config)
    _, rows = run_sweep(cfg, args.beta, args.seeds, args.out, n_jobs=args.jobs)
    print(f"{len(rows)} runs written to {args.out}")


def _cmd_bounds(args):
    cfg = load_config(args.config)
    spec = build_mdp(cfg)
    sol = solve_optimal(spec)
    inputs = BoundInputs.from_solution(spec, sol, T=cfg.K * spec.H, beta=cfg.beta,
                                       delta=cfg.delta)
    print(f"T: {cfg.K * spec.H}")
    for name, value in all_bounds(inputs).items():
        print(f"{name}_shape_only: {value!r}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="refadv",
        description="Tabular Q-learning with reference-advantage decomposition.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an MDP file exactly")
    p.add_argument("mdp")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("run", help="run one experiment and emit its trace CSV")
    p.add_argument("config")
    p.add_argument("-o", "--output", help="trace CSV path ('-' for stdout)")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("sweep", help="run a beta x seed grid")
    p.add_argument("config")
    p.add_argument("--beta", type=float, nargs="+", required=True)
    p.add_argument("--seeds", type=int, nargs="+", required=True)
    p.add_argument("--out", default="sweep_out", help="output directory")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("bounds", help="print bound values for a config")
    p.add_argument("config")
    p.set_defaults(func=_cmd_bounds)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ValueError, OSError) as exc:
        print(f"refadv: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
