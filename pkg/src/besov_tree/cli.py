"""Command-line driver.

Subcommands are the nine experiment suites plus three file-based operations::

    besov-tree <suite> [--config FILE] [--seed S] [--depth N] [--out report.csv]
    besov-tree energy --input f.txt --theta T --lambda L --p P [--out report.csv]
    besov-tree extend --mode whitney|alpha|gagliardo --input f.txt --out u.txt
    besov-tree trace --input u.txt --out f.txt

Suite runs exit with status 0 exactly when every declared tolerance passes.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace

from .params import SpaceParams, load_params
from .boundary import (
    AlphaSequence,
    dyadic_energy,
    read_boundary_fn,
    write_boundary_fn,
)
from .extension import alpha_extend, gagliardo_extend, whitney_extend
from .treefn import read_treefn, trace, write_treefn
from .suites import (
    SUITE_NAMES,
    ExperimentConfig,
    emit_report,
    load_experiment_config,
    run_suite,
)

LOG2 = math.log(2.0)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="besov-tree",
        description="dyadic energies and trace/extension experiments on weighted trees",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUITE_NAMES:
        sp = sub.add_parser(name, help=f"run the {name} suite")
        sp.add_argument("--config", help="key=value parameter file")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--depth", type=int, default=None)
        sp.add_argument("--out", help="CSV report path")

    en = sub.add_parser("energy", help="dyadic energy of a boundary function file")
    en.add_argument("--input", required=True)
    en.add_argument("--theta", type=float, required=True)
    en.add_argument("--lambda", dest="lam", type=float, required=True)
    en.add_argument("--p", type=float, required=True)
    en.add_argument("--config", help="optional parameter file (for eps etc.)")
    en.add_argument("--out", help="CSV path (default: stdout)")

    ex = sub.add_parser("extend", help="extend a boundary function into the tree")
    ex.add_argument("--mode", choices=("whitney", "alpha", "gagliardo"), required=True)
    ex.add_argument("--input", required=True)
    ex.add_argument("--out", required=True)
    ex.add_argument("--config", help="optional parameter file")
    ex.add_argument("--alpha-base", type=int, default=2)

    tr = sub.add_parser("trace", help="trace a tree function onto the boundary")
    tr.add_argument("--input", required=True)
    tr.add_argument("--out", required=True)
    return parser


def _file_params(args, K: int, depth: int) -> SpaceParams:
    """Parameters for file operations: from --config, or a borderline default."""
    if getattr(args, "config", None):
        P = load_params(args.config)
        if P.K != K or P.depth != depth:
            P = replace(P, K=K, depth=depth, C=None)
        return P
    return SpaceParams(K=K, eps=LOG2, beta=math.log(K) + LOG2, p=1.0, depth=depth)


def _run_suite_command(args) -> int:
    if args.config:
        cfg = load_experiment_config(args.config, args.command)
    else:
        cfg = ExperimentConfig(suite=args.command)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.depth is not None:
        from .suites import default_params

        params = cfg.params if cfg.params is not None else default_params(args.command)
        cfg = replace(cfg, params=replace(params, depth=args.depth))
    result = run_suite(cfg)
    if args.out:
        emit_report(result, args.out)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(result.to_csv_text())
    for key, value in result.summary:
        print(f"{key} = {value}")
    print(f"suite {result.suite}: {'PASS' if result.passed else 'FAIL'}")
    return 0 if result.passed else 1


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command in SUITE_NAMES:
            return _run_suite_command(args)
        if args.command == "energy":
            f = read_boundary_fn(args.input)
            P = _file_params(args, f.K, f.depth)
            report = dyadic_energy(f, P, theta=args.theta, p=args.p, lam=args.lam)
            if args.out:
                report.write(args.out)
                print(f"wrote {args.out}")
            else:
                sys.stdout.write(report.to_csv_text())
            return 0
        if args.command == "extend":
            f = read_boundary_fn(args.input)
            P = _file_params(args, f.K, f.depth)
            if args.mode == "whitney":
                u = whitney_extend(f, P)
            elif args.mode == "alpha":
                lam = P.lam if P.lam > 0 else 1.0
                P = replace(P, lam=lam, C=None)
                u = alpha_extend(f, AlphaSequence.geometric(args.alpha_base, f.depth), P)
            else:
                u, schedule = gagliardo_extend(f, P)
                sched_path = f"{args.out}.schedule.csv"
                with open(sched_path, "w", encoding="utf-8", newline="") as fh:
                    fh.write(schedule.to_csv_text())
                print(f"wrote {sched_path}")
            write_treefn(u, args.out)
            print(f"wrote {args.out}")
            return 0
        if args.command == "trace":
            u = read_treefn(args.input)
            write_boundary_fn(trace(u), args.out)
            print(f"wrote {args.out}")
            return 0
        raise AssertionError(f"unhandled command {args.command!r}")
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
