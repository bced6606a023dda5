"""Command-line front end.

Exit codes: 0 success, 1 bad configuration or input file, 2 numerical or
structural failure during the run.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from . import experiments
from .exceptions import (
    BadBracketError,
    CheckpointError,
    ConfigError,
    DegenerateLayerError,
    InvalidPartitionError,
    NotInteriorError,
    SolverFailedError,
    StepSizeError,
)

_CONFIG_ERRORS = (ConfigError, CheckpointError, InvalidPartitionError)
_NUMERICAL_ERRORS = (
    SolverFailedError,
    StepSizeError,
    DegenerateLayerError,
    BadBracketError,
    NotInteriorError,
    FloatingPointError,
)


def _add_solver_overrides(p: argparse.ArgumentParser) -> None:
    p.add_argument("--solver", choices=["newton", "bisection", "adaprox"], default=None)
    p.add_argument("--prox-tol", type=float, default=None)
    p.add_argument("--prox-max-iters", type=int, default=None)


def _apply_overrides(cfg, args) -> None:
    updates = {}
    if args.solver is not None:
        updates["method"] = args.solver
    if args.prox_tol is not None:
        updates["tolerance"] = args.prox_tol
    if args.prox_max_iters is not None:
        updates["max_iters"] = args.prox_max_iters
    if updates:
        cfg.solver = dataclasses.replace(cfg.solver, **updates)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="groupprox",
        description="Structured-sparsity training with exact group proximal updates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="run a training experiment from a JSON config")
    p_train.add_argument("config")
    _add_solver_overrides(p_train)

    p_bench = sub.add_parser(
        "bench-solvers", help="run training while benchmarking all prox solvers"
    )
    p_bench.add_argument("config")
    _add_solver_overrides(p_bench)

    p_prune = sub.add_parser("prune", help="structurally prune a network checkpoint")
    p_prune.add_argument("checkpoint")
    p_prune.add_argument("--groups", choices=["row", "column"], default="row")
    p_prune.add_argument("--zero-tol", type=float, default=0.0)
    p_prune.add_argument("--out", default="out")

    p_check = sub.add_parser(
        "prox-check", help="certify prox solutions against a brute-force oracle"
    )
    p_check.add_argument("--n", type=int, default=500)
    p_check.add_argument("--seed", type=int, default=7)
    p_check.add_argument(
        "--penalty", choices=["mixed_l1l2", "group_mcp"], default="mixed_l1l2"
    )
    p_check.add_argument("--tolerance", type=float, default=1e-6)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "train":
            cfg = experiments.ExperimentConfig.from_file(args.config)
            _apply_overrides(cfg, args)
            summary = experiments.train(cfg)
            out = experiments.resolve_output_dir(cfg.output_dir)
            print(f"wrote {out}/metrics.csv, {out}/summary.json, {out}/{summary['checkpoint']}")
            print(
                f"final objective {summary['final_objective']:.6g}, "
                f"group sparsity {summary['group_sparsity']:.3f} "
                f"({summary['exact_zero_groups']}/{summary['n_groups']} groups exactly zero)"
            )
        elif args.command == "bench-solvers":
            cfg = experiments.ExperimentConfig.from_file(args.config)
            _apply_overrides(cfg, args)
            summary = experiments.bench_solvers(cfg)
            out = experiments.resolve_output_dir(cfg.output_dir)
            means = summary["mean_iters_per_group"]
            print(f"wrote {out}/bench.csv, {out}/summary.json")
            print(
                "mean iterations per group: "
                f"newton {means['newton']:.3f}, bisection {means['bisection']:.3f}, "
                f"adaprox {means['adaprox']:.3f}"
            )
        elif args.command == "prune":
            doc = experiments.prune_checkpoint(
                args.checkpoint, args.groups, args.zero_tol, args.out
            )
            out = experiments.resolve_output_dir(args.out)
            print(f"wrote {out}/pruned.ckpt, {out}/prune_report.json, {out}/prune_report.csv")
            print(
                f"params {doc['original_params']} -> {doc['pruned_params']}, "
                f"max output deviation {doc['max_output_deviation']:.3e}"
            )
        else:  # prox-check
            doc = experiments.prox_check(args.n, args.seed, args.penalty, args.tolerance)
            print(json.dumps(doc, indent=2, sort_keys=True))
            # status goes to stderr so stdout stays a single JSON document
            if not doc["passed"]:
                print("prox-check FAILED", file=sys.stderr)
                return 2
            print("prox-check passed", file=sys.stderr)
    except _CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
