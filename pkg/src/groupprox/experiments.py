"""Experiment configuration, training/benchmark drivers, and artifacts.

One JSON document describes an experiment end to end: problem, penalty,
partition, optimizer, and run budget. Runs write ``metrics.csv`` (stable
header, repr-formatted floats, byte-identical across replays with the same
config and kernel backend), a final checkpoint, and ``summary.json`` (which
carries wall time and is therefore not byte-stable).

The environment variable ``GROUPPROX_OUT`` overrides every output directory.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .exceptions import ConfigError
from .groups import GroupPartition, validate_partition
from .network import (
    LayeredNetwork,
    column_groups,
    generate_teacher_student,
    load_checkpoint,
    network_forward,
    network_loss_and_grad,
    row_groups,
    save_checkpoint,
    save_param_checkpoint,
)
from .optimizer import (
    LRSchedule,
    OptimizerState,
    PreconditionerRule,
    ProxGenConfig,
    ProxTolSchedule,
    group_sparsity,
    proxgen_step,
    stationarity_residual,
    subgradient_step,
)
from .penalties import GROUP_MCP, PenaltyConfig, penalty_value
from .problems import generate_group_sparse_regression
from .pruning import (
    functional_equivalence_check,
    propagate_and_prune,
    zero_group_masks,
)
from .solvers import SolverConfig, adaprox_solve
from .weighted_prox import weighted_prox_l2, weighted_prox_mcp_l2

METRICS_HEADER = (
    "step,loss,penalty,objective,group_sparsity,mean_prox_iters,stationarity_residual"
)
BENCH_HEADER = "step,newton_iters_per_group,bisection_iters_per_group,adaprox_iters_per_group"

OUT_ENV = "GROUPPROX_OUT"

SUBGRADIENT_ZERO_TOLS = (1e-8, 1e-4, 1e-2)


def _fmt(x) -> str:
    return repr(float(x))


def resolve_output_dir(configured: str) -> str:
    return os.environ.get(OUT_ENV, configured)


def _require(doc: dict, key: str, ctx: str):
    if key not in doc:
        raise ConfigError(f"missing {ctx} key: {key!r}")
    return doc[key]


def _reject_unknown(doc: dict, allowed, ctx: str):
    extra = set(doc) - set(allowed)
    if extra:
        raise ConfigError(f"unknown {ctx} keys: {sorted(extra)}")


@dataclass
class ExperimentConfig:
    seed: int
    problem: dict
    penalty: PenaltyConfig
    partition_spec: object
    rule: PreconditionerRule
    lr: LRSchedule
    solver: SolverConfig
    mode: str
    prox_tol: ProxTolSchedule
    mcp_step_policy: str
    steps: int
    minibatch_size: int | None
    output_dir: str
    stationarity_every: int = 10

    @staticmethod
    def from_dict(doc: dict) -> "ExperimentConfig":
        try:
            return _parse_config(doc)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc

    @staticmethod
    def from_file(path: str) -> "ExperimentConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError("config root must be a JSON object")
        return ExperimentConfig.from_dict(doc)


def _parse_config(doc: dict) -> ExperimentConfig:
    _reject_unknown(
        doc,
        {
            "seed",
            "problem",
            "penalty",
            "partition",
            "optimizer",
            "steps",
            "minibatch_size",
            "output_dir",
            "stationarity_every",
        },
        "config",
    )
    opt = _require(doc, "optimizer", "config")
    _reject_unknown(
        opt,
        {
            "rule",
            "mu",
            "beta1",
            "beta2",
            "eps_stability",
            "momentum_decay",
            "lr",
            "mode",
            "solver",
            "prox_tol",
            "mcp_step_policy",
        },
        "optimizer",
    )
    rule = PreconditionerRule(
        kind=_require(opt, "rule", "optimizer"),
        mu=float(opt.get("mu", 0.9)),
        beta1=float(opt.get("beta1", 0.9)),
        beta2=float(opt.get("beta2", 0.999)),
        eps_stability=float(opt.get("eps_stability", 1e-8)),
        momentum_decay=(
            float(opt["momentum_decay"]) if opt.get("momentum_decay") is not None else None
        ),
    )
    lr_doc = _require(opt, "lr", "optimizer")
    lr = LRSchedule(kind=_require(lr_doc, "kind", "lr"), alpha0=float(_require(lr_doc, "alpha0", "lr")))
    sol_doc = opt.get("solver", {})
    _reject_unknown(
        sol_doc, {"method", "tolerance", "max_iters", "fallback_to_bisection"}, "solver"
    )
    solver = SolverConfig(
        method=sol_doc.get("method", "newton"),
        tolerance=float(sol_doc.get("tolerance", 1e-6)),
        max_iters=int(sol_doc.get("max_iters", 100)),
        fallback_to_bisection=bool(sol_doc.get("fallback_to_bisection", True)),
    )
    tol_doc = opt.get("prox_tol", {"kind": "constant"})
    _reject_unknown(tol_doc, {"kind", "eps0", "power"}, "prox_tol")
    prox_tol = ProxTolSchedule(
        kind=tol_doc.get("kind", "constant"),
        eps0=float(tol_doc["eps0"]) if "eps0" in tol_doc else None,
        power=float(tol_doc.get("power", 1.0)),
    )
    mb = doc.get("minibatch_size")
    return ExperimentConfig(
        seed=int(_require(doc, "seed", "config")),
        problem=_require(doc, "problem", "config"),
        penalty=PenaltyConfig.from_dict(_require(doc, "penalty", "config")),
        partition_spec=doc.get("partition", "generator"),
        rule=rule,
        lr=lr,
        solver=solver,
        mode=opt.get("mode", "proximal"),
        prox_tol=prox_tol,
        mcp_step_policy=opt.get("mcp_step_policy", "raise"),
        steps=int(_require(doc, "steps", "config")),
        minibatch_size=int(mb) if mb is not None else None,
        output_dir=str(doc.get("output_dir", "out")),
        stationarity_every=int(doc.get("stationarity_every", 10)),
    )


@dataclass
class TrainTask:
    """Uniform handle over the concrete problem behind a config."""

    x0: np.ndarray
    loss_and_grad: object  # callable (x, batch) -> (loss, grad)
    n_samples: int
    partition: GroupPartition
    save_final: object  # callable (dir, x) -> filename
    true_support: np.ndarray | None = None
    kind: str = "regression"


def _build_task(cfg: ExperimentConfig) -> TrainTask:
    prob = cfg.problem
    if not isinstance(prob, dict):
        raise ConfigError("problem must be an object")
    if "checkpoint" in prob:
        _reject_unknown(prob, {"checkpoint", "n_samples", "noise_sigma"}, "problem")
        net = load_checkpoint(prob["checkpoint"])
        n_samples = int(prob.get("n_samples", 512))
        sigma = float(prob.get("noise_sigma", 0.0))
        rng = np.random.default_rng(cfg.seed)
        U = rng.standard_normal((n_samples, net.input_dim))
        Y = network_forward(net, U) + sigma * rng.standard_normal(
            (n_samples, net.output_dim)
        )
        return _network_task(cfg, net, U, Y)

    gen = _require(prob, "generator", "problem")
    if gen == "group_sparse_regression":
        _reject_unknown(
            prob,
            {"generator", "n_groups", "group_size", "n_active", "n_samples", "noise_sigma"},
            "problem",
        )
        p = generate_group_sparse_regression(
            n_groups=int(prob.get("n_groups", 50)),
            group_size=int(prob.get("group_size", 5)),
            n_active=int(prob.get("n_active", 10)),
            n_samples=int(prob.get("n_samples", 600)),
            noise_sigma=float(prob.get("noise_sigma", 0.01)),
            seed=cfg.seed,
        )

        def save_final(out_dir, x):
            save_param_checkpoint(os.path.join(out_dir, "final.ckpt"), x)
            return "final.ckpt"

        partition = _resolve_partition(cfg, p.partition, None, p.n_params)
        return TrainTask(
            x0=np.zeros(p.n_params),
            loss_and_grad=p.loss_and_grad,
            n_samples=p.n_samples,
            partition=partition,
            save_final=save_final,
            true_support=p.true_support,
        )
    if gen == "mlp_teacher_student":
        _reject_unknown(
            prob,
            {"generator", "widths", "n_samples", "noise_sigma", "activation"},
            "problem",
        )
        net, U, Y = generate_teacher_student(
            widths=_require(prob, "widths", "problem"),
            n_samples=int(prob.get("n_samples", 512)),
            noise_sigma=float(prob.get("noise_sigma", 0.01)),
            activation=prob.get("activation", "relu"),
            seed=cfg.seed,
        )
        return _network_task(cfg, net, U, Y)
    raise ConfigError(f"unknown problem generator: {gen!r}")


def _network_task(cfg: ExperimentConfig, net: LayeredNetwork, U, Y) -> TrainTask:
    def loss_and_grad(x, batch=None):
        return network_loss_and_grad(net, x, U, Y, batch=batch)

    def save_final(out_dir, x):
        save_checkpoint(os.path.join(out_dir, "final.ckpt"), net.with_params(x))
        return "final.ckpt"

    partition = _resolve_partition(cfg, None, net, net.n_params)
    return TrainTask(
        x0=net.flatten(),
        loss_and_grad=loss_and_grad,
        n_samples=U.shape[0],
        partition=partition,
        save_final=save_final,
        kind="network",
    )


def _resolve_partition(cfg, natural, net, n_params) -> GroupPartition:
    spec = cfg.partition_spec
    if isinstance(spec, list):
        p = GroupPartition(spec, n_params=n_params)
        validate_partition(p)
        return p
    if spec == "generator":
        if natural is not None:
            return natural
        if net is not None:
            return row_groups(net)
        raise ConfigError("problem has no natural partition")
    if spec == "row_groups":
        if net is None:
            raise ConfigError("row_groups needs a network problem")
        return row_groups(net)
    if spec == "column_groups":
        if net is None:
            raise ConfigError("column_groups needs a network problem")
        return column_groups(net)
    raise ConfigError(f"unknown partition spec: {spec!r}")


def _batches(rng, n_samples, minibatch):
    if minibatch is None or minibatch >= n_samples:
        return lambda: None
    return lambda: np.sort(rng.choice(n_samples, size=minibatch, replace=False))


def _support_metrics(x, partition, true_support):
    pred = np.array(
        [float(np.linalg.norm(x[g])) > 0.0 for g in partition], dtype=bool
    )
    tp = int(np.sum(pred & true_support))
    fp = int(np.sum(pred & ~true_support))
    fn = int(np.sum(~pred & true_support))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {
        "support_precision": precision,
        "support_recall": recall,
        "support_f1": f1,
    }


def train(cfg: ExperimentConfig) -> dict:
    """Run one training experiment; returns the summary dictionary."""
    t_start = time.perf_counter()
    task = _build_task(cfg)
    out_dir = resolve_output_dir(cfg.output_dir)
    os.makedirs(out_dir, exist_ok=True)

    pg_cfg = ProxGenConfig(
        rule=cfg.rule,
        penalty=cfg.penalty,
        partition=task.partition,
        solver=cfg.solver,
        lr_schedule=cfg.lr,
        mode=cfg.mode,
        prox_tol_schedule=cfg.prox_tol,
        mcp_step_policy=cfg.mcp_step_policy,
    )
    state = OptimizerState.initial(task.x0.size)
    x = task.x0.copy()
    batch_rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 1]))
    next_batch = _batches(batch_rng, task.n_samples, cfg.minibatch_size)
    proximal = cfg.mode == "proximal"
    step_fn = proxgen_step if proximal else subgradient_step

    total_prox_iters = 0.0
    residual_rows = {}
    with open(os.path.join(out_dir, "metrics.csv"), "w", encoding="ascii", newline="") as fh:
        fh.write(METRICS_HEADER + "\n")
        for t in range(1, cfg.steps + 1):
            batch = next_batch()
            _, grad = task.loss_and_grad(x, batch)
            x_prev = x
            x, stats = step_fn(state, x, grad, pg_cfg)
            loss, _ = task.loss_and_grad(x, batch)
            pen = penalty_value(x, task.partition, cfg.penalty)
            spars = group_sparsity(x, task.partition)
            if stats.prox is not None:
                per_group = stats.prox.iterations_per_group()
                total_prox_iters += stats.prox.total_iterations
                prox_field = _fmt(per_group)
            else:
                prox_field = ""
            resid_field = ""
            if (
                proximal
                and cfg.stationarity_every > 0
                and t % cfg.stationarity_every == 0
            ):
                _, full_grad = task.loss_and_grad(x, None)
                resid = stationarity_residual(
                    x, x_prev, stats.m, stats.D, stats.alpha_t, full_grad
                )
                residual_rows[t] = resid
                resid_field = _fmt(resid)
            fh.write(
                ",".join(
                    (
                        str(t),
                        _fmt(loss),
                        _fmt(pen),
                        _fmt(loss + pen),
                        _fmt(spars),
                        prox_field,
                        resid_field,
                    )
                )
                + "\n"
            )

    ckpt_name = task.save_final(out_dir, x)
    full_loss, _ = task.loss_and_grad(x, None)
    pen = penalty_value(x, task.partition, cfg.penalty)
    exact_zero = sum(1 for g in task.partition if not np.any(x[g]))
    summary = {
        "steps": cfg.steps,
        "mode": cfg.mode,
        "penalty_kind": cfg.penalty.kind,
        "final_full_loss": full_loss,
        "final_penalty": pen,
        "final_objective": full_loss + pen,
        "group_sparsity": group_sparsity(x, task.partition),
        "exact_zero_groups": exact_zero,
        "n_groups": len(task.partition),
        "mean_prox_iters_per_step": (
            total_prox_iters / (cfg.steps * max(len(task.partition), 1))
            if proximal and cfg.steps
            else None
        ),
        "checkpoint": ckpt_name,
        "kernel_backend": _kernels.backend_name(),
        "wall_time_sec": time.perf_counter() - t_start,
    }
    if task.true_support is not None:
        summary.update(_support_metrics(x, task.partition, task.true_support))
    if not proximal:
        summary["zero_tol_sparsity"] = {
            repr(tol): group_sparsity(x, task.partition, tol)
            for tol in SUBGRADIENT_ZERO_TOLS
        }
    if residual_rows:
        first_key = min(residual_rows)
        summary["stationarity_first"] = residual_rows[first_key]
        summary["stationarity_last"] = residual_rows[max(residual_rows)]
    with open(os.path.join(out_dir, "summary.json"), "w", encoding="ascii") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


def bench_solvers(cfg: ExperimentConfig) -> dict:
    """Training run that times all three solvers on identical per-step inputs.

    Newton's output is the one applied to the iterate; bisection and the
    fixed-point baseline see exactly the same per-group subproblems. Per-step
    iteration counts are normalized by the total group count.
    """
    t_start = time.perf_counter()
    task = _build_task(cfg)
    out_dir = resolve_output_dir(cfg.output_dir)
    os.makedirs(out_dir, exist_ok=True)
    if cfg.mode != "proximal":
        raise ConfigError("bench-solvers requires proximal mode")

    from .optimizer import update_moments  # local alias for clarity

    newton_cfg = SolverConfig(
        method="newton",
        tolerance=cfg.solver.tolerance,
        max_iters=cfg.solver.max_iters,
        fallback_to_bisection=True,
    )
    bisect_cfg = SolverConfig(
        method="bisection",
        tolerance=cfg.solver.tolerance,
        max_iters=cfg.solver.max_iters,
        fallback_to_bisection=False,
    )
    ada_cfg = SolverConfig(
        method="adaprox",
        tolerance=cfg.solver.tolerance,
        max_iters=cfg.solver.max_iters,
        fallback_to_bisection=False,
    )
    state = OptimizerState.initial(task.x0.size)
    x = task.x0.copy()
    batch_rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 1]))
    next_batch = _batches(batch_rng, task.n_samples, cfg.minibatch_size)
    penalty = cfg.penalty
    is_mcp = penalty.kind == GROUP_MCP
    n_groups = len(task.partition)
    timers = {"newton": 0.0, "bisection": 0.0, "adaprox": 0.0}
    totals = {"newton": 0, "bisection": 0, "adaprox": 0}
    cap = 0

    with open(os.path.join(out_dir, "bench.csv"), "w", encoding="ascii", newline="") as fh:
        fh.write(BENCH_HEADER + "\n")
        for t in range(1, cfg.steps + 1):
            batch = next_batch()
            _, grad = task.loss_and_grad(x, batch)
            m, _, D = update_moments(state, grad, cfg.rule)
            alpha_t = cfg.lr.at(state.t)
            state.alpha_t = alpha_t
            x_hat = x - alpha_t * m / D
            x_next = x_hat.copy()
            step_iters = {"newton": 0, "bisection": 0, "adaprox": 0}
            for g in task.partition:
                x_g = x_hat[g]
                d_g = D[g]
                lam_g = penalty.lambda_for_size(g.size)
                alpha_g = alpha_t
                if is_mcp:
                    limit = penalty.beta * float(d_g.min())
                    if not alpha_g < limit:
                        if cfg.mcp_step_policy != "clamp":
                            raise ConfigError(
                                "bench hit alpha >= beta*d_min; set mcp_step_policy=clamp"
                            )
                        alpha_g = 0.99 * limit

                t0 = time.perf_counter()
                if is_mcp:
                    out_n = weighted_prox_mcp_l2(
                        x_g, d_g, alpha_g, penalty.beta, lam_g, newton_cfg
                    )
                else:
                    out_n = weighted_prox_l2(x_g, d_g, alpha_g, lam_g, newton_cfg)
                timers["newton"] += time.perf_counter() - t0

                t0 = time.perf_counter()
                if is_mcp:
                    out_b = weighted_prox_mcp_l2(
                        x_g, d_g, alpha_g, penalty.beta, lam_g, bisect_cfg
                    )
                else:
                    out_b = weighted_prox_l2(x_g, d_g, alpha_g, lam_g, bisect_cfg)
                timers["bisection"] += time.perf_counter() - t0

                local = PenaltyConfig(
                    kind=penalty.kind,
                    lambda_base=lam_g,
                    beta=penalty.beta,
                    group_weight_rule="unit",
                )
                t0 = time.perf_counter()
                _, ada_stats = adaprox_solve(x_g, d_g, alpha_g, local, ada_cfg)
                timers["adaprox"] += time.perf_counter() - t0

                x_next[g] = out_n.z
                step_iters["newton"] += out_n.stats.iterations
                step_iters["bisection"] += out_b.stats.iterations
                step_iters["adaprox"] += ada_stats.iterations
                cap = max(cap, ada_stats.iterations)
            x = x_next
            for k in totals:
                totals[k] += step_iters[k]
            fh.write(
                ",".join(
                    (
                        str(t),
                        _fmt(step_iters["newton"] / n_groups),
                        _fmt(step_iters["bisection"] / n_groups),
                        _fmt(step_iters["adaprox"] / n_groups),
                    )
                )
                + "\n"
            )

    denom = cfg.steps * n_groups
    summary = {
        "steps": cfg.steps,
        "n_groups": n_groups,
        "mean_iters_per_group": {k: totals[k] / denom for k in totals},
        "max_adaprox_iters": cap,
        "wall_time_sec_per_solver": timers,
        "kernel_backend": _kernels.backend_name(),
        "wall_time_sec": time.perf_counter() - t_start,
    }
    with open(os.path.join(out_dir, "summary.json"), "w", encoding="ascii") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


def prune_checkpoint(
    checkpoint_path: str, groups: str, zero_tol: float, out_dir: str
) -> dict:
    """Load a network checkpoint, prune it, and write report + pruned net."""
    if groups not in ("row", "column"):
        raise ConfigError(f"groups must be 'row' or 'column', got {groups!r}")
    net = load_checkpoint(checkpoint_path)
    out_dir = resolve_output_dir(out_dir)
    os.makedirs(out_dir, exist_ok=True)
    partition = row_groups(net) if groups == "row" else column_groups(net)
    masks = zero_group_masks(net, partition, zero_tol)
    pruned, report = propagate_and_prune(net, masks)
    deviation = functional_equivalence_check(net, pruned)
    save_checkpoint(os.path.join(out_dir, "pruned.ckpt"), pruned)

    doc = {
        "source": os.path.basename(checkpoint_path),
        "groups": groups,
        "zero_tol": zero_tol,
        "direct_group_sparsity": report.direct_group_sparsity,
        "effective_sparsity": report.effective_sparsity,
        "max_output_deviation": deviation,
        "original_params": net.n_params,
        "pruned_params": pruned.n_params,
        "layers": [
            {
                "original_shape": list(li.original_shape),
                "pruned_shape": list(li.pruned_shape),
                "kept_fraction": li.kept_fraction,
                "direct_kept_fraction": li.direct_kept_fraction,
            }
            for li in report.layers
        ],
    }
    with open(os.path.join(out_dir, "prune_report.json"), "w", encoding="ascii") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(os.path.join(out_dir, "prune_report.csv"), "w", encoding="ascii", newline="") as fh:
        fh.write(
            "layer,original_rows,original_cols,pruned_rows,pruned_cols,"
            "kept_fraction,direct_kept_fraction\n"
        )
        for j, li in enumerate(report.layers):
            direct = "" if li.direct_kept_fraction is None else _fmt(li.direct_kept_fraction)
            fh.write(
                ",".join(
                    (
                        str(j),
                        str(li.original_shape[0]),
                        str(li.original_shape[1]),
                        str(li.pruned_shape[0]),
                        str(li.pruned_shape[1]),
                        _fmt(li.kept_fraction),
                        direct,
                    )
                )
                + "\n"
            )
    return doc


def prox_check(n: int, seed: int, penalty_kind: str, tolerance: float = 1e-6) -> dict:
    """Certification sweep: oracle equivalence (dim <= 3) + root certificates.

    Returns the result document; raises SolverFailedError-compatible failures
    through the summary's "passed" flag for the CLI to map to exit codes.
    """
    from .oracle import brute_force_weighted_prox, objective_value
    from .weighted_prox import theta_bounds_l2, theta_bounds_mcp
    from .weighted_prox import theta_residual_l2, theta_residual_mcp

    rng = np.random.default_rng(seed)
    is_mcp = penalty_kind == GROUP_MCP
    solver = SolverConfig(tolerance=tolerance)

    max_obj_gap = 0.0
    max_point_dev = 0.0
    flagged = 0
    for _ in range(n):
        dim = int(rng.integers(1, 4))
        x = rng.standard_normal(dim)
        d = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), size=dim))
        ndx = float(np.linalg.norm(d * x))
        tau = ndx * float(np.exp(rng.uniform(-2.0, 0.5)))
        alpha = float(np.exp(rng.uniform(np.log(0.1), np.log(2.0))))
        lam = tau / alpha
        if is_mcp:
            beta = alpha / float(d.min()) * float(np.exp(rng.uniform(np.log(1.5), np.log(50.0))))
            beta = max(beta, 1.0 + 1e-9)
            out = weighted_prox_mcp_l2(x, d, alpha, beta, lam, solver)
            res = brute_force_weighted_prox(x, d, alpha, GROUP_MCP, lam, beta, seed=int(rng.integers(2**31)))
            f_solver = float(objective_value(out.z, x, d, alpha, GROUP_MCP, lam, beta))
        else:
            out = weighted_prox_l2(x, d, alpha, lam, solver)
            res = brute_force_weighted_prox(x, d, alpha, "mixed_l1l2", lam, seed=int(rng.integers(2**31)))
            f_solver = float(objective_value(out.z, x, d, alpha, "mixed_l1l2", lam))
        flagged += int(res.flagged)
        max_obj_gap = max(max_obj_gap, f_solver - res.objective)
        max_point_dev = max(max_point_dev, float(np.max(np.abs(out.z - res.z))))

    max_resid = 0.0
    bracket_violations = 0
    fallbacks = 0
    certified = 0
    for _ in range(n):
        dim = int(rng.integers(1, 513))
        x = rng.standard_normal(dim)
        d = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), size=dim))
        ndx = float(np.linalg.norm(d * x))
        alpha = 1.0
        if is_mcp:
            # base must clear both the step bound (alpha=1 < beta*d_min) and
            # the beta > 1 penalty domain
            base = max(1.01, 1.01 / float(d.min()))
            beta = base * float(np.exp(rng.uniform(np.log(1.5), np.log(50.0))))
            nx = float(np.linalg.norm(x))
            # interior branch needs ||x|| <= beta*lam and ||Dx|| > alpha*lam
            lo, hi = np.log(nx / beta), np.log(ndx)
            u = float(rng.uniform(0.02, 0.98))
            lam = float(np.exp(lo + u * (hi - lo)))
            out = weighted_prox_mcp_l2(x, d, alpha, beta, lam, solver)
            if out.branch != "interior":
                continue
            bracket = theta_bounds_mcp(x, d, alpha, beta, lam)
            g, _ = theta_residual_mcp(out.theta_star, x, d, alpha, beta, lam)
        else:
            lam = ndx * float(np.exp(rng.uniform(-2.0, -0.05)))
            out = weighted_prox_l2(x, d, alpha, lam, solver)
            if out.branch != "interior":
                continue
            bracket = theta_bounds_l2(x, d, alpha * lam)
            g, _ = theta_residual_l2(out.theta_star, x, d, alpha * lam)
        certified += 1
        max_resid = max(max_resid, abs(g))
        if not bracket.lower <= out.theta_star <= bracket.upper:
            bracket_violations += 1
        fallbacks += int(out.stats.used_fallback)

    passed = (
        max_obj_gap <= 1e-8
        and max_point_dev <= 1e-3
        and flagged == 0
        and max_resid <= tolerance
        and bracket_violations == 0
    )
    return {
        "penalty": penalty_kind,
        "instances": n,
        "max_objective_gap": max_obj_gap,
        "max_point_deviation": max_point_dev,
        "oracle_flags": flagged,
        "certified_roots": certified,
        "max_abs_residual": max_resid,
        "bracket_violations": bracket_violations,
        "fallback_count": fallbacks,
        "passed": passed,
    }
