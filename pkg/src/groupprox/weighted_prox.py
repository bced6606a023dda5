"""Weighted proximal operators for group norms under a diagonal metric.

For one group with input x, positive diagonal d, step alpha and group weight
lambda_g, the operator returns

    argmin_z  0.5 * sum_i d_i (z_i - x_i)^2 + alpha * pen(||z||_2)

with pen either the l2 norm scaled by lambda_g or the MCP of the norm. The
solution is characterized by a scalar theta = ||z||_2 that solves a monotone
residual equation G(theta) = 0 on a closed-form bracket; coordinates follow
in closed form. Three outcome branches exist: an exact zero, the interior
(root) case, and, for MCP only, an identity branch that returns x bit-exactly
when ||x||_2 exceeds beta * lambda_g.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .exceptions import NotInteriorError, SolverFailedError, StepSizeError
from .groups import GroupPartition, validate_partition
from .penalties import GROUP_MCP, MIXED_L1L2, PenaltyConfig
from .solvers import ADAPROX, NEWTON, SolverConfig, SolverStats, ThetaBracket, adaprox_solve

BRANCH_ZERO = "zero"
BRANCH_INTERIOR = "interior"
BRANCH_IDENTITY = "identity"

_RAISE = "raise"
_CLAMP = "clamp"


@dataclass
class WeightedProxOutcome:
    """Result of one per-group solve.

    ``theta_star`` equals ||z||_2 and is only present for interior outcomes
    produced by the theta-equation path; AdaProx-produced outcomes classify
    the branch from the returned point and leave it None.
    """

    z: np.ndarray
    branch: str
    theta_star: float | None
    stats: SolverStats
    clamped: bool = False


@dataclass
class FullProxStats:
    """Aggregate over one full-vector prox application (fixed group order)."""

    n_groups: int = 0
    zero_groups: int = 0
    interior_groups: int = 0
    identity_groups: int = 0
    total_iterations: int = 0
    fallback_groups: int = 0
    nonconverged_groups: int = 0
    clamped_groups: int = 0

    def iterations_per_group(self) -> float:
        """Total solver iterations normalized by the total group count."""
        if self.n_groups == 0:
            return 0.0
        return self.total_iterations / self.n_groups

    def mean_interior_iterations(self) -> float:
        if self.interior_groups == 0:
            return 0.0
        return self.total_iterations / self.interior_groups


def _as_group(x_g, d_g):
    x = np.ascontiguousarray(x_g, dtype=np.float64)
    d = np.ascontiguousarray(d_g, dtype=np.float64)
    if x.ndim != 1 or x.shape != d.shape:
        raise ValueError("x_g and d_g must be 1-D with matching shapes")
    if np.any(d <= 0) or not np.all(np.isfinite(d)):
        raise ValueError("preconditioner entries must be finite and > 0")
    return x, d


def theta_residual_l2(theta: float, x_g, d_g, tau: float):
    """G and G' for the l2 case: G(t) = sum((d x / (d t + tau))^2) - 1."""
    x, d = _as_group(x_g, d_g)
    den = d * theta + tau
    num2 = (d * x) ** 2
    g = float(np.sum(num2 / den**2)) - 1.0
    dg = -2.0 * float(np.sum(num2 * d / den**3))
    return g, dg


def theta_residual_mcp(theta: float, x_g, d_g, alpha: float, beta: float, lam: float):
    """G and G' for the MCP case, evaluated in beta-normalized form.

    Algebraically identical to the defining residual with denominators
    (d beta - alpha) t + alpha beta lam; dividing through by beta keeps
    huge beta values well conditioned.
    """
    x, d = _as_group(x_g, d_g)
    slope = d - alpha / beta
    tau = alpha * lam
    den = slope * theta + tau
    num2 = (d * x) ** 2
    g = float(np.sum(num2 / den**2)) - 1.0
    dg = -2.0 * float(np.sum(num2 * slope / den**3))
    return g, dg


def theta_bounds_l2(x_g, d_g, tau: float) -> ThetaBracket:
    """Closed-form bracket for the interior l2 root; requires ||Dx|| > tau."""
    x, d = _as_group(x_g, d_g)
    ndx = float(np.linalg.norm(d * x))
    if not ndx > tau:
        raise NotInteriorError(f"||Dx||={ndx} <= tau={tau}: zero branch, no root")
    return ThetaBracket((ndx - tau) / float(d.max()), (ndx - tau) / float(d.min()))


def theta_bounds_mcp(x_g, d_g, alpha: float, beta: float, lam: float) -> ThetaBracket:
    """Bracket for the interior MCP root; requires the interior branch."""
    x, d = _as_group(x_g, d_g)
    d_min = float(d.min())
    if not alpha < beta * d_min:
        raise StepSizeError(f"need alpha < beta*d_min, got {alpha} >= {beta * d_min}")
    nx = float(np.linalg.norm(x))
    if nx > beta * lam:
        raise NotInteriorError(f"||x||={nx} > beta*lam={beta * lam}: identity branch")
    tau = alpha * lam
    ndx = float(np.linalg.norm(d * x))
    if not ndx > tau:
        raise NotInteriorError(f"||Dx||={ndx} <= alpha*lam={tau}: zero branch")
    slope_max = float(d.max()) - alpha / beta
    slope_min = d_min - alpha / beta
    return ThetaBracket((ndx - tau) / slope_max, (ndx - tau) / slope_min)


def _solve(num, slope, tau, bracket, solver):
    theta, iters, resid, converged, used_fb = _kernels.kernels().solve_theta(
        num,
        slope,
        tau,
        bracket.lower,
        bracket.upper,
        solver.tolerance,
        solver.max_iters,
        solver.method,
        solver.fallback_to_bisection,
    )
    stats = SolverStats(iters, resid, converged, used_fb)
    if not converged:
        raise SolverFailedError(
            f"theta solve did not converge in {iters} iterations "
            f"(|G|={abs(resid):.3e} > {solver.tolerance})"
        )
    return theta, stats


def _trivial_stats() -> SolverStats:
    return SolverStats(iterations=0, final_residual=0.0, converged=True)


def weighted_prox_l2(
    x_g, d_g, alpha: float, lambda_g: float, solver: SolverConfig | None = None
) -> WeightedProxOutcome:
    """Weighted prox of lambda_g * ||.||_2 for one group.

    Zero branch (exact zeros) when ||Dx|| <= alpha*lambda_g, interior
    otherwise, with z_i = d_i theta x_i / (d_i theta + alpha lambda_g) at the
    root theta of the residual equation.
    """
    x, d = _as_group(x_g, d_g)
    if not alpha > 0:
        raise ValueError("alpha must be > 0")
    if lambda_g < 0:
        raise ValueError("lambda_g must be >= 0")
    solver = solver or SolverConfig()
    if solver.method == ADAPROX:
        raise ValueError("use adaprox_solve for the fixed-point baseline")
    tau = alpha * lambda_g
    ndx = float(np.linalg.norm(d * x))
    if ndx <= tau:
        return WeightedProxOutcome(np.zeros_like(x), BRANCH_ZERO, None, _trivial_stats())
    bracket = ThetaBracket((ndx - tau) / float(d.max()), (ndx - tau) / float(d.min()))
    theta, stats = _solve(d * x, d, tau, bracket, solver)
    z = d * theta * x / (d * theta + tau)
    return WeightedProxOutcome(z, BRANCH_INTERIOR, theta, stats)


def weighted_prox_mcp_l2(
    x_g,
    d_g,
    alpha: float,
    beta: float,
    lambda_g: float,
    solver: SolverConfig | None = None,
    on_step_violation: str = _RAISE,
) -> WeightedProxOutcome:
    """Weighted prox of MCP(||.||_2; beta, lambda_g) for one group.

    Requires alpha < beta * min(d). With on_step_violation="clamp" a
    violating step is reduced to 0.99 * beta * min(d) for this group (warning
    recorded, outcome flagged) instead of raising. Branches: identity
    (bit-exact x) when ||x|| > beta*lambda_g, zero when additionally
    ||Dx|| <= alpha*lambda_g, interior root otherwise; a boundary tie
    ||x|| == beta*lambda_g resolves to the interior branch.
    """
    x, d = _as_group(x_g, d_g)
    if not alpha > 0:
        raise ValueError("alpha must be > 0")
    if not beta > 1:
        raise ValueError("beta must be > 1")
    if lambda_g < 0:
        raise ValueError("lambda_g must be >= 0")
    if on_step_violation not in (_RAISE, _CLAMP):
        raise ValueError(f"unknown step violation policy: {on_step_violation!r}")
    solver = solver or SolverConfig()
    if solver.method == ADAPROX:
        raise ValueError("use adaprox_solve for the fixed-point baseline")

    d_min = float(d.min())
    clamped = False
    if not alpha < beta * d_min:
        if on_step_violation == _RAISE:
            raise StepSizeError(
                f"need alpha < beta*d_min, got alpha={alpha} >= {beta * d_min}"
            )
        alpha = 0.99 * beta * d_min
        clamped = True
        warnings.warn(
            f"step clamped to {alpha} to keep alpha < beta*d_min", RuntimeWarning
        )

    nx = float(np.linalg.norm(x))
    if nx > beta * lambda_g:
        return WeightedProxOutcome(
            x.copy(), BRANCH_IDENTITY, None, _trivial_stats(), clamped
        )
    tau = alpha * lambda_g
    ndx = float(np.linalg.norm(d * x))
    if ndx <= tau:
        return WeightedProxOutcome(
            np.zeros_like(x), BRANCH_ZERO, None, _trivial_stats(), clamped
        )
    slope = d - alpha / beta
    bracket = ThetaBracket(
        (ndx - tau) / float(slope.max()), (ndx - tau) / float(slope.min())
    )
    theta, stats = _solve(d * x, slope, tau, bracket, solver)
    z = d * theta * x / (slope * theta + tau)
    return WeightedProxOutcome(z, BRANCH_INTERIOR, theta, stats, clamped)


def _adaprox_outcome(x, d, alpha, penalty, lam_g, solver) -> WeightedProxOutcome:
    local = PenaltyConfig(
        kind=penalty.kind,
        lambda_base=lam_g,
        beta=penalty.beta,
        group_weight_rule="unit",
    )
    z, stats = adaprox_solve(x, d, alpha, local, solver)
    if not np.any(z):
        branch = BRANCH_ZERO
    elif np.array_equal(z, x):
        branch = BRANCH_IDENTITY
    else:
        branch = BRANCH_INTERIOR
    return WeightedProxOutcome(z, branch, None, stats)


def weighted_prox_full(
    v,
    partition: GroupPartition,
    penalty: PenaltyConfig,
    d,
    alpha: float,
    solver: SolverConfig | None = None,
    on_step_violation: str = _RAISE,
):
    """Apply the weighted prox groupwise over a full parameter vector.

    Coordinates outside every group pass through unchanged. Groups are
    processed in partition order; failures are collected and re-raised with
    the offending group identities attached. Returns (vector, FullProxStats).
    An all-zero group input short-circuits to the zero branch without a
    solve. With solver.method == "adaprox" every group runs the fixed-point
    baseline instead of the theta equation.
    """
    v = np.asarray(v, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    if v.shape != d.shape or v.ndim != 1:
        raise ValueError("v and d must be 1-D with matching shapes")
    validate_partition(partition)
    if partition.n_params != v.size:
        raise ValueError(
            f"partition covers n_params={partition.n_params}, vector has {v.size}"
        )
    solver = solver or SolverConfig()
    out = v.copy()
    stats = FullProxStats(n_groups=len(partition))
    failures = []
    for k, g in enumerate(partition):
        x_g = v[g]
        d_g = d[g]
        lam_g = penalty.lambda_for_size(g.size)
        try:
            if not np.any(x_g):
                outcome = WeightedProxOutcome(
                    np.zeros_like(x_g), BRANCH_ZERO, None, _trivial_stats()
                )
            elif solver.method == ADAPROX:
                outcome = _adaprox_outcome(x_g, d_g, alpha, penalty, lam_g, solver)
            elif penalty.kind == MIXED_L1L2:
                outcome = weighted_prox_l2(x_g, d_g, alpha, lam_g, solver)
            else:
                outcome = weighted_prox_mcp_l2(
                    x_g, d_g, alpha, penalty.beta, lam_g, solver, on_step_violation
                )
        except Exception as exc:
            failures.append((k, exc))
            continue
        out[g] = outcome.z
        if outcome.branch == BRANCH_ZERO:
            stats.zero_groups += 1
        elif outcome.branch == BRANCH_IDENTITY:
            stats.identity_groups += 1
        else:
            stats.interior_groups += 1
        stats.total_iterations += outcome.stats.iterations
        if outcome.stats.used_fallback:
            stats.fallback_groups += 1
        if not outcome.stats.converged:
            stats.nonconverged_groups += 1
        if outcome.clamped:
            stats.clamped_groups += 1
    if failures:
        k0, exc0 = failures[0]
        ids = ", ".join(str(k) for k, _ in failures)
        raise type(exc0)(f"group {k0}: {exc0} (failing groups: {ids})") from exc0
    return out, stats
