"""Proximal training steps with adaptive diagonal preconditioners.

One optimizer step forms moment estimates (m_t, v_t) and a diagonal metric
D_t from the gradient stream, takes the preconditioned step
x_hat = x_t - alpha_t * m_t / D_t, and then applies the groupwise weighted
prox of the penalty under D_t. The subgradient baseline replaces the prox
with an explicit penalty subgradient added to the raw gradient.

Preconditioner rules (per update t = 1, 2, ...):

  sgd       m_t = g_t,                    D = 1
  momentum  mhat_t = mu mhat_{t-1} + g_t, m_t = mhat_t,  D = 1
  adagrad   v_t = v_{t-1} + g_t^2,        D = sqrt(v_t) + eps
  rmsprop   v_t = b2 v_{t-1} + (1-b2) g_t^2,  D = sqrt(v_t + eps)
  adam      mhat_t = b1 mhat_{t-1} + (1-b1) g_t,  m_t = mhat_t/(1-b1^t),
            v_t as rmsprop,  D = sqrt(v_t/(1-b2^t)) + eps

With ``momentum_decay`` set on an adam rule, the mixing coefficient decays as
rho_t = b1 * momentum_decay^t and no bias correction is applied (the
theory-compliant momentum schedule); the default None keeps practical
constant-b1 adam.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .groups import GroupPartition
from .penalties import GROUP_MCP, MIXED_L1L2, PenaltyConfig
from .solvers import SolverConfig
from .weighted_prox import FullProxStats, weighted_prox_full

SGD = "sgd"
MOMENTUM = "momentum"
ADAGRAD = "adagrad"
RMSPROP = "rmsprop"
ADAM = "adam"
_RULES = (SGD, MOMENTUM, ADAGRAD, RMSPROP, ADAM)

PROXIMAL = "proximal"
SUBGRADIENT = "subgradient"


@dataclass(frozen=True)
class PreconditionerRule:
    kind: str
    mu: float = 0.9
    beta1: float = 0.9
    beta2: float = 0.999
    eps_stability: float = 1e-8
    momentum_decay: float | None = None

    def __post_init__(self):
        if self.kind not in _RULES:
            raise ValueError(f"unknown preconditioner rule: {self.kind!r}")
        if not 0 < self.eps_stability <= 1:
            raise ValueError("eps_stability must be in (0, 1]")
        if self.momentum_decay is not None:
            if self.kind != ADAM:
                raise ValueError("momentum_decay is only supported for adam")
            if not 0 < self.momentum_decay < 1:
                raise ValueError("momentum_decay must be in (0, 1)")


@dataclass(frozen=True)
class LRSchedule:
    """alpha_t = alpha0 (constant) or alpha0 / sqrt(t) with t = 1, 2, ..."""

    kind: str
    alpha0: float

    def __post_init__(self):
        if self.kind not in ("constant", "inverse_sqrt"):
            raise ValueError(f"unknown lr schedule: {self.kind!r}")
        if not self.alpha0 > 0:
            raise ValueError("alpha0 must be > 0")

    def at(self, t: int) -> float:
        if self.kind == "constant":
            return self.alpha0
        return self.alpha0 / math.sqrt(t)


@dataclass(frozen=True)
class ProxTolSchedule:
    """Per-step prox tolerance: the solver default, or eps0 / t^power.

    The polynomial form needs power > 0.5 so the squared tolerances are
    summable.
    """

    kind: str = "constant"
    eps0: float | None = None
    power: float = 1.0

    def __post_init__(self):
        if self.kind not in ("constant", "polynomial"):
            raise ValueError(f"unknown prox tol schedule: {self.kind!r}")
        if self.kind == "polynomial":
            if self.eps0 is None or not self.eps0 > 0:
                raise ValueError("polynomial schedule needs eps0 > 0")
            if not self.power > 0.5:
                raise ValueError("polynomial schedule needs power > 0.5")

    def at(self, t: int, default: float) -> float:
        if self.kind == "constant":
            return self.eps0 if self.eps0 is not None else default
        return self.eps0 / t**self.power


@dataclass
class OptimizerState:
    m_hat: np.ndarray
    m: np.ndarray
    v: np.ndarray
    t: int = 0
    alpha_t: float = 0.0

    @classmethod
    def initial(cls, n_params: int) -> "OptimizerState":
        return cls(
            m_hat=np.zeros(n_params),
            m=np.zeros(n_params),
            v=np.zeros(n_params),
        )


@dataclass(frozen=True)
class ProxGenConfig:
    rule: PreconditionerRule
    penalty: PenaltyConfig
    partition: GroupPartition
    solver: SolverConfig = field(default_factory=SolverConfig)
    lr_schedule: LRSchedule = field(default_factory=lambda: LRSchedule("constant", 0.01))
    mode: str = PROXIMAL
    prox_tol_schedule: ProxTolSchedule = field(default_factory=ProxTolSchedule)
    mcp_step_policy: str = "raise"

    def __post_init__(self):
        if self.mode not in (PROXIMAL, SUBGRADIENT):
            raise ValueError(f"unknown mode: {self.mode!r}")


@dataclass
class StepStats:
    """Everything a caller needs to log or certify one update."""

    t: int
    alpha_t: float
    prox_tol: float | None
    m: np.ndarray
    D: np.ndarray
    prox: FullProxStats | None


def update_moments(state: OptimizerState, g, rule: PreconditionerRule):
    """Advance the moment estimates by one gradient; returns (m_t, v_t, D_t).

    Increments state.t; m_t is the bias-corrected estimate where the rule
    defines one.
    """
    g = np.asarray(g, dtype=np.float64)
    state.t += 1
    t = state.t
    eps = rule.eps_stability
    if rule.kind == SGD:
        state.m_hat = g.copy()
        state.m = state.m_hat
        D = np.ones_like(g)
    elif rule.kind == MOMENTUM:
        state.m_hat = rule.mu * state.m_hat + g
        state.m = state.m_hat
        D = np.ones_like(g)
    elif rule.kind == ADAGRAD:
        state.m_hat = g.copy()
        state.m = state.m_hat
        state.v = state.v + g * g
        D = np.sqrt(state.v) + eps
    elif rule.kind == RMSPROP:
        state.m_hat = g.copy()
        state.m = state.m_hat
        state.v = rule.beta2 * state.v + (1.0 - rule.beta2) * g * g
        D = np.sqrt(state.v + eps)
    else:  # adam
        if rule.momentum_decay is None:
            state.m_hat = rule.beta1 * state.m_hat + (1.0 - rule.beta1) * g
            state.m = state.m_hat / (1.0 - rule.beta1**t)
        else:
            rho_t = rule.beta1 * rule.momentum_decay**t
            state.m_hat = rho_t * state.m_hat + (1.0 - rho_t) * g
            state.m = state.m_hat
        state.v = rule.beta2 * state.v + (1.0 - rule.beta2) * g * g
        D = np.sqrt(state.v / (1.0 - rule.beta2**t)) + eps
    return state.m, state.v, D


def proxgen_step(state: OptimizerState, x_t, g_t, cfg: ProxGenConfig):
    """One proximal update; returns (x_next, StepStats).

    Zero-branch groups of the prox carry literal zeros into x_next. With an
    empty partition the update reduces to the plain preconditioned step.
    """
    x_t = np.asarray(x_t, dtype=np.float64)
    m, _, D = update_moments(state, g_t, cfg.rule)
    alpha_t = cfg.lr_schedule.at(state.t)
    state.alpha_t = alpha_t
    x_hat = x_t - alpha_t * m / D
    tol = cfg.prox_tol_schedule.at(state.t, cfg.solver.tolerance)
    solver = cfg.solver if tol == cfg.solver.tolerance else cfg.solver.with_tolerance(tol)
    x_next, prox_stats = weighted_prox_full(
        x_hat,
        cfg.partition,
        cfg.penalty,
        D,
        alpha_t,
        solver,
        on_step_violation=cfg.mcp_step_policy,
    )
    return x_next, StepStats(state.t, alpha_t, tol, m, D, prox_stats)


def penalty_subgradient(v, partition: GroupPartition, penalty: PenaltyConfig):
    """Groupwise subgradient of the penalty, zero on zero groups.

    Mixed l1/l2 contributes lambda_g * x_g/||x_g||; MCP contributes the
    radial derivative (lambda_g - ||x_g||/beta)_+ directionally, vanishing
    beyond the clipping radius beta*lambda_g.
    """
    v = np.asarray(v, dtype=np.float64)
    sub = np.zeros_like(v)
    for g in partition:
        x_g = v[g]
        r = float(np.linalg.norm(x_g))
        if r == 0.0:
            continue
        lam_g = penalty.lambda_for_size(g.size)
        if penalty.kind == MIXED_L1L2:
            coef = lam_g / r
        else:
            coef = (lam_g - r / penalty.beta) / r if r <= penalty.beta * lam_g else 0.0
        sub[g] = coef * x_g
    return sub


def subgradient_step(state: OptimizerState, x_t, g_t, cfg: ProxGenConfig):
    """Baseline update: penalty subgradient folded into the gradient stream."""
    x_t = np.asarray(x_t, dtype=np.float64)
    g = np.asarray(g_t, dtype=np.float64) + penalty_subgradient(
        x_t, cfg.partition, cfg.penalty
    )
    m, _, D = update_moments(state, g, cfg.rule)
    alpha_t = cfg.lr_schedule.at(state.t)
    state.alpha_t = alpha_t
    x_next = x_t - alpha_t * m / D
    return x_next, StepStats(state.t, alpha_t, None, m, D, None)


def stationarity_residual(x_next, x_t, m_t, D_t, alpha_t: float, grad_at_next):
    """Norm of the optimality-system residual after a proximal step.

    ||grad f(x_next) - m_t - (1/alpha_t) D_t (x_next - x_t)||_2; small values
    certify approximate stationarity when prox tolerances are tight.
    """
    x_next = np.asarray(x_next, dtype=np.float64)
    x_t = np.asarray(x_t, dtype=np.float64)
    r = (
        np.asarray(grad_at_next, dtype=np.float64)
        - np.asarray(m_t, dtype=np.float64)
        - np.asarray(D_t, dtype=np.float64) * (x_next - x_t) / alpha_t
    )
    return float(np.linalg.norm(r))


def group_sparsity(v, partition: GroupPartition, zero_tol: float = 0.0) -> float:
    """Fraction of groups whose l2 norm exceeds zero_tol (0 when no groups)."""
    if zero_tol < 0:
        raise ValueError("zero_tol must be >= 0")
    if len(partition) == 0:
        return 0.0
    v = np.asarray(v, dtype=np.float64)
    nonzero = sum(1 for g in partition if float(np.linalg.norm(v[g])) > zero_tol)
    return nonzero / len(partition)
