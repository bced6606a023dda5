"""Group-separable sparsity penalties and their unweighted proximal maps.

Two penalties over a partitioned vector:

* mixed l1/l2 (group lasso): h(x) = sum_g lambda_g ||x_g||_2
* group MCP: h(x) = sum_g MCP(||x_g||_2; beta, lambda_g)

where MCP(t; beta, lam) = lam*|t| - t^2/(2 beta) for |t| <= beta*lam and
beta*lam^2/2 beyond, with beta > 1. Per-group weights follow either the
sqrt-size rule lambda_g = lambda * sqrt(|g|) (default) or the unit rule
lambda_g = lambda.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import StepSizeError
from .groups import GroupPartition

MIXED_L1L2 = "mixed_l1l2"
GROUP_MCP = "group_mcp"

SQRT_SIZE = "sqrt_size"
UNIT = "unit"


@dataclass(frozen=True)
class PenaltyConfig:
    """Penalty family plus its scalar knobs.

    ``beta`` is only meaningful for the MCP family and must be > 1 there.
    """

    kind: str
    lambda_base: float
    beta: float | None = None
    group_weight_rule: str = SQRT_SIZE

    def __post_init__(self):
        if self.kind not in (MIXED_L1L2, GROUP_MCP):
            raise ValueError(f"unknown penalty kind: {self.kind!r}")
        if self.group_weight_rule not in (SQRT_SIZE, UNIT):
            raise ValueError(f"unknown group weight rule: {self.group_weight_rule!r}")
        if not self.lambda_base >= 0.0:
            raise ValueError("lambda_base must be >= 0")
        if self.kind == GROUP_MCP:
            if self.beta is None or not self.beta > 1.0:
                raise ValueError("group_mcp requires beta > 1")

    def lambda_for_size(self, size: int) -> float:
        if self.group_weight_rule == SQRT_SIZE:
            return self.lambda_base * math.sqrt(size)
        return self.lambda_base

    @staticmethod
    def from_dict(doc: dict) -> "PenaltyConfig":
        """Parse the JSON shape {"kind", "lambda", "beta"?, "group_weight_rule"?}."""
        allowed = {"kind", "lambda", "beta", "group_weight_rule"}
        extra = set(doc) - allowed
        if extra:
            raise ValueError(f"unknown penalty keys: {sorted(extra)}")
        if "kind" not in doc or "lambda" not in doc:
            raise ValueError("penalty needs 'kind' and 'lambda'")
        return PenaltyConfig(
            kind=doc["kind"],
            lambda_base=float(doc["lambda"]),
            beta=float(doc["beta"]) if "beta" in doc else None,
            group_weight_rule=doc.get("group_weight_rule", SQRT_SIZE),
        )

    def to_dict(self) -> dict:
        doc = {
            "kind": self.kind,
            "lambda": self.lambda_base,
            "group_weight_rule": self.group_weight_rule,
        }
        if self.beta is not None:
            doc["beta"] = self.beta
        return doc


def mcp_scalar(t: float, beta: float, lam: float) -> float:
    """Minimax concave penalty of a scalar magnitude."""
    a = abs(t)
    if a <= beta * lam:
        return lam * a - a * a / (2.0 * beta)
    return 0.5 * beta * lam * lam


def penalty_value(v, partition: GroupPartition, cfg: PenaltyConfig) -> float:
    """h(v) summed over the partition's groups."""
    v = np.asarray(v, dtype=np.float64)
    total = 0.0
    for g in partition:
        r = float(np.linalg.norm(v[g]))
        lam_g = cfg.lambda_for_size(g.size)
        if cfg.kind == MIXED_L1L2:
            total += lam_g * r
        else:
            total += mcp_scalar(r, cfg.beta, lam_g)
    return total


def prox_l2_unweighted(x, tau: float) -> np.ndarray:
    """Block soft-threshold: argmin_z 0.5||z - x||^2 + tau ||z||_2.

    Returns exact zeros when ||x||_2 <= tau.
    """
    x = np.asarray(x, dtype=np.float64)
    if tau < 0:
        raise ValueError("tau must be >= 0")
    r = float(np.linalg.norm(x))
    if r <= tau:
        return np.zeros_like(x)
    return (1.0 - tau / r) * x


def prox_mcp_l2_unweighted(x, alpha: float, beta: float, lam: float) -> np.ndarray:
    """argmin_z 0.5||z - x||^2 + alpha * MCP(||z||_2; beta, lam), alpha < beta.

    Branches on ||x||_2: identity above beta*lam (ties go to the scaled
    branch), scaled soft-threshold in (alpha*lam, beta*lam], zero below.
    """
    x = np.asarray(x, dtype=np.float64)
    if not alpha < beta:
        raise StepSizeError(f"step alpha={alpha} must be < beta={beta}")
    if alpha <= 0 or lam < 0:
        raise ValueError("alpha must be > 0 and lam >= 0")
    r = float(np.linalg.norm(x))
    if r > beta * lam:
        return x.copy()
    if r <= alpha * lam:
        return np.zeros_like(x)
    scale = (beta / (beta - alpha)) * (1.0 - alpha * lam / r)
    return scale * x
