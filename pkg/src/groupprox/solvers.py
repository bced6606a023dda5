"""Scalar root solvers for the per-group theta equations.

``newton_solve`` and ``bisection_solve`` find the root of a monotone residual
G on a bracket [lower, upper] that contains it, with the convergence test on
|G(theta)| <= tolerance. ``adaprox_solve`` is the fixed-point baseline that
iterates the unweighted proximal map instead of solving for theta.

Iteration counts are the number of theta updates performed; the initial
residual check at ``bracket.lower`` is free, so a collapsed bracket reports
zero iterations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .exceptions import BadBracketError
from .penalties import PenaltyConfig, GROUP_MCP

NEWTON = "newton"
BISECTION = "bisection"
ADAPROX = "adaprox"

_METHODS = (NEWTON, BISECTION, ADAPROX)


@dataclass(frozen=True)
class ThetaBracket:
    """Closed interval known to contain the positive root."""

    lower: float
    upper: float

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise ValueError("bracket endpoints must be finite")
        if self.lower < 0 or self.upper < self.lower:
            raise ValueError(
                f"need 0 <= lower <= upper, got [{self.lower}, {self.upper}]"
            )


@dataclass(frozen=True)
class SolverConfig:
    method: str = NEWTON
    tolerance: float = 1e-6
    max_iters: int = 100
    fallback_to_bisection: bool = True

    def __post_init__(self):
        if self.method not in _METHODS:
            raise ValueError(f"unknown solver method: {self.method!r}")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be > 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")

    def with_tolerance(self, tol: float) -> "SolverConfig":
        return replace(self, tolerance=tol)


@dataclass
class SolverStats:
    iterations: int
    final_residual: float
    converged: bool
    used_fallback: bool = False


def _bisect_loop(residual, lo, hi, orient, tol, max_iters):
    """Bisection on a sign-consistent bracket; returns (theta, iters, G, ok).

    ``orient`` is +1 when G is positive on the root's left side (decreasing
    residual), -1 for the increasing case.
    """
    theta = lo
    g = math.nan
    for k in range(1, max_iters + 1):
        theta = 0.5 * (lo + hi)
        g, _ = residual(theta)
        if abs(g) <= tol:
            return theta, k, g, True
        if orient * g > 0:
            lo = theta
        else:
            hi = theta
    return theta, max_iters, g, False


def bisection_solve(residual, bracket: ThetaBracket, cfg: SolverConfig):
    """Plain bisection to |G| <= cfg.tolerance.

    ``residual`` maps theta to (G, dG); dG is ignored here. Raises
    BadBracketError when the endpoint residuals have the same strict sign.
    """
    lo, hi = bracket.lower, bracket.upper
    g_lo, _ = residual(lo)
    if hi <= lo or abs(g_lo) <= cfg.tolerance:
        return lo, SolverStats(0, g_lo, abs(g_lo) <= cfg.tolerance)
    g_hi, _ = residual(hi)
    if abs(g_hi) <= cfg.tolerance:
        return hi, SolverStats(0, g_hi, True)
    if (g_lo > 0) == (g_hi > 0):
        raise BadBracketError(
            f"residual has sign {'+' if g_lo > 0 else '-'} at both endpoints "
            f"[{lo}, {hi}]"
        )
    orient = 1.0 if g_lo > 0 else -1.0
    theta, iters, g, ok = _bisect_loop(
        residual, lo, hi, orient, cfg.tolerance, cfg.max_iters
    )
    return theta, SolverStats(iters, g, ok)


def newton_solve(residual, bracket: ThetaBracket, cfg: SolverConfig):
    """Safeguarded Newton from the lower bracket endpoint.

    Iterates theta <- theta - G/dG while |G| > tolerance, keeping a shrinking
    sign bracket; any step that leaves it (or a vanishing dG) is replaced by
    the bracket midpoint. On non-convergence after max_iters the remaining
    bracket is handed to bisection when cfg.fallback_to_bisection is set, and
    iterations accumulate across both phases.
    """
    lo, hi = bracket.lower, bracket.upper
    theta = lo
    g, dg = residual(theta)
    if abs(g) <= cfg.tolerance or hi <= lo:
        return theta, SolverStats(0, g, abs(g) <= cfg.tolerance)
    orient = 1.0 if g > 0 else -1.0
    iters = 0
    converged = False
    while iters < cfg.max_iters:
        if orient * g > 0:
            lo = theta
        else:
            hi = theta
        if dg != 0 and math.isfinite(dg):
            cand = theta - g / dg
        else:
            cand = math.nan
        if not (lo < cand < hi):
            cand = 0.5 * (lo + hi)
        theta = cand
        g, dg = residual(theta)
        iters += 1
        if abs(g) <= cfg.tolerance:
            converged = True
            break
    if converged:
        return theta, SolverStats(iters, g, True)
    if not cfg.fallback_to_bisection:
        return theta, SolverStats(iters, g, False)
    if orient * g > 0:
        lo = theta
    else:
        hi = theta
    theta, extra, g, ok = _bisect_loop(
        residual, lo, hi, orient, cfg.tolerance, cfg.max_iters
    )
    return theta, SolverStats(iters + extra, g, ok, used_fallback=True)


def adaprox_solve(x_g, d_g, alpha: float, penalty: PenaltyConfig, cfg: SolverConfig):
    """Fixed-point baseline for the weighted prox of one group.

    Starting from z = x_g, repeats

        z <- prox_unweighted(z - (1/d_max) * D (z - x_g); step = alpha/d_max)

    and stops when the step norm drops to cfg.tolerance or after
    cfg.max_iters updates. Non-convergence is reported through
    ``stats.converged``, never as an error. ``stats.final_residual`` holds the
    last step norm.
    """
    from . import _kernels

    x = np.ascontiguousarray(x_g, dtype=np.float64)
    d = np.ascontiguousarray(d_g, dtype=np.float64)
    if x.shape != d.shape:
        raise ValueError("x_g and d_g must have matching shapes")
    if np.any(d <= 0):
        raise ValueError("preconditioner entries must be > 0")
    if not alpha > 0:
        raise ValueError("alpha must be > 0")
    lam = penalty.lambda_for_size(x.size)
    is_mcp = penalty.kind == GROUP_MCP
    beta = penalty.beta if is_mcp else 0.0
    if is_mcp and not alpha / float(d.max()) < beta:
        raise ValueError("adaprox inner step needs alpha/d_max < beta")
    z, iters, step_norm, converged = _kernels.kernels().adaprox_loop(
        x, d, alpha, lam, float(beta), is_mcp, cfg.tolerance, cfg.max_iters
    )
    return z, SolverStats(iters, step_norm, converged)
