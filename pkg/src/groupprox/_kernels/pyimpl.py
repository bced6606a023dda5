"""Numpy implementation of the per-group kernels.

Reference backend; the compiled module in ``_cykernels`` implements the same
two entry points with identical algorithmic semantics (same iterate sequence,
same stopping rules), differing from this one only by floating-point
summation order.
"""

from __future__ import annotations

import numpy as np

from ..solvers import SolverConfig, ThetaBracket, bisection_solve, newton_solve

NAME = "python"


def solve_theta(num, slope, tau, lower, upper, tol, max_iters, method, fallback):
    """Root of G(t) = sum((num_i / (slope_i t + tau))^2) - 1 on [lower, upper].

    Both penalty families reduce to this residual: slope = d for the l2 case
    and slope = d - alpha/beta for the MCP case, with tau = alpha * lambda_g
    and num = d * x_g.

    Returns (theta, iterations, final_residual, converged, used_fallback).
    """
    num2 = num * num

    def residual(theta):
        den = slope * theta + tau
        g = float(np.sum(num2 / (den * den))) - 1.0
        dg = -2.0 * float(np.sum(num2 * slope / (den * den * den)))
        return g, dg

    cfg = SolverConfig(
        method="newton" if method == "newton" else "bisection",
        tolerance=tol,
        max_iters=max_iters,
        fallback_to_bisection=fallback,
    )
    bracket = ThetaBracket(lower, upper)
    if method == "newton":
        theta, stats = newton_solve(residual, bracket, cfg)
    else:
        theta, stats = bisection_solve(residual, bracket, cfg)
    return theta, stats.iterations, stats.final_residual, stats.converged, stats.used_fallback


def adaprox_loop(x, d, alpha, lam, beta, is_mcp, tol, max_iters):
    """Proximal fixed-point iteration for one group, starting at z = x.

    Returns (z, iterations, last_step_norm, converged).
    """
    d_max = float(d.max())
    step = alpha / d_max
    scale_d = d / d_max
    z = x.copy()
    step_norm = np.inf
    iters = 0
    for iters in range(1, max_iters + 1):
        y = z - scale_d * (z - x)
        r = float(np.linalg.norm(y))
        z_new = _radial_prox(y, r, step, lam, beta, is_mcp)
        step_norm = float(np.linalg.norm(z_new - z))
        z = z_new
        if step_norm <= tol:
            return z, iters, step_norm, True
    return z, iters, step_norm, False


def _radial_prox(y, r, step, lam, beta, is_mcp):
    if not is_mcp:
        if r <= step * lam:
            return np.zeros_like(y)
        return (1.0 - step * lam / r) * y
    if r > beta * lam:
        return y.copy()
    if r <= step * lam:
        return np.zeros_like(y)
    return (beta / (beta - step)) * (1.0 - step * lam / r) * y
