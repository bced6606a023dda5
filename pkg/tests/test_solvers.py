import math

import numpy as np
import pytest

from groupprox import (
    BadBracketError,
    PenaltyConfig,
    SolverConfig,
    ThetaBracket,
    adaprox_solve,
    bisection_solve,
    newton_solve,
    prox_l2_unweighted,
)


def analytic_residual(c):
    """G(t) = c/(t+1)^2 - 1 with root sqrt(c) - 1; G' = -2c/(t+1)^3."""

    def residual(t):
        den = t + 1.0
        return c / den**2 - 1.0, -2.0 * c / den**3

    return residual


def test_bracket_validation():
    ThetaBracket(0.0, 1.0)
    ThetaBracket(2.0, 2.0)  # collapsed is allowed
    with pytest.raises(ValueError):
        ThetaBracket(-1.0, 1.0)
    with pytest.raises(ValueError):
        ThetaBracket(2.0, 1.0)
    with pytest.raises(ValueError):
        ThetaBracket(0.0, math.inf)


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(method="brent")
    with pytest.raises(ValueError):
        SolverConfig(tolerance=0.0)
    with pytest.raises(ValueError):
        SolverConfig(max_iters=0)
    cfg = SolverConfig().with_tolerance(1e-10)
    assert cfg.tolerance == 1e-10 and cfg.method == "newton"


@pytest.mark.parametrize("solve", [newton_solve, bisection_solve])
def test_solvers_find_analytic_root(solve):
    root = math.sqrt(9.0) - 1.0
    cfg = SolverConfig(tolerance=1e-12, max_iters=200)
    theta, stats = solve(analytic_residual(9.0), ThetaBracket(0.5, 5.0), cfg)
    assert abs(theta - root) < 1e-10
    assert stats.converged
    assert abs(stats.final_residual) <= 1e-12
    assert stats.iterations >= 1


def test_collapsed_bracket_reports_zero_iterations():
    root = math.sqrt(9.0) - 1.0
    cfg = SolverConfig(tolerance=1e-9)
    for solve in (newton_solve, bisection_solve):
        theta, stats = solve(analytic_residual(9.0), ThetaBracket(root, root), cfg)
        assert theta == root
        assert stats.iterations == 0
        assert stats.converged


def test_endpoint_already_converged_counts_zero():
    root = math.sqrt(4.0) - 1.0
    cfg = SolverConfig(tolerance=1e-6)
    theta, stats = newton_solve(analytic_residual(4.0), ThetaBracket(root, 9.0), cfg)
    assert theta == root and stats.iterations == 0


def test_bisection_rejects_sign_consistent_bracket():
    with pytest.raises(BadBracketError):
        bisection_solve(
            analytic_residual(9.0), ThetaBracket(0.1, 0.5), SolverConfig()
        )  # root is at 2, residual positive on the whole bracket


def test_newton_fallback_accumulates_iterations():
    cfg = SolverConfig(tolerance=1e-12, max_iters=2, fallback_to_bisection=True)
    theta, stats = newton_solve(analytic_residual(9.0), ThetaBracket(0.0, 100.0), cfg)
    assert stats.used_fallback
    assert stats.iterations > 2  # newton phase + bisection phase
    # fallback bisection gets its own max_iters budget on the narrowed bracket
    assert stats.iterations <= 4
    if stats.converged:
        assert abs(theta - 2.0) < 1e-6


def test_newton_no_fallback_reports_nonconvergence():
    cfg = SolverConfig(tolerance=1e-14, max_iters=1, fallback_to_bisection=False)
    theta, stats = newton_solve(analytic_residual(9.0), ThetaBracket(0.0, 100.0), cfg)
    assert not stats.converged
    assert not stats.used_fallback
    assert stats.iterations == 1


def test_newton_stays_inside_bracket():
    # derivative near zero at the lower endpoint would fling a raw newton
    # step far out; the safeguard must clamp to the midpoint instead
    def residual(t):
        g = (t - 2.0) ** 3 + 1e-12 * (t - 2.0)
        dg = 3.0 * (t - 2.0) ** 2 + 1e-12
        return g, dg

    cfg = SolverConfig(tolerance=1e-10, max_iters=100)
    theta, stats = newton_solve(residual, ThetaBracket(0.0, 10.0), cfg)
    assert 0.0 <= theta <= 10.0
    assert abs(theta - 2.0) < 1e-3


def test_adaprox_spherical_reaches_fixed_point_fast():
    # with d = c*ones the inner map is the exact prox: one improving update,
    # then one more to observe the zero step and stop
    x = np.array([3.0, 4.0])
    d = np.full(2, 2.0)
    pen = PenaltyConfig("mixed_l1l2", 1.0, group_weight_rule="unit")
    z, stats = adaprox_solve(x, d, 1.0, pen, SolverConfig(tolerance=1e-12))
    expect = prox_l2_unweighted(x, 1.0 / 2.0)
    assert np.allclose(z, expect, atol=1e-12)
    assert stats.converged
    assert stats.iterations <= 2


def test_adaprox_matches_newton_on_nonuniform_metric():
    rng = np.random.default_rng(5)
    from groupprox import weighted_prox_l2

    for _ in range(20):
        x = rng.standard_normal(4)
        d = np.exp(rng.uniform(-1.5, 1.5, size=4))
        lam = 0.4
        pen = PenaltyConfig("mixed_l1l2", lam, group_weight_rule="unit")
        z, stats = adaprox_solve(
            x, d, 1.0, pen, SolverConfig(tolerance=1e-12, max_iters=10000)
        )
        ref = weighted_prox_l2(x, d, 1.0, lam, SolverConfig(tolerance=1e-14))
        assert np.allclose(z, ref.z, atol=1e-9)


def test_adaprox_nonconvergence_is_reported_not_raised():
    rng = np.random.default_rng(8)
    x = rng.standard_normal(6)
    d = np.exp(rng.uniform(-2.0, 2.0, size=6))
    pen = PenaltyConfig("mixed_l1l2", 0.3, group_weight_rule="unit")
    z, stats = adaprox_solve(x, d, 1.0, pen, SolverConfig(tolerance=1e-16, max_iters=3))
    assert not stats.converged
    assert stats.iterations == 3
    assert np.all(np.isfinite(z))


def test_adaprox_mcp_needs_valid_inner_step():
    pen = PenaltyConfig("group_mcp", 0.5, beta=1.5, group_weight_rule="unit")
    with pytest.raises(ValueError, match="alpha/d_max < beta"):
        adaprox_solve(np.array([1.0]), np.array([0.5]), 1.0, pen, SolverConfig())
