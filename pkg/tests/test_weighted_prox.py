import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groupprox import (
    GROUP_MCP,
    MIXED_L1L2,
    NotInteriorError,
    PenaltyConfig,
    SolverConfig,
    StepSizeError,
    GroupPartition,
    contiguous_partition,
    theta_bounds_l2,
    theta_bounds_mcp,
    theta_residual_l2,
    theta_residual_mcp,
    weighted_prox_full,
    weighted_prox_l2,
    weighted_prox_mcp_l2,
)
from groupprox.oracle import objective_value

TIGHT = SolverConfig(tolerance=1e-14)

# independently computed by bisecting the residual to 1e-15 and cross-checked
# against a dense grid minimization of the objective
L2_X = np.array([1.0, 1.0])
L2_D = np.array([1.0, 2.0])
L2_THETA = 0.7266631263595278
L2_Z = np.array([0.4208482333734746, 0.5923901279368424])
L2_WEIGHTED_NORM = 1.2573056471048274  # ||D z||, which the root does NOT equal

MCP_X = np.array([0.5, 0.4])
MCP_D = np.array([1.0, 2.0])
MCP_THETA = 0.5786530884027634  # alpha=0.5, beta=4, lam=0.3


def test_l2_interior_matches_frozen_root():
    out = weighted_prox_l2(L2_X, L2_D, 1.0, 1.0, TIGHT)
    assert out.branch == "interior"
    assert abs(out.theta_star - L2_THETA) < 1e-12
    assert np.allclose(out.z, L2_Z, rtol=0, atol=1e-12)


def test_root_equals_solution_norm_not_weighted_norm():
    out = weighted_prox_l2(L2_X, L2_D, 1.0, 1.0, TIGHT)
    assert abs(np.linalg.norm(out.z) - out.theta_star) < 1e-12
    wn = float(np.linalg.norm(L2_D * out.z))
    assert abs(wn - L2_WEIGHTED_NORM) < 1e-10
    assert abs(wn - out.theta_star) > 0.5  # the two norms differ materially here


def test_mcp_interior_matches_frozen_root():
    out = weighted_prox_mcp_l2(MCP_X, MCP_D, 0.5, 4.0, 0.3, TIGHT)
    assert out.branch == "interior"
    assert abs(out.theta_star - MCP_THETA) < 1e-12
    assert abs(np.linalg.norm(out.z) - out.theta_star) < 1e-12


def test_l2_zero_branch_exact_including_tie():
    x = np.array([3.0, 4.0])
    d = np.ones(2)
    out = weighted_prox_l2(x, d, 1.0, 5.0)  # ||Dx|| == alpha*lam exactly
    assert out.branch == "zero"
    assert not np.any(out.z)
    assert out.stats.iterations == 0
    out2 = weighted_prox_l2(x, d, 1.0, 6.0)
    assert out2.branch == "zero" and not np.any(out2.z)


def test_l2_residual_value():
    # G(theta) = sum (d_i x_i / (d_i theta + tau))^2 - 1, by hand at theta=1
    g, dg = theta_residual_l2(1.0, np.array([1.0]), np.array([1.0]), 1.0)
    assert g == pytest.approx((1.0 / 2.0) ** 2 - 1.0)  # -0.75
    assert dg == pytest.approx(-2.0 * 1.0 / 8.0)


def test_mcp_residual_well_conditioned_at_huge_beta():
    # for beta -> inf the MCP residual tends to the l2 residual; at beta=1e8
    # the normalized evaluation must stay finite and close to -0.75
    g, dg = theta_residual_mcp(1.0, np.array([1.0]), np.array([1.0]), 1.0, 1e8, 1.0)
    assert g == pytest.approx(-0.75, abs=1e-7)
    assert np.isfinite(dg)


def test_theta_bounds_contain_roots():
    rng = np.random.default_rng(11)
    for _ in range(50):
        dim = int(rng.integers(1, 8))
        x = rng.standard_normal(dim)
        d = np.exp(rng.uniform(-2.0, 2.0, size=dim))
        ndx = float(np.linalg.norm(d * x))
        tau = 0.5 * ndx
        br = theta_bounds_l2(x, d, tau)
        out = weighted_prox_l2(x, d, 1.0, tau, TIGHT)
        assert br.lower <= out.theta_star <= br.upper


def test_theta_bounds_reject_non_interior():
    x = np.array([1.0, 1.0])
    d = np.ones(2)
    with pytest.raises(NotInteriorError):
        theta_bounds_l2(x, d, 10.0)  # zero branch
    with pytest.raises(NotInteriorError):
        theta_bounds_mcp(x, d, 0.5, 2.0, 0.1)  # identity branch: ||x|| > beta*lam
    with pytest.raises(StepSizeError):
        theta_bounds_mcp(x, d, 3.0, 2.0, 2.0)  # alpha >= beta*d_min


def test_mcp_identity_branch_is_bit_exact():
    x = np.array([0.3, -0.7, 1.1])
    d = np.array([0.5, 2.0, 1.5])
    out = weighted_prox_mcp_l2(x, d, 0.2, 2.0, 0.1)  # beta*lam = 0.2 < ||x||
    assert out.branch == "identity"
    assert np.array_equal(out.z, x)
    assert out.z is not x  # a copy, never a view of the input
    assert out.stats.iterations == 0


def test_mcp_zero_branch():
    x = np.array([0.01, 0.02])
    d = np.ones(2)
    # ||x|| small: inside beta*lam and ||Dx|| <= alpha*lam
    out = weighted_prox_mcp_l2(x, d, 1.0, 2.0, 0.5)
    assert out.branch == "zero"
    assert not np.any(out.z)


def test_mcp_identity_tie_goes_interior():
    x = np.array([0.6, 0.8])  # ||x|| = 1 == beta*lam
    d = np.ones(2)
    out = weighted_prox_mcp_l2(x, d, 0.5, 2.0, 0.5, TIGHT)
    assert out.branch == "interior"
    # at the boundary the interior solution coincides with the input
    assert np.allclose(out.z, x, atol=1e-12)


def test_mcp_step_violation_raises_by_default():
    x = np.array([1.0, 1.0])
    d = np.array([0.1, 0.2])
    with pytest.raises(StepSizeError):
        weighted_prox_mcp_l2(x, d, 1.0, 2.0, 0.5)


def test_mcp_step_violation_clamp_policy():
    x = np.array([1.0, 1.0])
    d = np.array([0.1, 0.2])
    with pytest.warns(RuntimeWarning, match="clamped"):
        out = weighted_prox_mcp_l2(
            x, d, 1.0, 2.0, 0.5, TIGHT, on_step_violation="clamp"
        )
    assert out.clamped
    # behaves exactly like running with the clamped step
    ref = weighted_prox_mcp_l2(x, d, 0.99 * 2.0 * 0.1, 2.0, 0.5, TIGHT)
    assert np.array_equal(out.z, ref.z)
    assert out.branch == ref.branch


def test_large_beta_mcp_approaches_l2():
    rng = np.random.default_rng(21)
    for _ in range(20):
        x = rng.standard_normal(3)
        d = np.exp(rng.uniform(-1.0, 1.0, size=3))
        lam = 0.4
        a = weighted_prox_mcp_l2(x, d, 0.7, 1e8, lam, SolverConfig(tolerance=1e-12))
        b = weighted_prox_l2(x, d, 0.7, lam, SolverConfig(tolerance=1e-12))
        scale = max(float(np.linalg.norm(b.z)), 1e-12)
        assert float(np.linalg.norm(a.z - b.z)) / scale < 1e-6


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2**32 - 1),
    scale=st.floats(min_value=0.05, max_value=20.0),
)
def test_l2_prox_scaling_covariance(seed, scale):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(3)
    d = np.exp(rng.uniform(-1.0, 1.0, size=3))
    out = weighted_prox_l2(x, d, 1.0, 0.5, TIGHT)
    scaled = weighted_prox_l2(scale * x, d, 1.0, 0.5 * scale, TIGHT)
    assert np.allclose(scaled.z, scale * out.z, rtol=1e-9, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_prox_outputs_are_minimizers(seed):
    rng = np.random.default_rng(seed)
    dim = int(rng.integers(1, 5))
    x = rng.standard_normal(dim)
    d = np.exp(rng.uniform(-2.0, 2.0, size=dim))
    lam = float(rng.uniform(0.05, 1.5))
    out = weighted_prox_l2(x, d, 1.0, lam, TIGHT)
    f_star = float(objective_value(out.z, x, d, 1.0, MIXED_L1L2, lam))
    for _ in range(12):
        cand = out.z + rng.standard_normal(dim) * rng.uniform(0.001, 0.5)
        assert f_star <= float(objective_value(cand, x, d, 1.0, MIXED_L1L2, lam)) + 1e-10

    beta = float(rng.uniform(1.5, 30.0))
    alpha = 0.9 * beta * float(d.min())
    alpha = min(alpha, 2.0)
    mcp = weighted_prox_mcp_l2(x, d, alpha, beta, lam, TIGHT)
    f_star = float(objective_value(mcp.z, x, d, alpha, GROUP_MCP, lam, beta))
    for cand in (x, np.zeros(dim), 0.5 * x):
        assert (
            f_star
            <= float(objective_value(cand, x, d, alpha, GROUP_MCP, lam, beta)) + 1e-10
        )


def test_full_prox_passthrough_and_stats():
    # groups: [0,1] -> zero branch, [2,3] -> interior; coordinate 4 ungrouped
    # non-uniform d on the interior group so the root actually needs iterating
    v = np.array([0.01, 0.01, 3.0, 4.0, 9.9])
    d = np.array([1.0, 1.0, 1.0, 2.0, 1.0])
    partition = GroupPartition([[0, 1], [2, 3]], n_params=5)
    penalty = PenaltyConfig(MIXED_L1L2, 0.5, group_weight_rule="unit")
    out, stats = weighted_prox_full(v, partition, penalty, d, 1.0, TIGHT)
    assert out[4] == 9.9  # unpenalized coordinate untouched
    assert not np.any(out[:2])
    assert np.all(out[2:4] != 0)
    assert stats.n_groups == 2
    assert stats.zero_groups == 1
    assert stats.interior_groups == 1
    assert stats.total_iterations >= 1
    assert stats.iterations_per_group() == stats.total_iterations / 2


def test_full_prox_all_zero_group_short_circuits():
    v = np.zeros(4)
    partition = contiguous_partition(2, 2)
    penalty = PenaltyConfig(MIXED_L1L2, 0.5)
    out, stats = weighted_prox_full(v, partition, penalty, np.ones(4), 1.0)
    assert not np.any(out)
    assert stats.zero_groups == 2
    assert stats.total_iterations == 0


def test_full_prox_rejects_mismatched_sizes():
    v = np.zeros(4)
    partition = contiguous_partition(2, 2)
    penalty = PenaltyConfig(MIXED_L1L2, 0.5)
    with pytest.raises(ValueError, match="n_params"):
        weighted_prox_full(v, GroupPartition([[0]], n_params=3), penalty, np.ones(4), 1.0)
    with pytest.raises(ValueError):
        weighted_prox_full(v, partition, penalty, np.ones(3), 1.0)


def test_full_prox_collects_failing_groups():
    v = np.array([1.0, 1.0, 1.0, 1.0, 1.0, 1.0])
    d = np.array([1.0, 1.0, 0.01, 0.01, 0.01, 0.01])
    partition = contiguous_partition(3, 2)
    penalty = PenaltyConfig(GROUP_MCP, 0.5, beta=2.0)
    # groups 1 and 2 violate alpha < beta*d_min under raise policy
    with pytest.raises(StepSizeError, match=r"group 1: .*failing groups: 1, 2"):
        weighted_prox_full(v, partition, penalty, d, 1.0)


def test_full_prox_adaprox_method_agrees():
    rng = np.random.default_rng(4)
    v = rng.standard_normal(6)
    d = np.exp(rng.uniform(-1.0, 1.0, size=6))
    partition = contiguous_partition(3, 2)
    penalty = PenaltyConfig(MIXED_L1L2, 0.3)
    exact, _ = weighted_prox_full(v, partition, penalty, d, 1.0, TIGHT)
    ada, stats = weighted_prox_full(
        v,
        partition,
        penalty,
        d,
        1.0,
        SolverConfig(method="adaprox", tolerance=1e-12, max_iters=5000),
    )
    assert np.allclose(ada, exact, atol=1e-8)
    assert stats.n_groups == 3
