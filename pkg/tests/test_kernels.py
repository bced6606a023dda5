"""Cross-backend contract: same branches, same iteration counts, and results
matching to 1e-12 relative (summation order may differ between numpy and the
compiled loops, so bitwise equality is not promised across backends)."""

import subprocess
import sys

import numpy as np
import pytest

from groupprox import _kernels

HAVE_CYTHON = "cython" in _kernels.available_backends()

needs_both = pytest.mark.skipif(
    not HAVE_CYTHON, reason="compiled extension not built"
)


def _instances(n=300, seed=0, mcp=False):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        dim = int(rng.integers(1, 40))
        x = rng.standard_normal(dim)
        d = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), size=dim))
        ndx = float(np.linalg.norm(d * x))
        tau = ndx * float(np.exp(rng.uniform(-2.0, -0.05)))
        if mcp:
            # slopes d - alpha/beta stay positive by construction
            ab = 0.5 * float(d.min())
            slope = d - ab
        else:
            slope = d
        lower = (ndx - tau) / float(slope.max())
        upper = (ndx - tau) / float(slope.min())
        out.append((d * x, slope, tau, lower, upper))
    return out


def test_backend_registry():
    names = _kernels.available_backends()
    assert "python" in names
    assert _kernels.backend_name() in names
    impl = _kernels.kernels()
    assert hasattr(impl, "solve_theta") and hasattr(impl, "adaprox_loop")


def test_set_backend_round_trip():
    start = _kernels.backend_name()
    _kernels.set_backend("python")
    assert _kernels.backend_name() == "python"
    _kernels.set_backend("auto")
    assert _kernels.backend_name() == ("cython" if HAVE_CYTHON else "python")
    _kernels.set_backend(start)
    with pytest.raises(ValueError):
        _kernels.set_backend("fortran")


@needs_both
@pytest.mark.parametrize("method", ["newton", "bisection"])
@pytest.mark.parametrize("mcp", [False, True])
def test_solve_theta_parity(method, mcp):
    py = _kernels._BACKENDS["python"]
    cy = _kernels._BACKENDS["cython"]
    for num, slope, tau, lower, upper in _instances(mcp=mcp):
        a = py.solve_theta(num, slope, tau, lower, upper, 1e-8, 100, method, True)
        b = cy.solve_theta(num, slope, tau, lower, upper, 1e-8, 100, method, True)
        # (theta, iterations, final_residual, converged, used_fallback)
        assert abs(a[0] - b[0]) <= 1e-12 * max(abs(a[0]), 1.0)
        assert a[1] == b[1]
        assert a[3] == b[3]
        assert a[4] == b[4]


@needs_both
@pytest.mark.parametrize("mcp", [False, True])
def test_adaprox_parity(mcp):
    py = _kernels._BACKENDS["python"]
    cy = _kernels._BACKENDS["cython"]
    rng = np.random.default_rng(3)
    for _ in range(200):
        dim = int(rng.integers(1, 24))
        x = rng.standard_normal(dim)
        d = np.exp(rng.uniform(-2.0, 2.0, size=dim))
        lam = float(rng.uniform(0.05, 1.5))
        beta = float(rng.uniform(1.5, 20.0)) if mcp else 0.0
        alpha = 0.5 * float(d.max()) * beta if mcp else 1.0
        alpha = min(alpha, 1.0) if mcp else alpha
        za, ia, sa, ca = py.adaprox_loop(x, d, alpha, lam, beta, mcp, 1e-10, 100)
        zb, ib, sb, cb = cy.adaprox_loop(x, d, alpha, lam, beta, mcp, 1e-10, 100)
        scale = max(float(np.max(np.abs(za))), 1.0)
        assert float(np.max(np.abs(za - zb))) <= 1e-12 * scale
        assert ia == ib
        assert ca == cb


@needs_both
def test_backends_agree_through_public_api():
    from groupprox import SolverConfig, set_backend, weighted_prox_mcp_l2

    x = np.array([0.5, 0.4])
    d = np.array([1.0, 2.0])
    tight = SolverConfig(tolerance=1e-14)
    set_backend("cython")
    a = weighted_prox_mcp_l2(x, d, 0.5, 4.0, 0.3, tight)
    set_backend("python")
    b = weighted_prox_mcp_l2(x, d, 0.5, 4.0, 0.3, tight)
    set_backend("auto")
    assert a.stats.iterations == b.stats.iterations
    assert abs(a.theta_star - b.theta_star) <= 1e-13


def test_env_var_selects_backend():
    code = (
        "import groupprox; print(groupprox.backend_name())"
    )
    out = subprocess.run(
        [sys.executable, "-c", code],
        env={"PATH": "/usr/bin:/bin", "GROUPPROX_KERNELS": "python"},
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "python"


def test_env_var_rejects_unknown_backend():
    code = "import groupprox"
    out = subprocess.run(
        [sys.executable, "-c", code],
        env={"PATH": "/usr/bin:/bin", "GROUPPROX_KERNELS": "cuda"},
        capture_output=True,
        text=True,
    )
    assert out.returncode != 0
