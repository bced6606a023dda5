"""Compare the compiled kernels against the pure-numpy fallback.

Times the scalar root solve and the fixed-point baseline over a seeded batch
of groups, and checks the cross-backend contract: roots and outputs agree to
1e-12 relative (numpy's pairwise summation and the C loop's sequential sums
round differently) and iteration counts match exactly.

Run: python3 benchmarks/bench_backends.py [--groups 20000] [--dim 64]
"""

import argparse
import time

import numpy as np

from groupprox import _kernels


def make_batch(n_groups, dim, seed=0):
    rng = np.random.default_rng(seed)
    batch = []
    for _ in range(n_groups):
        x = rng.standard_normal(dim)
        d = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), size=dim))
        ndx = float(np.linalg.norm(d * x))
        tau = ndx * float(np.exp(rng.uniform(-2.0, -0.05)))
        lower = (ndx - tau) / float(d.max())
        upper = (ndx - tau) / float(d.min())
        batch.append((d * x, d.copy(), tau, lower, upper))
    return batch


def run_solves(impl, batch, method):
    out = []
    t0 = time.perf_counter()
    for num, slope, tau, lower, upper in batch:
        out.append(impl.solve_theta(num, slope, tau, lower, upper, 1e-10, 100, method, True))
    return time.perf_counter() - t0, out


def run_adaprox(impl, batch):
    out = []
    t0 = time.perf_counter()
    for num, slope, tau, lower, upper in batch:
        x = num / slope
        out.append(impl.adaprox_loop(x, slope, 1.0, tau, 0.0, False, 1e-10, 100))
    return time.perf_counter() - t0, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--groups", type=int, default=20000)
    ap.add_argument("--dim", type=int, default=64)
    args = ap.parse_args()

    names = _kernels.available_backends()
    if len(names) < 2:
        print(f"only {names} available; compiled extension not built")
    batch = make_batch(args.groups, args.dim)

    results = {}
    for name in names:
        impl = _kernels._BACKENDS[name]
        t_newton, out_n = run_solves(impl, batch, "newton")
        t_bisect, out_b = run_solves(impl, batch, "bisection")
        t_ada, out_a = run_adaprox(impl, batch)
        results[name] = (out_n, out_b, out_a)
        print(
            f"{name:>8}: newton {t_newton:.3f}s  bisection {t_bisect:.3f}s  "
            f"adaprox {t_ada:.3f}s   ({args.groups} groups, dim {args.dim})"
        )

    if len(names) == 2:
        a, b = (results[n] for n in names)
        for kind, (ra, rb) in zip(("newton", "bisection"), zip(a, b)):
            theta_dev = max(
                abs(x[0] - y[0]) / max(abs(y[0]), 1e-300) for x, y in zip(ra, rb)
            )
            iters_equal = all(x[1] == y[1] for x, y in zip(ra, rb))
            ok = theta_dev <= 1e-12 and iters_equal
            print(
                f"{kind}: max rel theta deviation {theta_dev:.2e}, "
                f"iteration counts equal: {iters_equal} -> {'OK' if ok else 'FAIL'}"
            )
        za, zb = a[2], b[2]
        z_dev = max(
            float(np.max(np.abs(x[0] - y[0])) / max(np.max(np.abs(y[0])), 1e-300))
            for x, y in zip(za, zb)
        )
        i_equal = all(x[1] == y[1] for x, y in zip(za, zb))
        ok = z_dev <= 1e-12 and i_equal
        print(
            f"adaprox: max rel output deviation {z_dev:.2e}, "
            f"iteration counts equal: {i_equal} -> {'OK' if ok else 'FAIL'}"
        )


if __name__ == "__main__":
    main()
