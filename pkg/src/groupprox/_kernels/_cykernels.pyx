# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-group kernels: theta root solve and the AdaProx loop.

Mirrors pyimpl exactly: same iterate sequences and stopping rules. The only
permitted difference is floating-point summation order (sequential here,
pairwise in numpy).
"""

from libc.math cimport fabs, isfinite, sqrt, INFINITY

import numpy as np

NAME = "cython"


cdef inline void _eval_residual(
    const double[::1] num2,
    const double[::1] slope,
    double tau,
    double theta,
    double* g_out,
    double* dg_out,
) noexcept nogil:
    cdef Py_ssize_t i, n = num2.shape[0]
    cdef double g = 0.0, dg = 0.0, den
    for i in range(n):
        den = slope[i] * theta + tau
        g += num2[i] / (den * den)
        dg += num2[i] * slope[i] / (den * den * den)
    g_out[0] = g - 1.0
    dg_out[0] = -2.0 * dg


def solve_theta(object num_obj, object slope_obj, double tau, double lower,
                double upper, double tol, int max_iters, str method,
                bint fallback):
    """Same contract as pyimpl.solve_theta."""
    cdef double[::1] num = np.ascontiguousarray(num_obj, dtype=np.float64)
    cdef double[::1] slope = np.ascontiguousarray(slope_obj, dtype=np.float64)
    cdef double[::1] num2 = np.asarray(num) * np.asarray(num)

    cdef double lo = lower, hi = upper
    cdef double theta, g, dg, orient, cand
    cdef int iters = 0, extra = 0
    cdef bint converged = False, used_fallback = False
    cdef bint use_newton = (method == "newton")

    theta = lo
    _eval_residual(num2, slope, tau, theta, &g, &dg)
    if fabs(g) <= tol or hi <= lo:
        return theta, 0, g, fabs(g) <= tol, False
    orient = 1.0 if g > 0 else -1.0

    if use_newton:
        while iters < max_iters:
            if orient * g > 0:
                lo = theta
            else:
                hi = theta
            if dg != 0 and isfinite(dg):
                cand = theta - g / dg
            else:
                cand = INFINITY
            if not (lo < cand < hi):
                cand = 0.5 * (lo + hi)
            theta = cand
            _eval_residual(num2, slope, tau, theta, &g, &dg)
            iters += 1
            if fabs(g) <= tol:
                converged = True
                break
        if converged:
            return theta, iters, g, True, False
        if not fallback:
            return theta, iters, g, False, False
        if orient * g > 0:
            lo = theta
        else:
            hi = theta
        used_fallback = True
    else:
        # bisection path mirrors solvers.bisection_solve: check far endpoint,
        # then bisect (endpoint evaluations are not counted as iterations)
        _eval_residual(num2, slope, tau, hi, &g, &dg)
        if fabs(g) <= tol:
            return hi, 0, g, True, False

    for extra in range(1, max_iters + 1):
        theta = 0.5 * (lo + hi)
        _eval_residual(num2, slope, tau, theta, &g, &dg)
        if fabs(g) <= tol:
            return theta, iters + extra, g, True, used_fallback
        if orient * g > 0:
            lo = theta
        else:
            hi = theta
    return theta, iters + max_iters, g, False, used_fallback


def adaprox_loop(object x_obj, object d_obj, double alpha, double lam,
                 double beta, bint is_mcp, double tol, int max_iters):
    """Same contract as pyimpl.adaprox_loop."""
    cdef double[::1] x = np.ascontiguousarray(x_obj, dtype=np.float64)
    cdef double[::1] d = np.ascontiguousarray(d_obj, dtype=np.float64)
    cdef Py_ssize_t i, n = x.shape[0]

    z_arr = np.array(x_obj, dtype=np.float64, copy=True)
    cdef double[::1] z = z_arr
    y_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] y = y_arr

    cdef double d_max = 0.0
    for i in range(n):
        if d[i] > d_max:
            d_max = d[i]
    cdef double step = alpha / d_max
    cdef double thresh = step * lam
    cdef double r, scale, diff, step_norm = INFINITY
    cdef int iters = 0
    cdef bint converged = False

    while iters < max_iters:
        r = 0.0
        for i in range(n):
            y[i] = z[i] - (d[i] / d_max) * (z[i] - x[i])
            r += y[i] * y[i]
        r = sqrt(r)
        if is_mcp and r > beta * lam:
            scale = 1.0
        elif r <= thresh:
            scale = 0.0
        elif is_mcp:
            scale = (beta / (beta - step)) * (1.0 - thresh / r)
        else:
            scale = 1.0 - thresh / r
        step_norm = 0.0
        for i in range(n):
            diff = scale * y[i] - z[i]
            step_norm += diff * diff
            z[i] = scale * y[i]
        step_norm = sqrt(step_norm)
        iters += 1
        if step_norm <= tol:
            converged = True
            break
    return z_arr, iters, step_norm, converged
