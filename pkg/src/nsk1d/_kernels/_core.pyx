# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the CIP advection / finite-difference inner loop.

Same contracts as ``pure.py``; written with identical expression ordering so
the two backends agree to rounding noise.
"""

from libc.math cimport floor, fabs

import numpy as np

BACKEND_NAME = "cython"


cdef inline void _eval_one(const double* v, const double* d, Py_ssize_t nx,
                           double h, double x, double* out_val, double* out_der) noexcept nogil:
    cdef double xw = x - floor(x)
    cdef double s = xw * nx
    cdef Py_ssize_t j = <Py_ssize_t>s
    if j > nx - 1:
        j = nx - 1
    cdef double xi = s - j
    cdef Py_ssize_t jp = j + 1
    if jp == nx:
        jp = 0
    cdef double v0 = v[j]
    cdef double v1 = v[jp]
    cdef double d0 = d[j]
    cdef double d1 = d[jp]
    cdef double h00 = (2.0 * xi - 3.0) * xi * xi + 1.0
    cdef double h10 = xi * ((xi - 2.0) * xi + 1.0)
    cdef double h01 = xi * xi * (3.0 - 2.0 * xi)
    cdef double h11 = xi * xi * (xi - 1.0)
    out_val[0] = v0 * h00 + v1 * h01 + h * (d0 * h10 + d1 * h11)
    cdef double g00 = 6.0 * xi * (xi - 1.0)
    cdef double g10 = (3.0 * xi - 1.0) * (xi - 1.0)
    cdef double g11 = xi * (3.0 * xi - 2.0)
    out_der[0] = (v0 - v1) * g00 / h + d0 * g10 + d1 * g11


def interp_eval(values, derivs, double h, x):
    cdef double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef double[::1] d = np.ascontiguousarray(derivs, dtype=np.float64)
    x_arr = np.ascontiguousarray(np.atleast_1d(np.asarray(x, dtype=np.float64)))
    cdef double[::1] xq = x_arr
    cdef Py_ssize_t n = xq.shape[0], nx = v.shape[0], i
    val_arr = np.empty(n)
    der_arr = np.empty(n)
    cdef double[::1] val = val_arr
    cdef double[::1] der = der_arr
    with nogil:
        for i in range(n):
            _eval_one(&v[0], &d[0], nx, h, xq[i], &val[i], &der[i])
    if np.asarray(x).ndim == 0:
        return float(val_arr[0]), float(der_arr[0])
    return val_arr, der_arr


cdef inline double _lin_one(const double* v, Py_ssize_t nx, double x) noexcept nogil:
    cdef double xw = x - floor(x)
    cdef double s = xw * nx
    cdef Py_ssize_t j = <Py_ssize_t>s
    if j > nx - 1:
        j = nx - 1
    cdef double xi = s - j
    cdef Py_ssize_t jp = j + 1
    if jp == nx:
        jp = 0
    return v[j] * (1.0 - xi) + v[jp] * xi


def trace_rk4(w_values, w_derivs, double h, double tau, x0):
    cdef double[::1] wv = np.ascontiguousarray(w_values, dtype=np.float64)
    cdef double[::1] wd = np.ascontiguousarray(w_derivs, dtype=np.float64)
    cdef double[::1] xs = np.ascontiguousarray(x0, dtype=np.float64)
    wxx_arr = np.empty(wv.shape[0])
    cdef double[::1] wxx = wxx_arr
    with nogil:
        _d2_into(&wv[0], &wd[0], wv.shape[0], h, &wxx[0])
    cdef Py_ssize_t n = xs.shape[0], nx = wv.shape[0], i
    feet_arr = np.empty(n)
    jac_arr = np.empty(n)
    jacp_arr = np.empty(n)
    cdef double[::1] feet = feet_arr
    cdef double[::1] jac = jac_arr
    cdef double[::1] jacp = jacp_arr
    cdef double disp = 0.0, a, J
    cdef double w, wx, k1, k2, k3, k4, j1, j2, j3, j4, q1, q2, q3, q4, x, xp
    with nogil:
        for i in range(n):
            x = xs[i]
            _eval_one(&wv[0], &wd[0], nx, h, x, &w, &wx)
            k1 = -w; j1 = -wx
            q1 = -_lin_one(&wxx[0], nx, x)
            xp = x + 0.5 * tau * k1
            _eval_one(&wv[0], &wd[0], nx, h, xp, &w, &wx)
            J = 1.0 + 0.5 * tau * j1
            k2 = -w; j2 = -wx * J
            q2 = -(_lin_one(&wxx[0], nx, xp) * J * J + wx * (0.5 * tau * q1))
            xp = x + 0.5 * tau * k2
            _eval_one(&wv[0], &wd[0], nx, h, xp, &w, &wx)
            J = 1.0 + 0.5 * tau * j2
            k3 = -w; j3 = -wx * J
            q3 = -(_lin_one(&wxx[0], nx, xp) * J * J + wx * (0.5 * tau * q2))
            xp = x + tau * k3
            _eval_one(&wv[0], &wd[0], nx, h, xp, &w, &wx)
            J = 1.0 + tau * j3
            k4 = -w; j4 = -wx * J
            q4 = -(_lin_one(&wxx[0], nx, xp) * J * J + wx * (tau * q3))
            feet[i] = x + (tau / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            jac[i] = 1.0 + (tau / 6.0) * (j1 + 2.0 * j2 + 2.0 * j3 + j4)
            jacp[i] = (tau / 6.0) * (q1 + 2.0 * q2 + 2.0 * q3 + q4)
            a = fabs(k1)
            if fabs(k2) > a: a = fabs(k2)
            if fabs(k3) > a: a = fabs(k3)
            if fabs(k4) > a: a = fabs(k4)
            a = a * fabs(tau)
            if a > disp: disp = a
    return feet_arr, jac_arr, jacp_arr, disp


cdef inline Py_ssize_t _wrap(Py_ssize_t j, Py_ssize_t nx) noexcept nogil:
    if j >= nx:
        return j - nx
    if j < 0:
        return j + nx
    return j



cdef void _d2_into(const double* v, const double* d, Py_ssize_t nx, double h,
                   double* out) noexcept nogil:
    cdef Py_ssize_t j
    cdef double h2 = h * h
    for j in range(nx):
        out[j] = (
            (128.0 / 27.0) * (0.5 * (v[_wrap(j + 1, nx)] + v[_wrap(j - 1, nx)]) - v[j])
            + (7.0 / 27.0) * (0.5 * (v[_wrap(j + 2, nx)] + v[_wrap(j - 2, nx)]) - v[j])
            - (8.0 * h / 9.0) * (d[_wrap(j + 1, nx)] - d[_wrap(j - 1, nx)])
            - (h / 36.0) * (d[_wrap(j + 2, nx)] - d[_wrap(j - 2, nx)])
        ) / h2


def d2_array(values, derivs, double h):
    cdef double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef double[::1] d = np.ascontiguousarray(derivs, dtype=np.float64)
    cdef Py_ssize_t nx = v.shape[0]
    out_arr = np.empty(nx)
    cdef double[::1] out = out_arr
    with nogil:
        _d2_into(&v[0], &d[0], nx, h, &out[0])
    return out_arr


def d3_array(values, derivs, double h):
    cdef double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef double[::1] d = np.ascontiguousarray(derivs, dtype=np.float64)
    cdef Py_ssize_t nx = v.shape[0], j
    out_arr = np.empty(nx)
    cdef double[::1] out = out_arr
    cdef double h3 = h * h * h
    with nogil:
        for j in range(nx):
            out[j] = (
                (176.0 / 9.0) * (0.5 * (v[_wrap(j + 1, nx)] - v[_wrap(j - 1, nx)]) - h * d[j])
                + (31.0 / 72.0) * (0.5 * (v[_wrap(j + 2, nx)] - v[_wrap(j - 2, nx)]) - 2.0 * h * d[j])
                - (16.0 * h / 3.0) * (0.5 * (d[_wrap(j + 1, nx)] + d[_wrap(j - 1, nx)]) - d[j])
                - (h / 12.0) * (0.5 * (d[_wrap(j + 2, nx)] + d[_wrap(j - 2, nx)]) - d[j])
            ) / h3
    return out_arr


def d4_array(values, derivs, double h):
    cdef double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef double[::1] d = np.ascontiguousarray(derivs, dtype=np.float64)
    cdef Py_ssize_t nx = v.shape[0], j
    out_arr = np.empty(nx)
    cdef double[::1] out = out_arr
    cdef double h4 = h * h * h * h
    with nogil:
        for j in range(nx):
            out[j] = (
                -(128.0 / 3.0) * (0.5 * (v[_wrap(j + 1, nx)] + v[_wrap(j - 1, nx)]) - v[j])
                - (41.0 / 6.0) * (0.5 * (v[_wrap(j + 2, nx)] + v[_wrap(j - 2, nx)]) - v[j])
                + 16.0 * h * (d[_wrap(j + 1, nx)] - d[_wrap(j - 1, nx)])
                + (3.0 * h / 4.0) * (d[_wrap(j + 2, nx)] - d[_wrap(j - 2, nx)])
            ) / h4
    return out_arr


def d4_printed_array(values, derivs, double h):
    cdef double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef double[::1] d = np.ascontiguousarray(derivs, dtype=np.float64)
    cdef Py_ssize_t nx = v.shape[0], j
    out_arr = np.empty(nx)
    cdef double[::1] out = out_arr
    cdef double h4 = h * h * h * h
    with nogil:
        for j in range(nx):
            out[j] = (
                -(128.0 / 3.0) * (0.5 * (v[_wrap(j + 1, nx)] + v[_wrap(j - 1, nx)]) - h * v[j])
                - (41.0 / 3.0) * (0.5 * (v[_wrap(j + 2, nx)] + v[_wrap(j - 2, nx)]) - 2.0 * h * v[j])
                + 16.0 * h * (d[_wrap(j + 1, nx)] - d[_wrap(j - 1, nx)])
                + (3.0 * h / 4.0) * (d[_wrap(j + 2, nx)] - d[_wrap(j - 2, nx)])
            ) / h4
    return out_arr


def central4(a, double h):
    cdef double[::1] v = np.ascontiguousarray(a, dtype=np.float64)
    cdef Py_ssize_t nx = v.shape[0], j
    out_arr = np.empty(nx)
    cdef double[::1] out = out_arr
    with nogil:
        for j in range(nx):
            out[j] = (
                8.0 * (v[_wrap(j + 1, nx)] - v[_wrap(j - 1, nx)])
                - (v[_wrap(j + 2, nx)] - v[_wrap(j - 2, nx)])
            ) / (12.0 * h)
    return out_arr


def advect_density(values, derivs, double h, feet, jac, jacp):
    cdef double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef double[::1] d = np.ascontiguousarray(derivs, dtype=np.float64)
    cdef double[::1] ft = np.ascontiguousarray(feet, dtype=np.float64)
    cdef double[::1] jc = np.ascontiguousarray(jac, dtype=np.float64)
    cdef double[::1] jp = np.ascontiguousarray(jacp, dtype=np.float64)
    cdef Py_ssize_t nx = v.shape[0], j
    nv_arr = np.empty(nx)
    nd_arr = np.empty(nx)
    cdef double[::1] nv = nv_arr
    cdef double[::1] nd = nd_arr
    cdef double val, der
    with nogil:
        for j in range(nx):
            _eval_one(&v[0], &d[0], nx, h, ft[j], &val, &der)
            nv[j] = jc[j] * val
            nd[j] = jp[j] * val + jc[j] * jc[j] * der
    return nv_arr, nd_arr


def advect_velocity(values, derivs, double h, feet, jac):
    cdef double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef double[::1] d = np.ascontiguousarray(derivs, dtype=np.float64)
    cdef double[::1] ft = np.ascontiguousarray(feet, dtype=np.float64)
    cdef double[::1] jc = np.ascontiguousarray(jac, dtype=np.float64)
    cdef Py_ssize_t nx = v.shape[0], j
    nv_arr = np.empty(nx)
    nd_arr = np.empty(nx)
    cdef double[::1] nv = nv_arr
    cdef double[::1] nd = nd_arr
    cdef double val, der
    with nogil:
        for j in range(nx):
            _eval_one(&v[0], &d[0], nx, h, ft[j], &val, &der)
            nv[j] = val
            nd[j] = jc[j] * der
    return nv_arr, nd_arr


def source_terms(rho_v, rho_d, u_v, u_d, double h, double eps, double mu_bar, w2, w3):
    cdef double[::1] rv = np.ascontiguousarray(rho_v, dtype=np.float64)
    cdef double[::1] rd = np.ascontiguousarray(rho_d, dtype=np.float64)
    cdef double[::1] c2 = np.ascontiguousarray(w2, dtype=np.float64)
    cdef double[::1] c3 = np.ascontiguousarray(w3, dtype=np.float64)
    d2u_arr = d2_array(u_v, u_d, h)
    d3u_arr = d3_array(u_v, u_d, h)
    d2r_arr = d2_array(rho_v, rho_d, h)
    d3r_arr = d3_array(rho_v, rho_d, h)
    d4r_arr = d4_array(rho_v, rho_d, h)
    cdef double[::1] d2u = d2u_arr
    cdef double[::1] d3u = d3u_arr
    cdef double[::1] d2r = d2r_arr
    cdef double[::1] d3r = d3r_arr
    cdef double[::1] d4r = d4r_arr
    cdef Py_ssize_t nx = rv.shape[0], j
    du_arr = np.empty(nx)
    dux_arr = np.empty(nx)
    cdef double[::1] du = du_arr
    cdef double[::1] dux = dux_arr
    with nogil:
        for j in range(nx):
            du[j] = mu_bar * d2u[j] / rv[j] - c2[j] * rd[j] + eps * d3r[j]
            dux[j] = (
                mu_bar * (d3u[j] / rv[j] - rd[j] * d2u[j] / (rv[j] * rv[j]))
                - c2[j] * d2r[j]
                - c3[j] * rd[j] * rd[j]
                + eps * d4r[j]
            )
    return du_arr, dux_arr


def advect_stage(rho_v, rho_d, u_v, u_d, double h, double tau):
    """Fused semi-Lagrangian stage: trace + transport of both fields.

    Returns (rho_values, rho_derivs, u_values, u_derivs, max_stage_disp,
    status) with the proportional mass fixer applied; status 1 flags a
    nonpositive characteristic Jacobian.
    """
    cdef double[::1] rv = np.ascontiguousarray(rho_v, dtype=np.float64)
    cdef double[::1] rd = np.ascontiguousarray(rho_d, dtype=np.float64)
    cdef double[::1] uv = np.ascontiguousarray(u_v, dtype=np.float64)
    cdef double[::1] ud = np.ascontiguousarray(u_d, dtype=np.float64)
    cdef Py_ssize_t nx = rv.shape[0], i
    nrv_arr = np.empty(nx); nrd_arr = np.empty(nx)
    nuv_arr = np.empty(nx); nud_arr = np.empty(nx)
    wxx_arr = np.empty(nx)
    cdef double[::1] nrv = nrv_arr
    cdef double[::1] nrd = nrd_arr
    cdef double[::1] nuv = nuv_arr
    cdef double[::1] nud = nud_arr
    cdef double[::1] wxx = wxx_arr
    cdef double disp = 0.0, a, J, foot, jac, jacp
    cdef double w, wx, k1, k2, k3, k4, j1, j2, j3, j4, q1, q2, q3, q4, x, xp
    cdef double val, der, mass_in = 0.0, mass_out = 0.0, scale
    cdef int status = 0
    with nogil:
        _d2_into(&uv[0], &ud[0], nx, h, &wxx[0])
        for i in range(nx):
            x = i * h
            _eval_one(&uv[0], &ud[0], nx, h, x, &w, &wx)
            k1 = -w; j1 = -wx
            q1 = -_lin_one(&wxx[0], nx, x)
            xp = x + 0.5 * tau * k1
            _eval_one(&uv[0], &ud[0], nx, h, xp, &w, &wx)
            J = 1.0 + 0.5 * tau * j1
            k2 = -w; j2 = -wx * J
            q2 = -(_lin_one(&wxx[0], nx, xp) * J * J + wx * (0.5 * tau * q1))
            xp = x + 0.5 * tau * k2
            _eval_one(&uv[0], &ud[0], nx, h, xp, &w, &wx)
            J = 1.0 + 0.5 * tau * j2
            k3 = -w; j3 = -wx * J
            q3 = -(_lin_one(&wxx[0], nx, xp) * J * J + wx * (0.5 * tau * q2))
            xp = x + tau * k3
            _eval_one(&uv[0], &ud[0], nx, h, xp, &w, &wx)
            J = 1.0 + tau * j3
            k4 = -w; j4 = -wx * J
            q4 = -(_lin_one(&wxx[0], nx, xp) * J * J + wx * (tau * q3))
            foot = x + (tau / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            jac = 1.0 + (tau / 6.0) * (j1 + 2.0 * j2 + 2.0 * j3 + j4)
            jacp = (tau / 6.0) * (q1 + 2.0 * q2 + 2.0 * q3 + q4)
            a = fabs(k1)
            if fabs(k2) > a: a = fabs(k2)
            if fabs(k3) > a: a = fabs(k3)
            if fabs(k4) > a: a = fabs(k4)
            a = a * fabs(tau)
            if a > disp: disp = a
            if jac <= 0.0:
                status = 1
            _eval_one(&rv[0], &rd[0], nx, h, foot, &val, &der)
            nrv[i] = jac * val
            nrd[i] = jacp * val + jac * jac * der
            _eval_one(&uv[0], &ud[0], nx, h, foot, &val, &der)
            nuv[i] = val
            nud[i] = jac * der
            mass_in += rv[i]
            mass_out += nrv[i]
        if status == 0 and mass_out > 0.0 and mass_out != mass_in:
            scale = mass_in / mass_out
            for i in range(nx):
                nrv[i] *= scale
                nrd[i] *= scale
    return nrv_arr, nrd_arr, nuv_arr, nud_arr, disp, status
