# Compiled implementations of the hot numeric kernels.
# Semantics must match greenpolar._core._numpy_core exactly.

from libc.math cimport sqrt, exp, log, pow, INFINITY, fabs

import numpy as np


def riesz_sum(double[:, ::1] targets, double[:, ::1] points,
              double[::1] weights, double exponent):
    cdef Py_ssize_t m = targets.shape[0]
    cdef Py_ssize_t p = points.shape[0]
    cdef Py_ssize_t k = targets.shape[1]
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j, a
    cdef double acc, d2, diff, d
    with nogil:
        for i in range(m):
            acc = 0.0
            for j in range(p):
                d2 = 0.0
                for a in range(k):
                    diff = targets[i, a] - points[j, a]
                    d2 += diff * diff
                d = sqrt(d2)
                if d == 0.0:
                    if weights[j] > 0.0:
                        acc = INFINITY
                else:
                    acc += weights[j] * pow(d, exponent)
            out[i] = acc
    return out_arr


def spacetime_heat_sum(double[:, ::1] targets, double[:, ::1] points,
                       double[::1] weights, int n, double scale):
    cdef Py_ssize_t m = targets.shape[0]
    cdef Py_ssize_t p = points.shape[0]
    cdef Py_ssize_t k = targets.shape[1] - 1
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j, a
    cdef double acc, d2, diff, dt
    cdef double half_n = 0.5 * n
    with nogil:
        for i in range(m):
            acc = 0.0
            for j in range(p):
                dt = targets[i, k] - points[j, k]
                if dt <= 0.0:
                    continue
                d2 = 0.0
                for a in range(k):
                    diff = targets[i, a] - points[j, a]
                    d2 += diff * diff
                acc += weights[j] * scale * pow(dt, -half_n) * exp(-d2 / (4.0 * dt))
            out[i] = acc
    return out_arr


def spacetime_cauchy_sum(double[:, ::1] targets, double[:, ::1] points,
                         double[::1] weights, int n, double cn):
    cdef Py_ssize_t m = targets.shape[0]
    cdef Py_ssize_t p = points.shape[0]
    cdef Py_ssize_t k = targets.shape[1] - 1
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j, a
    cdef double acc, d2, diff, dt
    cdef double half_np1 = 0.5 * (n + 1)
    with nogil:
        for i in range(m):
            acc = 0.0
            for j in range(p):
                dt = targets[i, k] - points[j, k]
                if dt <= 0.0:
                    continue
                d2 = 0.0
                for a in range(k):
                    diff = targets[i, a] - points[j, a]
                    d2 += diff * diff
                acc += weights[j] * cn * dt * pow(dt * dt + d2, -half_np1)
            out[i] = acc
    return out_arr


def metric_ball_mask(double[:, ::1] points, double[::1] center, double radius):
    cdef Py_ssize_t m = points.shape[0]
    cdef Py_ssize_t k = points.shape[1]
    out_arr = np.empty(m, dtype=np.bool_)
    cdef unsigned char[::1] out = out_arr.view(np.uint8)
    cdef Py_ssize_t i, a
    cdef double d2, diff, r2 = radius * radius
    with nogil:
        for i in range(m):
            d2 = 0.0
            for a in range(k):
                diff = points[i, a] - center[a]
                d2 += diff * diff
            out[i] = 1 if d2 < r2 else 0
    return out_arr


def box_mask(double[:, ::1] points, double[::1] lo, double[::1] hi):
    cdef Py_ssize_t m = points.shape[0]
    cdef Py_ssize_t k = points.shape[1]
    out_arr = np.empty(m, dtype=np.bool_)
    cdef unsigned char[::1] out = out_arr.view(np.uint8)
    cdef Py_ssize_t i, a
    cdef unsigned char ok
    with nogil:
        for i in range(m):
            ok = 1
            for a in range(k):
                if points[i, a] < lo[a] or points[i, a] > hi[a]:
                    ok = 0
                    break
            out[i] = ok
    return out_arr


def heat_ball_mask(double[:, ::1] points, double[::1] center, int n, double u):
    cdef Py_ssize_t m = points.shape[0]
    cdef Py_ssize_t k = points.shape[1] - 1
    out_arr = np.empty(m, dtype=np.bool_)
    cdef unsigned char[::1] out = out_arr.view(np.uint8)
    cdef Py_ssize_t i, a
    cdef double s, d2, diff
    with nogil:
        for i in range(m):
            s = center[k] - points[i, k]
            if s <= 0.0 or s >= u:
                out[i] = 0
                continue
            d2 = 0.0
            for a in range(k):
                diff = points[i, a] - center[a]
                d2 += diff * diff
            out[i] = 1 if d2 < 2.0 * n * s * log(u / s) else 0
    return out_arr


def cylinder_mask(double[:, ::1] points, double[::1] center, double radius,
                  double beta):
    cdef Py_ssize_t m = points.shape[0]
    cdef Py_ssize_t k = points.shape[1] - 1
    out_arr = np.empty(m, dtype=np.bool_)
    cdef unsigned char[::1] out = out_arr.view(np.uint8)
    cdef Py_ssize_t i, a
    cdef double d2, diff, r2 = radius * radius
    cdef double tmax = pow(radius, beta)
    with nogil:
        for i in range(m):
            d2 = 0.0
            for a in range(k):
                diff = points[i, a] - center[a]
                d2 += diff * diff
            out[i] = 1 if d2 < r2 and fabs(points[i, k] - center[k]) < tmax else 0
    return out_arr
