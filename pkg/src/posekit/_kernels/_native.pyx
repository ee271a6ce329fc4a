# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: quad enumeration/scoring and batched normal solves.

Must stay numerically in lockstep with ``_fallback``; both implement the same
formulas with the same operation order.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()

STATUS_OK = 0
STATUS_COLLINEAR = 1
STATUS_SINGULAR_BEARINGS = 2
STATUS_ZERO_COEFFICIENT = 3

cdef double _DET_EPS = 1e-12
cdef double _COEFF_EPS = 1e-12


cdef inline bint _triple_flat(double ax, double ay, double bx, double by,
                              double cx, double cy, double tol) nogil:
    cdef double ux = bx - ax
    cdef double uy = by - ay
    cdef double vx = cx - ax
    cdef double vy = cy - ay
    cdef double cross = fabs(ux * vy - uy * vx)
    cdef double scale = sqrt(ux * ux + uy * uy) * sqrt(vx * vx + vy * vy)
    if scale < 1.0:
        scale = 1.0
    return cross <= tol * scale


cdef inline bint _quad_valid(const double[:, ::1] p, Py_ssize_t i, Py_ssize_t j,
                             Py_ssize_t k, Py_ssize_t l, double tol) nogil:
    if _triple_flat(p[i, 0], p[i, 1], p[j, 0], p[j, 1], p[k, 0], p[k, 1], tol):
        return 0
    if _triple_flat(p[i, 0], p[i, 1], p[j, 0], p[j, 1], p[l, 0], p[l, 1], tol):
        return 0
    if _triple_flat(p[i, 0], p[i, 1], p[k, 0], p[k, 1], p[l, 0], p[l, 1], tol):
        return 0
    if _triple_flat(p[j, 0], p[j, 1], p[k, 0], p[k, 1], p[l, 0], p[l, 1], tol):
        return 0
    return 1


cdef inline double _cr(double ux, double uy, double vx, double vy) nogil:
    return fabs(ux * vy - uy * vx)


cdef inline double _hull4(double ax, double ay, double bx, double by,
                          double cx, double cy, double dx, double dy) nogil:
    # max of the four triangle terms and the three diagonal-pairing terms
    cdef double m = _cr(bx - ax, by - ay, cx - ax, cy - ay)
    cdef double t = _cr(bx - ax, by - ay, dx - ax, dy - ay)
    if t > m:
        m = t
    t = _cr(cx - ax, cy - ay, dx - ax, dy - ay)
    if t > m:
        m = t
    t = _cr(cx - bx, cy - by, dx - bx, dy - by)
    if t > m:
        m = t
    t = _cr(bx - ax, by - ay, dx - cx, dy - cy)
    if t > m:
        m = t
    t = _cr(cx - ax, cy - ay, dx - bx, dy - by)
    if t > m:
        m = t
    t = _cr(dx - ax, dy - ay, cx - bx, cy - by)
    if t > m:
        m = t
    return 0.5 * m


def top_spread_quads(const double[:, ::1] points, double tol, Py_ssize_t max_quads):
    """Best `max_quads` valid quads by hull area, descending, lex tie-break."""
    cdef Py_ssize_t n = points.shape[0]
    cdef cnp.ndarray idx_arr = np.zeros((max_quads, 4), dtype=np.int64)
    cdef cnp.ndarray area_arr = np.zeros(max_quads, dtype=np.float64)
    cdef cnp.int64_t[:, ::1] best = idx_arr
    cdef double[::1] areas = area_arr
    cdef Py_ssize_t count = 0
    cdef Py_ssize_t i, j, k, l, pos, s
    cdef double area

    with nogil:
        for i in range(n - 3):
            for j in range(i + 1, n - 2):
                for k in range(j + 1, n - 1):
                    for l in range(k + 1, n):
                        if not _quad_valid(points, i, j, k, l, tol):
                            continue
                        area = _hull4(points[i, 0], points[i, 1], points[j, 0], points[j, 1],
                                      points[k, 0], points[k, 1], points[l, 0], points[l, 1])
                        if count == max_quads and area <= areas[max_quads - 1]:
                            continue
                        pos = count if count < max_quads else max_quads - 1
                        while pos > 0 and areas[pos - 1] < area:
                            pos -= 1
                        s = count if count < max_quads else max_quads - 1
                        while s > pos:
                            areas[s] = areas[s - 1]
                            best[s, 0] = best[s - 1, 0]
                            best[s, 1] = best[s - 1, 1]
                            best[s, 2] = best[s - 1, 2]
                            best[s, 3] = best[s - 1, 3]
                            s -= 1
                        areas[pos] = area
                        best[pos, 0] = i
                        best[pos, 1] = j
                        best[pos, 2] = k
                        best[pos, 3] = l
                        if count < max_quads:
                            count += 1
    return idx_arr[:count], area_arr[:count]


def enumerate_valid_quads(const double[:, ::1] points, double tol, long long max_quads):
    """All valid quads in lexicographic order, truncated at max_quads (<0 = all)."""
    cdef Py_ssize_t n = points.shape[0]
    cdef long long cap = max_quads
    cdef long long total = 0
    cdef Py_ssize_t i, j, k, l
    if cap == 0:
        return np.zeros((0, 4), dtype=np.int64)
    with nogil:
        for i in range(n - 3):
            for j in range(i + 1, n - 2):
                for k in range(j + 1, n - 1):
                    for l in range(k + 1, n):
                        if _quad_valid(points, i, j, k, l, tol):
                            total += 1
                            if cap >= 0 and total == cap:
                                break
                    else:
                        continue
                    break
                else:
                    continue
                break
            else:
                continue
            break

    cdef cnp.ndarray out_arr = np.zeros((total, 4), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] out = out_arr
    cdef long long written = 0
    if total > 0:
        with nogil:
            for i in range(n - 3):
                for j in range(i + 1, n - 2):
                    for k in range(j + 1, n - 1):
                        for l in range(k + 1, n):
                            if _quad_valid(points, i, j, k, l, tol):
                                out[written, 0] = i
                                out[written, 1] = j
                                out[written, 2] = k
                                out[written, 3] = l
                                written += 1
                                if written == total:
                                    break
                        else:
                            continue
                        break
                    else:
                        continue
                    break
                else:
                    continue
                break
    return out_arr


cdef inline double _solve3(const double* c1, const double* c2, const double* c3,
                           const double* rhs, double* out) nogil:
    # solve [c1 c2 c3] x = rhs via the adjugate; returns the determinant
    cdef double r10 = c2[1] * c3[2] - c2[2] * c3[1]
    cdef double r11 = c2[2] * c3[0] - c2[0] * c3[2]
    cdef double r12 = c2[0] * c3[1] - c2[1] * c3[0]
    cdef double r20 = c3[1] * c1[2] - c3[2] * c1[1]
    cdef double r21 = c3[2] * c1[0] - c3[0] * c1[2]
    cdef double r22 = c3[0] * c1[1] - c3[1] * c1[0]
    cdef double r30 = c1[1] * c2[2] - c1[2] * c2[1]
    cdef double r31 = c1[2] * c2[0] - c1[0] * c2[2]
    cdef double r32 = c1[0] * c2[1] - c1[1] * c2[0]
    cdef double det = c1[0] * r10 + c1[1] * r11 + c1[2] * r12
    out[0] = (r10 * rhs[0] + r11 * rhs[1] + r12 * rhs[2]) / det
    out[1] = (r20 * rhs[0] + r21 * rhs[1] + r22 * rhs[2]) / det
    out[2] = (r30 * rhs[0] + r31 * rhs[1] + r32 * rhs[2]) / det
    return det


def quad_normal_batch(const double[:, ::1] points, const double[:, ::1] bearings,
                      const cnp.int64_t[:, ::1] quads):
    """Per-quad plane-normal solve; see the fallback docstring for the contract."""
    cdef Py_ssize_t m = quads.shape[0]
    cdef cnp.ndarray normals_arr = np.zeros((m, 3), dtype=np.float64)
    cdef cnp.ndarray weights_arr = np.zeros(m, dtype=np.float64)
    cdef cnp.ndarray expans_arr = np.zeros((m, 3), dtype=np.float64)
    cdef cnp.ndarray ratios_arr = np.zeros((m, 3), dtype=np.float64)
    cdef cnp.ndarray status_arr = np.zeros(m, dtype=np.uint8)
    cdef double[:, ::1] normals = normals_arr
    cdef double[::1] weights = weights_arr
    cdef double[:, ::1] expansions = expans_arr
    cdef double[:, ::1] ratios = ratios_arr
    cdef cnp.uint8_t[::1] status = status_arr

    cdef Py_ssize_t j, c, r, i1, i2, i3, i4
    cdef double xc[3][3]
    cdef double bc[3][3]
    cdef double bt[3][3]
    cdef double e3[3]
    cdef double lam[3]
    cdef double a[3]
    cdef double b[3]
    cdef double y[3]
    cdef double p1[3]
    cdef double det_x, det_b, nrm, dot, amin, aabs

    e3[0] = 0.0
    e3[1] = 0.0
    e3[2] = 1.0

    with nogil:
        for j in range(m):
            i1 = quads[j, 0]
            i2 = quads[j, 1]
            i3 = quads[j, 2]
            i4 = quads[j, 3]
            xc[0][0] = points[i2, 0] - points[i1, 0]
            xc[0][1] = points[i2, 1] - points[i1, 1]
            xc[0][2] = 1.0
            xc[1][0] = points[i3, 0] - points[i1, 0]
            xc[1][1] = points[i3, 1] - points[i1, 1]
            xc[1][2] = 1.0
            xc[2][0] = points[i4, 0] - points[i1, 0]
            xc[2][1] = points[i4, 1] - points[i1, 1]
            xc[2][2] = 1.0
            det_x = _solve3(xc[0], xc[1], xc[2], e3, lam)
            if fabs(det_x) < _DET_EPS:
                status[j] = 1
                continue
            for r in range(3):
                p1[r] = bearings[i1, r]
                bc[0][r] = bearings[i2, r]
                bc[1][r] = bearings[i3, r]
                bc[2][r] = bearings[i4, r]
            det_b = _solve3(bc[0], bc[1], bc[2], p1, a)
            if fabs(det_b) < _DET_EPS:
                status[j] = 2
                continue
            amin = a[0]
            for c in range(3):
                aabs = fabs(a[c])
                if a[c] < amin:
                    amin = a[c]
                if aabs < _COEFF_EPS:
                    status[j] = 3
                    break
            if status[j] == 3:
                continue
            for c in range(3):
                b[c] = lam[c] / a[c]
            # columns of B^T gather one component of each non-anchor bearing
            for c in range(3):
                bt[c][0] = bc[0][c]
                bt[c][1] = bc[1][c]
                bt[c][2] = bc[2][c]
            _solve3(bt[0], bt[1], bt[2], b, y)
            nrm = sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2])
            dot = (y[0] * p1[0] + y[1] * p1[1] + y[2] * p1[2]) / nrm
            if dot < 0.0:
                nrm = -nrm
            for r in range(3):
                normals[j, r] = y[r] / nrm
                expansions[j, r] = a[r]
                ratios[j, r] = b[r]
            weights[j] = fabs(amin * det_b)
    return normals_arr, weights_arr, expans_arr, ratios_arr, status_arr
