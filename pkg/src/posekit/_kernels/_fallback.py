"""Vectorized numpy implementations of the hot kernels.

Mirrors the compiled extension in ``posekit._kernels._native``; selected at
import time when the extension is unavailable or POSEKIT_BACKEND=python.
All functions take C-contiguous float64/int64 arrays.
"""

from __future__ import annotations

import itertools

import numpy as np

STATUS_OK = 0
STATUS_COLLINEAR = 1
STATUS_SINGULAR_BEARINGS = 2
STATUS_ZERO_COEFFICIENT = 3

_DET_EPS = 1e-12
_COEFF_EPS = 1e-12
_CHUNK = 1 << 18


def _combo_chunks(n: int, chunk: int = _CHUNK):
    """Yield (m, 4) int64 blocks of the 4-subsets of range(n), lexicographic."""
    it = itertools.combinations(range(n), 4)
    while True:
        block = list(itertools.islice(it, chunk))
        if not block:
            return
        yield np.asarray(block, dtype=np.int64)


def _triple_flat(p, i, j, k, tol):
    # p: (m, 4, 2) quad point blocks; returns True where points i, j, k are collinear
    u = p[:, j] - p[:, i]
    v = p[:, k] - p[:, i]
    cross = np.abs(u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0])
    # sqrt(x^2 + y^2) rather than hypot: keeps the decision bitwise in step
    # with the compiled kernel
    scale = np.maximum(
        1.0,
        np.sqrt(u[:, 0] ** 2 + u[:, 1] ** 2) * np.sqrt(v[:, 0] ** 2 + v[:, 1] ** 2),
    )
    return cross <= tol * scale


def quad_validity(points, combos, tol):
    """Boolean mask: quads whose four triples are all non-collinear."""
    p = points[combos]
    bad = _triple_flat(p, 0, 1, 2, tol)
    bad |= _triple_flat(p, 0, 1, 3, tol)
    bad |= _triple_flat(p, 0, 2, 3, tol)
    bad |= _triple_flat(p, 1, 2, 3, tol)
    return ~bad


def quad_hull_areas(points, combos):
    """Convex-hull area of each 4-point subset.

    The hull area is the largest of the four triangle areas (hull is a
    triangle) and the three segment-pairing terms |d1 x d2|/2 (hull is a
    quadrilateral with diagonals d1, d2).
    """
    p = points[combos]
    a, b, c, d = p[:, 0], p[:, 1], p[:, 2], p[:, 3]

    def cr(u, v):
        return np.abs(u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0])

    t1 = cr(b - a, c - a)
    t2 = cr(b - a, d - a)
    t3 = cr(c - a, d - a)
    t4 = cr(c - b, d - b)
    q1 = cr(b - a, d - c)
    q2 = cr(c - a, d - b)
    q3 = cr(d - a, c - b)
    return 0.5 * np.maximum.reduce([t1, t2, t3, t4, q1, q2, q3])


def top_spread_quads(points, tol, max_quads):
    """The best `max_quads` valid quads by hull area, descending, lex tie-break.

    Returns (indices (k, 4) int64, areas (k,)).
    """
    best_idx = np.empty((0, 4), dtype=np.int64)
    best_area = np.empty(0)
    for combos in _combo_chunks(points.shape[0]):
        ok = quad_validity(points, combos, tol)
        if not ok.any():
            continue
        cand = combos[ok]
        idx = np.concatenate([best_idx, cand])
        area = np.concatenate([best_area, quad_hull_areas(points, cand)])
        order = np.lexsort((idx[:, 3], idx[:, 2], idx[:, 1], idx[:, 0], -area))[:max_quads]
        best_idx = idx[order]
        best_area = area[order]
    return best_idx, best_area


def enumerate_valid_quads(points, tol, max_quads):
    """All valid quads in lexicographic order, truncated at max_quads (<0 = all)."""
    cap = int(max_quads)
    out = []
    total = 0
    for combos in _combo_chunks(points.shape[0]):
        got = combos[quad_validity(points, combos, tol)]
        if cap >= 0 and total + got.shape[0] >= cap:
            out.append(got[: cap - total])
            total = cap
            break
        out.append(got)
        total += got.shape[0]
    if not out:
        return np.empty((0, 4), dtype=np.int64)
    return np.concatenate(out)


def _cross3(u, v):
    return np.stack(
        [
            u[:, 1] * v[:, 2] - u[:, 2] * v[:, 1],
            u[:, 2] * v[:, 0] - u[:, 0] * v[:, 2],
            u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0],
        ],
        axis=1,
    )


def _solve3(c1, c2, c3, rhs):
    """Batched solve of [c1 c2 c3] x = rhs by the adjugate; returns (x, det)."""
    r1 = _cross3(c2, c3)
    r2 = _cross3(c3, c1)
    r3 = _cross3(c1, c2)
    det = np.einsum("ij,ij->i", c1, r1)
    x = (
        np.stack(
            [
                np.einsum("ij,ij->i", r1, rhs),
                np.einsum("ij,ij->i", r2, rhs),
                np.einsum("ij,ij->i", r3, rhs),
            ],
            axis=1,
        )
        / det[:, None]
    )
    return x, det


def quad_normal_batch(points, bearings, quads):
    """Per-quad plane-normal solve over an (m, 4) index array.

    Returns (normals (m, 3), weights (m,), expansions (m, 3), ratios (m, 3),
    status (m,) uint8). Rows with nonzero status carry zeros.
    """
    m = quads.shape[0]
    status = np.zeros(m, dtype=np.uint8)
    if m == 0:
        z3 = np.zeros((0, 3))
        return z3, np.zeros(0), z3.copy(), z3.copy(), status

    x1 = points[quads[:, 0]]
    ones = np.ones((m, 1))
    p1 = bearings[quads[:, 0]]
    p2 = bearings[quads[:, 1]]
    p3 = bearings[quads[:, 2]]
    p4 = bearings[quads[:, 3]]

    e3 = np.zeros((m, 3))
    e3[:, 2] = 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        lam, det_x = _solve3(
            np.hstack([points[quads[:, 1]] - x1, ones]),
            np.hstack([points[quads[:, 2]] - x1, ones]),
            np.hstack([points[quads[:, 3]] - x1, ones]),
            e3,
        )
        expansions, det_b = _solve3(p2, p3, p4, p1)
        ratios = lam / expansions
        # columns of B^T gather one component of each non-anchor bearing
        y, _ = _solve3(
            np.stack([p2[:, 0], p3[:, 0], p4[:, 0]], axis=1),
            np.stack([p2[:, 1], p3[:, 1], p4[:, 1]], axis=1),
            np.stack([p2[:, 2], p3[:, 2], p4[:, 2]], axis=1),
            ratios,
        )
        norms = np.sqrt(np.einsum("ij,ij->i", y, y))
        normals = y / norms[:, None]
        flip = np.einsum("ij,ij->i", normals, p1) < 0.0
        normals[flip] = -normals[flip]
        weights = np.abs(np.min(expansions, axis=1) * det_b)

    status[np.abs(det_b) < _DET_EPS] = STATUS_SINGULAR_BEARINGS
    with np.errstate(invalid="ignore"):
        min_abs_a = np.min(np.abs(expansions), axis=1)
    status[(status == STATUS_OK) & (min_abs_a < _COEFF_EPS)] = STATUS_ZERO_COEFFICIENT
    status[np.abs(det_x) < _DET_EPS] = STATUS_COLLINEAR

    bad = status != STATUS_OK
    if bad.any():
        normals[bad] = 0.0
        weights[bad] = 0.0
        expansions[bad] = 0.0
        ratios[bad] = 0.0
    return normals, weights, expansions, ratios, status
