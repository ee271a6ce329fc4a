"""Four-point subset selection: collinearity filtering and spread scoring."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._kernels import _fallback
from .errors import NoValidQuadError

DEFAULT_MAX_QUADS = 20
DEFAULT_COLLINEARITY_TOL = 1e-9

# beyond this many kept quads, a running top-k insertion stops paying off
_TOPK_LIMIT = 1024


def collinear(a, b, c, tol: float = DEFAULT_COLLINEARITY_TOL) -> bool:
    """True when the triangle a-b-c is flat within tol, relative to its side lengths."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    u = b - a
    v = c - a
    cross = abs(u[0] * v[1] - u[1] * v[0])
    scale = max(1.0, float(np.sqrt(u[0] ** 2 + u[1] ** 2) * np.sqrt(v[0] ** 2 + v[1] ** 2)))
    return cross <= tol * scale


def quad_hull_area(points) -> float:
    """Area of the convex hull of four planar points."""
    pts = np.ascontiguousarray(points, dtype=float)
    if pts.shape != (4, 2):
        raise ValueError(f"expected four planar points, got shape {pts.shape}")
    combo = np.arange(4, dtype=np.int64)[None, :]
    return float(_fallback.quad_hull_areas(pts, combo)[0])


@dataclass(frozen=True)
class QuadSelection:
    """Chosen four-point subsets; most spread first under the spread-first strategy."""

    indices: np.ndarray  # (m, 4) int64, each row sorted ascending
    areas: np.ndarray  # (m,) convex-hull areas, diagnostic

    @property
    def m(self) -> int:
        return int(self.indices.shape[0])


def select_quads(
    points,
    max_quads: int | None = DEFAULT_MAX_QUADS,
    strategy: str = "spread-first",
    collinearity_tol: float = DEFAULT_COLLINEARITY_TOL,
) -> QuadSelection:
    """Pick four-point subsets with no collinear triple.

    strategy "spread-first" ranks valid quads by convex-hull area (descending,
    lexicographic tie-break) and keeps the best max_quads; "all" keeps them in
    lexicographic order. max_quads=None keeps every valid quad.
    """
    pts = np.ascontiguousarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"expected an (n, 2) point array, got shape {pts.shape}")
    n = pts.shape[0]
    if n < 4:
        raise ValueError(f"need at least 4 points, got {n}")
    if strategy not in ("spread-first", "all"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if max_quads is not None and max_quads < 1:
        raise ValueError(f"max_quads must be at least 1, got {max_quads}")
    cap = -1 if max_quads is None else int(max_quads)

    if strategy == "spread-first":
        if 0 < cap <= _TOPK_LIMIT:
            indices, areas = _kernels.top_spread_quads(pts, collinearity_tol, cap)
        else:
            indices = _kernels.enumerate_valid_quads(pts, collinearity_tol, -1)
            areas = _fallback.quad_hull_areas(pts, indices)
            order = np.lexsort(
                (indices[:, 3], indices[:, 2], indices[:, 1], indices[:, 0], -areas)
            )
            if cap > 0:
                order = order[:cap]
            indices = indices[order]
            areas = areas[order]
    else:
        indices = _kernels.enumerate_valid_quads(pts, collinearity_tol, cap)
        areas = _fallback.quad_hull_areas(pts, indices)

    if indices.shape[0] == 0:
        raise NoValidQuadError(
            f"no valid quad among {n} points (collinearity tol {collinearity_tol:g})"
        )
    return QuadSelection(indices=indices, areas=areas)
