"""Plane-normal recovery from point quads, and fusion of multiple estimates.

The unit normal of the target plane, expressed in camera axes, is observable
from any four coplanar points with no three collinear: writing the anchor
bearing in the basis of the other three and comparing with the barycentric
weights of the anchor point yields a linear system whose solution direction
is the normal. Each quad contributes one estimate with a confidence weight;
estimates are fused by weighted averaging, a joint eigenvector solve, or a
smooth on-sphere filter carried across frames.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    AmbiguousEigenvectorError,
    CollinearQuadError,
    DegenerateSumError,
    SingularBearingsError,
    ZeroCoefficientError,
)
from .geometry import E3, normalize, rotation_from_rotvec
from .quads import QuadSelection

_DET_EPS = 1e-12
_COEFF_EPS = 1e-12

_STATUS_ERRORS = {
    _kernels.STATUS_COLLINEAR: (CollinearQuadError, "point matrix is singular"),
    _kernels.STATUS_SINGULAR_BEARINGS: (SingularBearingsError, "bearing basis is singular"),
    _kernels.STATUS_ZERO_COEFFICIENT: (ZeroCoefficientError, "an expansion coefficient vanished"),
}


@dataclass(frozen=True)
class QuadIntermediates:
    """Inner quantities of one quad's normal solve, kept for fusion and diagnostics."""

    barycentric: np.ndarray  # (3,) affine weights of the anchor point in the other three
    expansion: np.ndarray  # (3,) coordinates of the anchor bearing in the bearing basis
    ratios: np.ndarray  # (3,) barycentric / expansion
    bearing_basis: np.ndarray  # (3, 3) columns are the three non-anchor bearings
    point_basis: np.ndarray  # (3, 3) columns are point differences lifted with a 1
    anchor_bearing: np.ndarray  # (3,)


@dataclass(frozen=True)
class NormalEstimate:
    """One quad's normal estimate and its confidence weight."""

    normal: np.ndarray
    weight: float
    quad: tuple[int, int, int, int]
    intermediates: QuadIntermediates | None = None


def _point_basis(pts: np.ndarray) -> np.ndarray:
    basis = np.empty((3, 3))
    basis[:2] = (pts[1:] - pts[0]).T
    basis[2] = 1.0
    return basis


def barycentric_weights(points) -> np.ndarray:
    """Affine weights expressing the first of four planar points in the other three.

    The returned w satisfies sum(w) = 1 and sum_k w_k (x_k - x_1) = 0, i.e.
    x_1 = sum_k w_k x_k over the last three points.
    """
    pts = np.asarray(points, dtype=float)
    if pts.shape != (4, 2):
        raise ValueError(f"expected four planar points, got shape {pts.shape}")
    basis = _point_basis(pts)
    det = float(np.linalg.det(basis))
    if abs(det) < _DET_EPS:
        raise CollinearQuadError(
            f"point matrix is singular (|det| = {abs(det):.2e}); three of the points are collinear"
        )
    return np.linalg.solve(basis, E3)


def confidence_weight(inter: QuadIntermediates) -> float:
    """Confidence of a quad estimate: |smallest expansion coefficient| x |bearing volume|."""
    return float(abs(np.min(inter.expansion) * np.linalg.det(inter.bearing_basis)))


def normal_from_quad(points, bearings, quad: tuple[int, int, int, int] = (0, 1, 2, 3)) -> NormalEstimate:
    """Solve one quad for the plane normal.

    The sign is fixed so the normal has positive dot product with the anchor
    bearing (the camera sees the visible side of the plane).
    """
    pts = np.asarray(points, dtype=float)
    brs = np.asarray(bearings, dtype=float)
    if pts.shape != (4, 2) or brs.shape != (4, 3):
        raise ValueError(
            f"expected 4 points and 4 bearings, got shapes {pts.shape} and {brs.shape}"
        )
    weights = barycentric_weights(pts)
    bearing_basis = brs[1:].T.copy()
    det_b = float(np.linalg.det(bearing_basis))
    if abs(det_b) < _DET_EPS:
        raise SingularBearingsError(
            f"bearing basis is singular (|det| = {abs(det_b):.2e})"
        )
    expansion = np.linalg.solve(bearing_basis, brs[0])
    if float(np.min(np.abs(expansion))) < _COEFF_EPS:
        raise ZeroCoefficientError(
            f"expansion coefficient {np.min(np.abs(expansion)):.2e} is numerically zero"
        )
    ratios = weights / expansion
    eta = normalize(np.linalg.solve(bearing_basis.T, ratios))
    if float(eta @ brs[0]) < 0.0:
        eta = -eta
    inter = QuadIntermediates(
        barycentric=weights,
        expansion=expansion,
        ratios=ratios,
        bearing_basis=bearing_basis,
        point_basis=_point_basis(pts),
        anchor_bearing=brs[0].copy(),
    )
    return NormalEstimate(
        normal=eta, weight=confidence_weight(inter), quad=tuple(int(i) for i in quad),
        intermediates=inter,
    )


def batch_normal_estimates(points, bearings, selection: QuadSelection) -> list[NormalEstimate]:
    """Normal estimates for every selected quad, via the active kernel backend.

    Quads whose linear systems degenerate are dropped; if nothing survives the
    first failure's error is raised.
    """
    pts = np.ascontiguousarray(points, dtype=float)
    brs = np.ascontiguousarray(bearings, dtype=float)
    normals, weights, expansions, ratios, status = _kernels.quad_normal_batch(
        pts, brs, selection.indices
    )
    estimates: list[NormalEstimate] = []
    for j in range(status.shape[0]):
        if status[j] != _kernels.STATUS_OK:
            continue
        quad = selection.indices[j]
        inter = QuadIntermediates(
            barycentric=expansions[j] * ratios[j],
            expansion=expansions[j],
            ratios=ratios[j],
            bearing_basis=brs[quad[1:]].T.copy(),
            point_basis=_point_basis(pts[quad]),
            anchor_bearing=brs[quad[0]].copy(),
        )
        estimates.append(
            NormalEstimate(
                normal=normals[j],
                weight=float(weights[j]),
                quad=tuple(int(i) for i in quad),
                intermediates=inter,
            )
        )
    if not estimates:
        first_bad = int(status[status != _kernels.STATUS_OK][0])
        err, msg = _STATUS_ERRORS[first_bad]
        raise err(f"all {status.shape[0]} quads failed; first failure: {msg}")
    return estimates


def average_normals(estimates: list[NormalEstimate]) -> np.ndarray:
    """Weighted sum of the estimates, renormalized to the unit sphere."""
    if not estimates:
        raise ValueError("no estimates to average")
    total = np.zeros(3)
    for est in estimates:
        total += est.weight * est.normal
    norm = float(np.linalg.norm(total))
    if norm < 1e-12:
        raise DegenerateSumError(f"weighted sum of normals has norm {norm:.2e}")
    return total / norm


def least_squares_normal(estimates: list[NormalEstimate], gap_tol: float = 1e-12) -> np.ndarray:
    """Joint solve across quads: the unit minimizer of the stacked residual.

    Each quad constrains the normal through a weighted 3x3 block; the fused
    normal is the eigenvector of the assembled normal matrix for its smallest
    eigenvalue, with the sign fixed toward the quads' bearings.
    """
    if not estimates:
        raise ValueError("no estimates to fuse")
    blocks = []
    for est in estimates:
        inter = est.intermediates
        if inter is None:
            raise ValueError("least-squares fusion needs estimates with intermediates")
        blocks.append(
            est.weight
            * (inter.bearing_basis.T - np.outer(inter.ratios, inter.anchor_bearing))
        )
    stacked = np.vstack(blocks)
    evals, evecs = np.linalg.eigh(stacked.T @ stacked)
    scale = max(float(evals[-1]), 1e-300)
    if (evals[1] - evals[0]) <= gap_tol * scale:
        raise AmbiguousEigenvectorError(
            f"two smallest eigenvalues {evals[0]:.3e} and {evals[1]:.3e} are indistinguishable"
        )
    eta = evecs[:, 0]
    alignment = 0.0
    for est in estimates:
        inter = est.intermediates
        alignment += float(inter.anchor_bearing @ eta) + float(np.sum(inter.bearing_basis.T @ eta))
    if alignment < 0.0:
        eta = -eta
    return eta


@dataclass
class SmoothedNormal:
    """On-sphere filtered normal carried across the frames of a tracking session.

    The first batch initializes the state with the weighted average; later
    batches rotate the state toward the new estimates along the sphere, with
    weights rescaled so one step never overshoots.
    """

    normal: np.ndarray | None = None

    @property
    def initialized(self) -> bool:
        return self.normal is not None

    def reset(self) -> None:
        self.normal = None

    def update(self, estimates: list[NormalEstimate]) -> np.ndarray:
        """One filter step toward a batch of estimates; returns the new normal."""
        if not estimates:
            raise ValueError("no estimates to update with")
        if self.normal is None:
            self.normal = average_normals(estimates)
            return self.normal.copy()
        total_weight = sum(est.weight for est in estimates)
        scale = 1.0 / max(1.0, total_weight)
        step = np.zeros(3)
        for est in estimates:
            step += (scale * est.weight) * np.cross(self.normal, est.normal)
        self.normal = normalize(rotation_from_rotvec(step) @ self.normal)
        return self.normal.copy()

    def update_sequential(self, estimate: NormalEstimate) -> np.ndarray:
        """Single-estimate step: a batch applied one estimate at a time."""
        return self.update([estimate])
