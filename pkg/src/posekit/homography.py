"""Two-view consistency: the homography between cameras seeing one plane.

For two calibrated views of the same planar target, bearings of a shared
point are related by a 3x3 map built from the relative pose and the plane
geometry of the first view. Checking that transfer on solver outputs is an
independent end-to-end test of the pose pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveDeterminantError
from .geometry import angle_between

_DET_EPS = 1e-12


@dataclass(frozen=True)
class RelativePose:
    """Pose of camera 1 relative to camera 2 (rotation and translation in camera-2 axes)."""

    rotation: np.ndarray  # (3, 3) camera-1 to camera-2 axes
    translation: np.ndarray  # (3,) meters


@dataclass(frozen=True)
class Homography:
    """Bearing-transfer map from view 1 to view 2."""

    matrix: np.ndarray  # (3, 3)

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (3, 3):
            raise ValueError(f"expected a 3x3 matrix, got shape {m.shape}")
        if abs(float(np.linalg.det(m))) < _DET_EPS:
            raise ValueError("homography matrix is singular")
        object.__setattr__(self, "matrix", m)


def relative_pose(pose1, pose2) -> RelativePose:
    """Relative rotation/translation taking camera-1 coordinates to camera-2.

    Accepts any pose objects with `rotation` (target-to-camera) and `position`
    (camera position in its own basis) fields.
    """
    r1 = np.asarray(pose1.rotation, dtype=float)
    r2 = np.asarray(pose2.rotation, dtype=float)
    rotation = r2.T @ r1
    translation = r2.T @ (
        r1 @ np.asarray(pose1.position, dtype=float) - r2 @ np.asarray(pose2.position, dtype=float)
    )
    return RelativePose(rotation=rotation, translation=translation)


def homography_from_poses(rel: RelativePose, normal1, distance1: float) -> Homography:
    """Bearing-transfer map: relative rotation plus the plane-induced rank-one term."""
    if distance1 <= 0:
        raise ValueError(f"plane distance must be positive, got {distance1}")
    eta1 = np.asarray(normal1, dtype=float)
    return Homography(rel.rotation + np.outer(rel.translation, eta1) / float(distance1))


def normalize_sl3(h: Homography) -> Homography:
    """Rescale so the determinant is exactly 1."""
    det = float(np.linalg.det(h.matrix))
    if det <= _DET_EPS:
        raise NonPositiveDeterminantError(
            f"determinant {det:.3e} is not positive; flip the sign of the matrix first "
            "(det(-h) = -det(h) for 3x3)"
        )
    return Homography(h.matrix * det ** (-1.0 / 3.0))


def bearing_transfer_residual(h: Homography, bearings1, bearings2) -> tuple[float, np.ndarray]:
    """How well h maps view-1 bearings onto view-2 bearings.

    Returns (max angular residual in radians, per-point scale factors). The
    scale factor of a point is |h @ p1| signed by its alignment with p2.
    """
    b1 = np.atleast_2d(np.asarray(bearings1, dtype=float))
    b2 = np.atleast_2d(np.asarray(bearings2, dtype=float))
    if b1.shape != b2.shape or b1.shape[1] != 3:
        raise ValueError(f"bearing arrays must match with shape (n, 3), got {b1.shape} and {b2.shape}")
    mapped = b1 @ h.matrix.T
    norms = np.linalg.norm(mapped, axis=1)
    gammas = np.sign(np.einsum("ij,ij->i", mapped, b2)) * norms
    residuals = [angle_between(mapped[i], b2[i]) for i in range(mapped.shape[0])]
    return float(max(residuals)), gammas
