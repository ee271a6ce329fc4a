"""Three-stage planar pose recovery: normal, then distance and position, then rotation.

Given n >= 4 coplanar target points and the unit bearings under which a
calibrated camera sees them, the solver recovers the plane normal in camera
axes (see :mod:`posekit.normal`), the camera-to-plane distance and camera
position, and finally the full orientation. Every stage is a small linear
solve; nothing is iterative except the optional smooth normal filter.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AllPointsExcludedError,
    GrazingBearingError,
    OrientationSideError,
    RankDeficientError,
    SingularMomentError,
)
from .geometry import E3, CameraIntrinsics, orthonormalize_with_fixed_third_column, pixels_to_bearings
from .normal import NormalEstimate, SmoothedNormal, average_normals, batch_normal_estimates, least_squares_normal
from .quads import DEFAULT_COLLINEARITY_TOL, DEFAULT_MAX_QUADS, select_quads

_GRAZE_EPS = 1e-9
_COND_LIMIT = 1e12

FUSION_MODES = ("algebraic", "eigen", "smooth")
DISTANCE_WEIGHTINGS = ("uniform", "norm")


@dataclass(frozen=True)
class CorrespondenceSet:
    """Paired target-plane points (meters) and unit bearings (camera axes)."""

    points: np.ndarray  # (n, 2)
    bearings: np.ndarray  # (n, 3), unit rows

    def __post_init__(self) -> None:
        pts = np.ascontiguousarray(self.points, dtype=float)
        brs = np.ascontiguousarray(self.bearings, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError(f"points must be (n, 2), got {pts.shape}")
        if brs.shape != (pts.shape[0], 3):
            raise ValueError(
                f"bearings must be ({pts.shape[0]}, 3) to match points, got {brs.shape}"
            )
        if pts.shape[0] < 4:
            raise ValueError(f"need at least 4 correspondences, got {pts.shape[0]}")
        norms = np.linalg.norm(brs, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-6):
            raise ValueError("bearings must be unit vectors (within 1e-6)")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "bearings", brs / norms[:, None])

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    @classmethod
    def from_pixels(cls, points, pixels, intrinsics: CameraIntrinsics) -> "CorrespondenceSet":
        return cls(points=np.asarray(points, dtype=float),
                   bearings=pixels_to_bearings(pixels, intrinsics))


@dataclass(frozen=True)
class SolverConfig:
    """Tuning knobs of the pipeline; the defaults match the benchmark setup."""

    normal_fusion: str = "algebraic"
    max_quads: int | None = DEFAULT_MAX_QUADS
    collinearity_tol: float = DEFAULT_COLLINEARITY_TOL
    origin_exclusion_tol: float = 1e-9
    distance_weighting: str = "uniform"
    quad_strategy: str = "spread-first"

    def __post_init__(self) -> None:
        if self.normal_fusion not in FUSION_MODES:
            raise ValueError(f"normal_fusion must be one of {FUSION_MODES}, got {self.normal_fusion!r}")
        if self.distance_weighting not in DISTANCE_WEIGHTINGS:
            raise ValueError(
                f"distance_weighting must be one of {DISTANCE_WEIGHTINGS}, got {self.distance_weighting!r}"
            )
        if self.collinearity_tol <= 0 or self.origin_exclusion_tol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class PoseSolution:
    """Recovered pose and per-point diagnostics.

    position is the camera's coordinate vector in its own basis; the camera
    position in target coordinates is rotation @ position. origin_dir is the
    camera-to-target-origin direction scaled by 1/distance.
    """

    normal: np.ndarray  # (3,) unit plane normal in camera axes
    distance: float  # camera-to-plane distance, meters
    position: np.ndarray  # (3,) camera position, meters
    rotation: np.ndarray  # (3, 3) target-to-camera rotation
    origin_dir: np.ndarray  # (3,)
    per_point_distance: np.ndarray  # (k,) one distance estimate per retained point
    excluded_indices: tuple[int, ...] = field(default_factory=tuple)

    @property
    def target_frame_position(self) -> np.ndarray:
        return self.rotation @ self.position


def centering_weights(points) -> np.ndarray:
    """Minimum-norm weights with unit sum and vanishing weighted point sum."""
    pts = np.asarray(points, dtype=float)
    lifted = np.vstack([pts.T, np.ones(pts.shape[0])])
    moment = lifted @ lifted.T
    cond = float(np.linalg.cond(moment))
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        raise SingularMomentError(
            f"moment matrix condition number {cond:.2e} exceeds {_COND_LIMIT:.0e} (points nearly collinear)"
        )
    return lifted.T @ np.linalg.solve(moment, E3)


def _plane_dots(bearings: np.ndarray, normal: np.ndarray) -> np.ndarray:
    dots = bearings @ normal
    worst = float(np.min(dots))
    if worst <= _GRAZE_EPS:
        raise GrazingBearingError(
            f"bearing nearly parallel to the plane (normal dot bearing = {worst:.2e})"
        )
    return dots


def origin_direction(bearings, weights, normal) -> np.ndarray:
    """Camera-to-target-origin direction scaled by the inverse plane distance."""
    brs = np.asarray(bearings, dtype=float)
    dots = _plane_dots(brs, np.asarray(normal, dtype=float))
    return ((np.asarray(weights, dtype=float) / dots)[:, None] * brs).sum(axis=0)


def point_offsets(bearings, normal, origin_dir) -> np.ndarray:
    """Per-point offsets from the target origin in camera axes, scaled by 1/distance."""
    brs = np.asarray(bearings, dtype=float)
    dots = _plane_dots(brs, np.asarray(normal, dtype=float))
    return brs / dots[:, None] - np.asarray(origin_dir, dtype=float)


def plane_distance(
    points,
    offsets,
    weighting: str = "uniform",
    origin_tol: float = 1e-9,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Camera-to-plane distance from point norms versus offset norms.

    Points at the target origin carry no distance information and are
    excluded. Returns (distance, per-point estimates, excluded indices).
    """
    pts = np.asarray(points, dtype=float)
    point_norms = np.linalg.norm(pts, axis=1)
    keep = point_norms > origin_tol
    if not keep.any():
        raise AllPointsExcludedError(
            f"all {pts.shape[0]} points are within {origin_tol:g} m of the target origin"
        )
    offset_norms = np.linalg.norm(np.asarray(offsets, dtype=float)[keep], axis=1)
    per_point = point_norms[keep] / offset_norms
    if weighting == "norm":
        distance = float(np.average(per_point, weights=point_norms[keep]))
    else:
        distance = float(np.mean(per_point))
    return distance, per_point, np.flatnonzero(~keep)


def camera_position(distance: float, origin_dir) -> np.ndarray:
    """Camera position in its own basis, from the scaled origin direction."""
    return -float(distance) * np.asarray(origin_dir, dtype=float)


def camera_rotation(points, offsets, normal, origin_tol: float = 1e-9) -> np.ndarray:
    """Target-to-camera rotation aligning point directions with offset directions.

    Solves a small least-squares problem mapping in-plane unit directions
    (plus the plane's own axis) onto the measured offset directions (plus the
    normal), then projects onto SO(3) keeping the normal axis exact.
    """
    pts = np.asarray(points, dtype=float)
    offs = np.asarray(offsets, dtype=float)
    eta = np.asarray(normal, dtype=float)
    point_norms = np.linalg.norm(pts, axis=1)
    keep = point_norms > origin_tol
    if keep.sum() < 2:
        raise RankDeficientError(
            f"only {int(keep.sum())} usable points; need at least two away from the target origin"
        )
    plane_dirs = pts[keep] / point_norms[keep, None]
    target_dirs = np.vstack([np.column_stack([plane_dirs, np.zeros(len(plane_dirs))]), E3]).T
    offset_norms = np.linalg.norm(offs[keep], axis=1)
    camera_dirs = np.vstack([offs[keep] / offset_norms[:, None], eta]).T

    smallest_sv = float(np.linalg.svd(target_dirs, compute_uv=False)[-1])
    if smallest_sv < 1e-9:
        raise RankDeficientError(
            f"target direction matrix is rank-deficient (smallest singular value {smallest_sv:.2e})"
        )
    gram = target_dirs @ target_dirs.T
    rot_t_raw = camera_dirs @ target_dirs.T @ np.linalg.inv(gram)
    if float(np.linalg.det(rot_t_raw)) < 0.0:
        raise OrientationSideError(
            "recovered directions are left-handed; bearings are only consistent with a "
            "camera on the far side of the plane"
        )
    rot_t = orthonormalize_with_fixed_third_column(rot_t_raw, eta)
    return rot_t.T


def _fuse_normal(
    estimates: list[NormalEstimate], mode: str, session: SmoothedNormal | None
) -> np.ndarray:
    if mode == "algebraic":
        return average_normals(estimates)
    if mode == "eigen":
        return least_squares_normal(estimates)
    if session is None:
        session = SmoothedNormal()
    return session.update(estimates)


def solve_pose(
    correspondences: CorrespondenceSet,
    config: SolverConfig | None = None,
    session: SmoothedNormal | None = None,
) -> PoseSolution:
    """Run the full pipeline on one frame of correspondences.

    With smooth fusion, `session` carries the filtered normal across frames;
    omitting it makes each call behave like the first frame of a session.
    """
    cfg = config if config is not None else SolverConfig()
    selection = select_quads(
        correspondences.points,
        max_quads=cfg.max_quads,
        strategy=cfg.quad_strategy,
        collinearity_tol=cfg.collinearity_tol,
    )
    estimates = batch_normal_estimates(correspondences.points, correspondences.bearings, selection)
    eta = _fuse_normal(estimates, cfg.normal_fusion, session)

    side = correspondences.bearings @ eta
    if float(np.min(side)) <= 0.0 or eta[2] <= 0.0:
        raise OrientationSideError(
            "fused normal puts some bearings on the wrong side of the plane "
            f"(min dot {float(np.min(side)):.3e}, axis component {eta[2]:.3e})"
        )

    mu = centering_weights(correspondences.points)
    r_dir = origin_direction(correspondences.bearings, mu, eta)
    offsets = point_offsets(correspondences.bearings, eta, r_dir)
    distance, per_point, excluded = plane_distance(
        correspondences.points,
        offsets,
        weighting=cfg.distance_weighting,
        origin_tol=cfg.origin_exclusion_tol,
    )
    rotation = camera_rotation(
        correspondences.points, offsets, eta, origin_tol=cfg.origin_exclusion_tol
    )
    return PoseSolution(
        normal=eta,
        distance=distance,
        position=camera_position(distance, r_dir),
        rotation=rotation,
        origin_dir=r_dir,
        per_point_distance=per_point,
        excluded_indices=tuple(int(i) for i in excluded),
    )
