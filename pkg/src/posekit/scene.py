"""Synthetic scenes: planar targets, valid random poses, exact projection, pixel noise.

Everything downstream treats this module as ground truth: projections are the
exact forward model of the solver's measurement equation, poses are rejection
sampled until every target point is visible from the correct side, and all
randomness flows through explicit seeds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BehindCameraError, SamplingExhaustedError
from .geometry import E3, CameraIntrinsics, bearings_to_pixels, rotation_from_rotvec
from .quads import DEFAULT_COLLINEARITY_TOL
from ._kernels import _fallback, enumerate_valid_quads

IMAGE_WIDTH = 640
IMAGE_HEIGHT = 512
DEFAULT_FOCAL_PX = 800.0

_MAX_POSE_TRIES = 1000


def default_intrinsics() -> CameraIntrinsics:
    """640x512 image, 800 px focal length, principal point at the center."""
    return CameraIntrinsics(
        fx=DEFAULT_FOCAL_PX, fy=DEFAULT_FOCAL_PX, cx=IMAGE_WIDTH / 2.0, cy=IMAGE_HEIGHT / 2.0
    )


@dataclass(frozen=True)
class TargetModel:
    """A planar constellation of reference points, target-frame coordinates in meters."""

    points: np.ndarray  # (n, 2)
    extent: tuple[float, float]  # (width, height) bounding size

    def __post_init__(self) -> None:
        pts = np.ascontiguousarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 4:
            raise ValueError(f"target needs an (n >= 4, 2) point array, got shape {pts.shape}")
        if enumerate_valid_quads(pts, DEFAULT_COLLINEARITY_TOL, 1).shape[0] == 0:
            raise ValueError("target has no four points with all triples non-collinear")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "extent", (float(self.extent[0]), float(self.extent[1])))

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    @property
    def size(self) -> float:
        """The larger side of the bounding box; the scale used for d/extent ratios."""
        return max(self.extent)


@dataclass(frozen=True)
class GroundTruthPose:
    """A true camera pose; same conventions as PoseSolution."""

    rotation: np.ndarray  # (3, 3) target-to-camera
    position: np.ndarray  # (3,) camera position in its own basis, meters

    def __post_init__(self) -> None:
        object.__setattr__(self, "rotation", np.asarray(self.rotation, dtype=float))
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        if self.distance <= 0:
            raise ValueError(
                f"camera sits on or behind the target plane (distance {self.distance:.3g} m)"
            )

    @property
    def normal(self) -> np.ndarray:
        return self.rotation.T @ E3

    @property
    def distance(self) -> float:
        return -float(self.normal @ self.position)

    @property
    def target_frame_position(self) -> np.ndarray:
        return self.rotation @ self.position


@dataclass(frozen=True)
class NoiseModel:
    """Gaussian pixel noise with an explicit seed (sigma 0 disables it)."""

    sigma_px: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.sigma_px < 0:
            raise ValueError(f"noise sigma must be >= 0, got {self.sigma_px}")


@dataclass(frozen=True)
class PoseConstraints:
    """Sampling box for random poses."""

    d_range: tuple[float, float] = (1.0, 4.0)  # meters
    max_tilt: float = 0.7  # radians, angle between optical axis and plane normal
    lateral_range: float = 0.5  # meters, offset of the camera from the plane axis
    yaw_range: tuple[float, float] = (-np.pi, np.pi)

    def __post_init__(self) -> None:
        if not (0 <= self.max_tilt < np.pi / 2):
            raise ValueError(f"max_tilt must be in [0, pi/2), got {self.max_tilt}")
        if self.d_range[0] <= 0 or self.d_range[1] < self.d_range[0]:
            raise ValueError(f"bad distance range {self.d_range}")
        if self.lateral_range < 0:
            raise ValueError(f"lateral_range must be >= 0, got {self.lateral_range}")


def make_grid_target(rows: int, cols: int, pitch: float) -> TargetModel:
    """A rows x cols lattice of points centered on the target origin."""
    if rows * cols < 4:
        raise ValueError(f"grid needs at least 4 points, got {rows}x{cols}")
    if pitch <= 0:
        raise ValueError(f"pitch must be positive, got {pitch}")
    ys, xs = np.mgrid[0:rows, 0:cols].astype(float)
    pts = np.column_stack(
        [(xs.ravel() - (cols - 1) / 2.0) * pitch, (ys.ravel() - (rows - 1) / 2.0) * pitch]
    )
    return TargetModel(points=pts, extent=((cols - 1) * pitch, (rows - 1) * pitch))


def make_random_target(n: int, extent: float, rng: np.random.Generator) -> TargetModel:
    """n points drawn uniformly on an extent x extent square around the origin.

    Redraws until some quad is reasonably spread, so targets never start out
    degenerate.
    """
    if n < 4:
        raise ValueError(f"target needs at least 4 points, got {n}")
    half = float(extent) / 2.0
    for _ in range(_MAX_POSE_TRIES):
        pts = rng.uniform(-half, half, size=(n, 2))
        quads = enumerate_valid_quads(np.ascontiguousarray(pts), DEFAULT_COLLINEARITY_TOL, 64)
        if quads.shape[0] == 0:
            continue
        if float(_fallback.quad_hull_areas(pts, quads).max()) >= 0.05 * extent * extent:
            return TargetModel(points=pts, extent=(extent, extent))
    raise SamplingExhaustedError(f"could not draw a well-spread {n}-point target")


def project_target(pose: GroundTruthPose, target: TargetModel, k: CameraIntrinsics) -> tuple[np.ndarray, np.ndarray]:
    """Exact pixels and unit bearings of every target point; raises if any is behind."""
    lifted = np.column_stack([target.points, np.zeros(target.n)])
    in_camera = lifted @ pose.rotation - pose.position  # rows: R^T x - xi
    depths = in_camera[:, 2]
    if float(np.min(depths)) <= 0.0:
        raise BehindCameraError(
            f"target point projects behind the camera (smallest depth {float(np.min(depths)):.3g} m)"
        )
    bearings = in_camera / np.linalg.norm(in_camera, axis=1)[:, None]
    return bearings_to_pixels(bearings, k), bearings


def project(pose: GroundTruthPose, point, k: CameraIntrinsics) -> tuple[np.ndarray, np.ndarray]:
    """Exact pixel and unit bearing of a single target-plane point."""
    point = np.asarray(point, dtype=float)
    in_camera = pose.rotation.T @ np.array([point[0], point[1], 0.0]) - pose.position
    if in_camera[2] <= 0.0:
        raise BehindCameraError(f"point {point} projects behind the camera")
    bearing = in_camera / float(np.linalg.norm(in_camera))
    return bearings_to_pixels(bearing[None, :], k)[0], bearing


def perturb_pixels(pixels, noise: NoiseModel, rng: np.random.Generator | None = None) -> np.ndarray:
    """Add i.i.d. Gaussian pixel noise; sigma 0 returns an untouched copy.

    Without an explicit generator the noise seed fully determines the output.
    """
    px = np.asarray(pixels, dtype=float)
    if noise.sigma_px == 0.0:
        return px.copy()
    gen = rng if rng is not None else np.random.default_rng(noise.seed)
    return px + gen.normal(0.0, noise.sigma_px, size=px.shape)


def satisfies_side_constraint(pose: GroundTruthPose, target: TargetModel, k: CameraIntrinsics) -> bool:
    """True when every target point is in front of the camera and on the visible side."""
    try:
        _, bearings = project_target(pose, target, k)
    except BehindCameraError:
        return False
    return bool(np.min(bearings @ pose.normal) > 0.0)


def random_pose(
    rng: np.random.Generator,
    target: TargetModel,
    constraints: PoseConstraints | None = None,
    k: CameraIntrinsics | None = None,
) -> GroundTruthPose:
    """Rejection-sample a pose that sees the whole target from the visible side."""
    cons = constraints if constraints is not None else PoseConstraints()
    intr = k if k is not None else default_intrinsics()
    for _ in range(_MAX_POSE_TRIES):
        d = rng.uniform(*cons.d_range)
        lateral = rng.uniform(-cons.lateral_range, cons.lateral_range, size=2)
        tilt = rng.uniform(0.0, cons.max_tilt)
        tilt_axis_angle = rng.uniform(0.0, 2.0 * np.pi)
        yaw = rng.uniform(*cons.yaw_range)

        axis = np.array([np.cos(tilt_axis_angle), np.sin(tilt_axis_angle), 0.0])
        rotation = rotation_from_rotvec(tilt * axis) @ rotation_from_rotvec(yaw * E3)
        target_frame_pos = np.array([lateral[0], lateral[1], -d])
        pose = GroundTruthPose(rotation=rotation, position=rotation.T @ target_frame_pos)
        if satisfies_side_constraint(pose, target, intr):
            return pose
    raise SamplingExhaustedError(
        f"no valid pose in {_MAX_POSE_TRIES} draws; loosen the constraints ({cons})"
    )


def trial_rng(master_seed: int, *indices: int) -> np.random.Generator:
    """Independent generator for one trial, stable under evaluation order."""
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), *map(int, indices)]))
