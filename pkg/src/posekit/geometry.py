"""Vectors, rotations, Euler angles, and the pinhole bearing model."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, GimbalLockWarning

E3 = np.array([0.0, 0.0, 1.0])

_GIMBAL_TOL = 1e-6


def normalize(v: np.ndarray, eps: float = 1e-12) -> np.ndarray:
    """Return v / |v|, raising if the norm is numerically zero."""
    v = np.asarray(v, dtype=float)
    n = float(np.linalg.norm(v))
    if n < eps:
        raise DegenerateInputError(f"cannot normalize a vector of norm {n:.3e}")
    return v / n


def as_unit_vector(v, tol: float = 1e-6) -> np.ndarray:
    """Validate that v is a unit 3-vector within tol and renormalize exactly."""
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {v.shape}")
    n = float(np.linalg.norm(v))
    if abs(n - 1.0) > tol:
        raise ValueError(f"vector norm {n:.6g} is not within {tol} of 1")
    return v / n


def as_rotation_matrix(m, tol: float = 1e-9) -> np.ndarray:
    """Validate that m is a proper rotation (orthogonal, determinant +1)."""
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {m.shape}")
    ortho_err = float(np.linalg.norm(m.T @ m - np.eye(3)))
    det = float(np.linalg.det(m))
    if ortho_err > tol or abs(det - 1.0) > tol:
        raise ValueError(
            f"matrix is not a rotation: orthogonality error {ortho_err:.2e}, det {det:.12f}"
        )
    return m


def hat(w) -> np.ndarray:
    """Skew-symmetric matrix such that hat(w) @ v == cross(w, v)."""
    w = np.asarray(w, dtype=float)
    return np.array(
        [
            [0.0, -w[2], w[1]],
            [w[2], 0.0, -w[0]],
            [-w[1], w[0], 0.0],
        ]
    )


def rotation_from_rotvec(w) -> np.ndarray:
    """Rotation by angle |w| about axis w/|w| (right-handed)."""
    w = np.asarray(w, dtype=float)
    theta = float(np.linalg.norm(w))
    if theta < 1e-12:
        return np.eye(3)
    k = hat(w)
    return np.eye(3) + (np.sin(theta) / theta) * k + ((1.0 - np.cos(theta)) / theta**2) * (k @ k)


def angle_between(a, b) -> float:
    """Angle between two 3-vectors, accurate down to zero."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.arctan2(np.linalg.norm(np.cross(a, b)), float(a @ b)))


def geodesic_angle(r1, r2) -> float:
    """Rotation angle of r1^T r2, i.e. how far apart two orientations are."""
    rel = np.asarray(r1, dtype=float).T @ np.asarray(r2, dtype=float)
    cos_part = 0.5 * (np.trace(rel) - 1.0)
    sin_part = 0.5 * np.sqrt(
        (rel[2, 1] - rel[1, 2]) ** 2 + (rel[0, 2] - rel[2, 0]) ** 2 + (rel[1, 0] - rel[0, 1]) ** 2
    )
    return float(np.arctan2(sin_part, cos_part))


def euler_to_rotation(roll: float, pitch: float, yaw: float) -> np.ndarray:
    """Compose a rotation from intrinsic z-y-x angles: yaw, then pitch, then roll."""
    cr, sr = np.cos(roll), np.sin(roll)
    cp, sp = np.cos(pitch), np.sin(pitch)
    cy, sy = np.cos(yaw), np.sin(yaw)
    rz = np.array([[cy, -sy, 0.0], [sy, cy, 0.0], [0.0, 0.0, 1.0]])
    ry = np.array([[cp, 0.0, sp], [0.0, 1.0, 0.0], [-sp, 0.0, cp]])
    rx = np.array([[1.0, 0.0, 0.0], [0.0, cr, -sr], [0.0, sr, cr]])
    return rz @ ry @ rx


def rotation_to_euler(r) -> tuple[float, float, float]:
    """Decompose a rotation into (roll, pitch, yaw), the inverse of euler_to_rotation.

    Near pitch = +/-90 deg only the sum/difference of roll and yaw is observable;
    a GimbalLockWarning is issued and roll is reported as 0.
    """
    r = np.asarray(r, dtype=float)
    cos_pitch = float(np.hypot(r[0, 0], r[1, 0]))
    pitch = float(np.arctan2(-r[2, 0], cos_pitch))
    if cos_pitch < _GIMBAL_TOL:
        warnings.warn(
            "pitch within 1e-6 of +/-90 deg; roll set to 0", GimbalLockWarning, stacklevel=2
        )
        return 0.0, pitch, float(np.arctan2(-r[0, 1], r[1, 1]))
    roll = float(np.arctan2(r[2, 1], r[2, 2]))
    yaw = float(np.arctan2(r[1, 0], r[0, 0]))
    return roll, pitch, yaw


def orthonormalize_with_fixed_third_column(m, third) -> np.ndarray:
    """Project m to a proper rotation whose third column is exactly `third`.

    The first column of m is projected onto the plane orthogonal to `third`
    and the middle column is rebuilt by the right-hand rule, so the result is
    orthogonal with determinant +1 by construction.
    """
    m = np.asarray(m, dtype=float)
    c3 = normalize(third)
    v1 = m[:, 0] - float(c3 @ m[:, 0]) * c3
    n1 = float(np.linalg.norm(v1))
    if n1 < 1e-9:
        raise DegenerateInputError("first column is parallel to the fixed third column")
    c1 = v1 / n1
    return np.column_stack([c1, np.cross(c3, c1), c3])


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole intrinsics, all in pixels."""

    fx: float
    fy: float
    cx: float
    cy: float

    def __post_init__(self) -> None:
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError(f"focal lengths must be positive, got fx={self.fx}, fy={self.fy}")


def pixels_to_bearings(pixels, k: CameraIntrinsics) -> np.ndarray:
    """Unit bearing vectors for an (n, 2) array of pixel coordinates."""
    px = np.asarray(pixels, dtype=float)
    ux = (px[:, 0] - k.cx) / k.fx
    uy = (px[:, 1] - k.cy) / k.fy
    scale = np.sqrt(ux * ux + uy * uy + 1.0)
    return np.column_stack([ux, uy, np.ones_like(ux)]) / scale[:, None]


def pixel_to_bearing(pixel, k: CameraIntrinsics) -> np.ndarray:
    """Unit bearing vector for a single pixel coordinate."""
    return pixels_to_bearings(np.asarray(pixel, dtype=float)[None, :], k)[0]


def bearings_to_pixels(bearings, k: CameraIntrinsics) -> np.ndarray:
    """Pixel coordinates for an (n, 3) array of bearings with positive third component."""
    b = np.asarray(bearings, dtype=float)
    return np.column_stack(
        [k.fx * b[:, 0] / b[:, 2] + k.cx, k.fy * b[:, 1] / b[:, 2] + k.cy]
    )


def bearing_to_pixel(bearing, k: CameraIntrinsics) -> np.ndarray:
    return bearings_to_pixels(np.asarray(bearing, dtype=float)[None, :], k)[0]
