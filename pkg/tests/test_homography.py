"""Two-view bearing transfer built from recovered poses."""

import numpy as np
import pytest

from posekit.errors import NonPositiveDeterminantError
from posekit.homography import (
    Homography,
    RelativePose,
    bearing_transfer_residual,
    homography_from_poses,
    normalize_sl3,
    relative_pose,
)
from posekit.scene import GroundTruthPose, default_intrinsics, project_target, random_pose
from posekit.solver import CorrespondenceSet, solve_pose

from _scenes import exact_scene

CUBE_ROOT_2 = 2.0 ** (1.0 / 3.0)


def two_view_scene(seed: int):
    """One planar target observed exactly from two independent poses."""
    target, pose1, bearings1 = exact_scene(seed)
    rng = np.random.default_rng(seed + 10_000)
    pose2 = random_pose(rng, target)
    _, bearings2 = project_target(pose2, target, default_intrinsics())
    return target, (pose1, bearings1), (pose2, bearings2)


class TestConstruction:
    def test_frozen_pair_hand_values(self):
        # both views look straight down the plane normal from 2 m and 4 m
        pose1 = GroundTruthPose(np.eye(3), np.array([0.0, 0.0, -2.0]))
        pose2 = GroundTruthPose(np.eye(3), np.array([0.0, 0.0, -4.0]))
        rel = relative_pose(pose1, pose2)
        assert np.allclose(rel.rotation, np.eye(3), atol=1e-15)
        assert np.allclose(rel.translation, [0.0, 0.0, 2.0], atol=1e-15)
        h = homography_from_poses(rel, pose1.normal, pose1.distance)
        assert np.allclose(h.matrix, np.diag([1.0, 1.0, 2.0]), atol=1e-15), f"got {h.matrix}"

    def test_identity_pair(self):
        pose = GroundTruthPose(np.eye(3), np.array([0.0, 0.0, -3.0]))
        rel = relative_pose(pose, pose)
        h = homography_from_poses(rel, pose.normal, pose.distance)
        assert np.allclose(h.matrix, np.eye(3), atol=1e-15)

    def test_rejects_nonpositive_distance(self):
        rel = RelativePose(np.eye(3), np.zeros(3))
        with pytest.raises(ValueError):
            homography_from_poses(rel, [0.0, 0.0, 1.0], 0.0)

    def test_rejects_singular_matrix(self):
        with pytest.raises(ValueError):
            Homography(np.zeros((3, 3)))

    def test_rejects_bad_shape(self):
        with pytest.raises(ValueError):
            Homography(np.eye(4))


class TestNormalization:
    def test_frozen_pair_unit_determinant(self):
        h = normalize_sl3(Homography(np.diag([1.0, 1.0, 2.0])))
        expected = np.diag([1.0 / CUBE_ROOT_2, 1.0 / CUBE_ROOT_2, CUBE_ROOT_2 ** 2])
        assert np.allclose(h.matrix, expected, atol=1e-15), f"got {h.matrix}"
        assert abs(np.linalg.det(h.matrix) - 1.0) < 1e-10

    def test_idempotent(self):
        h = normalize_sl3(Homography(np.diag([3.0, 0.5, 2.0])))
        again = normalize_sl3(h)
        assert np.allclose(again.matrix, h.matrix, atol=1e-15)

    def test_scale_invariant_result(self):
        rng = np.random.default_rng(3)
        m = rng.normal(size=(3, 3))
        if np.linalg.det(m) < 0:
            m[0] = -m[0]
        a = normalize_sl3(Homography(m))
        b = normalize_sl3(Homography(m * 7.3))
        assert np.allclose(a.matrix, b.matrix, atol=1e-12)

    def test_negative_determinant_rejected(self):
        with pytest.raises(NonPositiveDeterminantError):
            normalize_sl3(Homography(np.diag([1.0, 1.0, -2.0])))


class TestBearingTransfer:
    def test_frozen_pair_transfer_and_scales(self):
        pose1 = GroundTruthPose(np.eye(3), np.array([0.0, 0.0, -2.0]))
        pose2 = GroundTruthPose(np.eye(3), np.array([0.0, 0.0, -4.0]))
        h = homography_from_poses(relative_pose(pose1, pose2), pose1.normal, pose1.distance)
        p1 = np.array([[1.0, 0.0, 2.0]]) / np.sqrt(5.0)
        p2 = np.array([[1.0, 0.0, 4.0]]) / np.sqrt(17.0)
        residual, gammas = bearing_transfer_residual(h, p1, p2)
        assert residual < 1e-12
        assert gammas[0] == pytest.approx(np.sqrt(17.0 / 5.0), abs=1e-12)

    def test_true_poses_transfer_exactly(self):
        for seed in range(20):
            target, (pose1, b1), (pose2, b2) = two_view_scene(seed)
            h = homography_from_poses(relative_pose(pose1, pose2), pose1.normal, pose1.distance)
            residual, gammas = bearing_transfer_residual(h, b1, b2)
            assert residual < 1e-10, f"seed {seed}: residual {residual:.3e}"
            # scale factors follow the depth ratio of each point
            expected = (b1 @ pose1.normal) * pose2.distance / (pose1.distance * (b2 @ pose2.normal))
            assert np.allclose(gammas, expected, rtol=1e-10)

    def test_recovered_poses_transfer_exactly(self):
        # homography assembled purely from solver outputs of the two views
        for seed in range(10):
            target, (_, b1), (_, b2) = two_view_scene(seed)
            sol1 = solve_pose(CorrespondenceSet(target.points, b1))
            sol2 = solve_pose(CorrespondenceSet(target.points, b2))
            h = homography_from_poses(relative_pose(sol1, sol2), sol1.normal, sol1.distance)
            residual, _ = bearing_transfer_residual(h, b1, b2)
            assert residual < 1e-9, f"seed {seed}: residual {residual:.3e}"

    def test_recovered_matches_true_homography(self):
        target, (pose1, b1), (pose2, b2) = two_view_scene(5)
        sol1 = solve_pose(CorrespondenceSet(target.points, b1))
        sol2 = solve_pose(CorrespondenceSet(target.points, b2))
        h_est = normalize_sl3(
            homography_from_poses(relative_pose(sol1, sol2), sol1.normal, sol1.distance)
        )
        h_true = normalize_sl3(
            homography_from_poses(relative_pose(pose1, pose2), pose1.normal, pose1.distance)
        )
        assert np.max(np.abs(h_est.matrix - h_true.matrix)) < 1e-9

    def test_mismatched_shapes_rejected(self):
        h = Homography(np.eye(3))
        with pytest.raises(ValueError):
            bearing_transfer_residual(h, np.zeros((3, 3)), np.zeros((4, 3)))
