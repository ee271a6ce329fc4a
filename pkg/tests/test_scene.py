"""Synthetic-scene oracle: targets, poses, projection, noise, seeding."""

import numpy as np
import pytest

from posekit.errors import BehindCameraError
from posekit.geometry import E3, angle_between, pixels_to_bearings, rotation_from_rotvec
from posekit.scene import (
    DEFAULT_FOCAL_PX,
    IMAGE_HEIGHT,
    IMAGE_WIDTH,
    GroundTruthPose,
    NoiseModel,
    PoseConstraints,
    TargetModel,
    default_intrinsics,
    make_grid_target,
    make_random_target,
    perturb_pixels,
    project,
    project_target,
    random_pose,
    satisfies_side_constraint,
    trial_rng,
)

from _scenes import exact_scene


def straight_down_pose(d: float = 2.0) -> GroundTruthPose:
    return GroundTruthPose(rotation=np.eye(3), position=np.array([0.0, 0.0, -d]))


class TestIntrinsics:
    def test_default_values(self):
        k = default_intrinsics()
        assert (k.fx, k.fy) == (DEFAULT_FOCAL_PX, DEFAULT_FOCAL_PX)
        assert (k.cx, k.cy) == (IMAGE_WIDTH / 2.0, IMAGE_HEIGHT / 2.0)


class TestTargets:
    def test_grid_2x2_hand_values(self):
        target = make_grid_target(2, 2, 1.0)
        expected = np.array([[-0.5, -0.5], [0.5, -0.5], [-0.5, 0.5], [0.5, 0.5]])
        assert np.allclose(target.points, expected, atol=1e-15)
        assert target.extent == (1.0, 1.0)
        assert target.n == 4
        assert target.size == 1.0

    def test_grid_5x5_centered_with_origin_point(self):
        target = make_grid_target(5, 5, 0.4)
        assert target.n == 25
        assert target.extent == (1.6, 1.6)
        assert np.allclose(target.points.mean(axis=0), 0.0, atol=1e-15)
        assert np.allclose(target.points[12], [0.0, 0.0], atol=1e-15)

    def test_grid_rejects_too_few_points(self):
        with pytest.raises(ValueError):
            make_grid_target(1, 3, 0.4)

    def test_grid_rejects_collinear_lattice(self):
        with pytest.raises(ValueError):
            make_grid_target(1, 4, 0.4)

    def test_grid_rejects_bad_pitch(self):
        with pytest.raises(ValueError):
            make_grid_target(3, 3, 0.0)

    def test_random_target_bounds_and_determinism(self):
        a = make_random_target(12, 2.0, np.random.default_rng(5))
        b = make_random_target(12, 2.0, np.random.default_rng(5))
        assert np.array_equal(a.points, b.points)
        assert a.n == 12
        assert np.max(np.abs(a.points)) <= 1.0

    def test_random_target_rejects_small_n(self):
        with pytest.raises(ValueError):
            make_random_target(3, 2.0, np.random.default_rng(0))

    def test_target_model_rejects_collinear_cloud(self):
        pts = np.column_stack([np.linspace(0, 1, 6), np.linspace(0, 2, 6)])
        with pytest.raises(ValueError):
            TargetModel(points=pts, extent=(1.0, 2.0))


class TestGroundTruthPose:
    def test_straight_down_identities(self):
        pose = straight_down_pose(2.0)
        assert np.allclose(pose.normal, E3, atol=1e-15)
        assert pose.distance == pytest.approx(2.0, abs=1e-15)
        assert np.allclose(pose.target_frame_position, [0.0, 0.0, -2.0], atol=1e-15)

    def test_distance_is_plane_offset_for_random_poses(self):
        rng = np.random.default_rng(2)
        target = make_grid_target(3, 3, 0.5)
        for _ in range(20):
            pose = random_pose(rng, target)
            # the normal is the third row of the rotation
            assert np.allclose(pose.normal, pose.rotation[2], atol=1e-15)
            assert pose.distance == pytest.approx(-pose.normal @ pose.position, abs=1e-15)
            assert pose.distance == pytest.approx(-pose.target_frame_position[2], abs=1e-12)

    def test_rejects_camera_behind_plane(self):
        with pytest.raises(ValueError):
            GroundTruthPose(rotation=np.eye(3), position=np.array([0.0, 0.0, 2.0]))


class TestProjection:
    def test_straight_down_hand_pixels(self):
        target = TargetModel(
            points=np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]),
            extent=(1.0, 1.0),
        )
        pixels, bearings = project_target(straight_down_pose(2.0), target, default_intrinsics())
        assert np.allclose(pixels[0], [320.0, 256.0], atol=1e-12)
        assert np.allclose(pixels[1], [720.0, 256.0], atol=1e-12), f"got {pixels[1]}"
        assert np.allclose(pixels[2], [320.0, 656.0], atol=1e-12)
        assert np.allclose(bearings[0], E3, atol=1e-15)
        assert np.allclose(bearings[1], np.array([1.0, 0.0, 2.0]) / np.sqrt(5.0), atol=1e-15)

    def test_single_point_matches_batch(self):
        target = make_grid_target(3, 3, 0.5)
        pose = random_pose(np.random.default_rng(1), target)
        k = default_intrinsics()
        pixels, bearings = project_target(pose, target, k)
        for i, pt in enumerate(target.points):
            px, b = project(pose, pt, k)
            assert np.allclose(px, pixels[i], atol=1e-12)
            assert np.allclose(b, bearings[i], atol=1e-15)

    def test_pixels_invert_to_bearings(self):
        target, pose, bearings = exact_scene(3)
        pixels, _ = project_target(pose, target, default_intrinsics())
        assert np.allclose(pixels_to_bearings(pixels, default_intrinsics()), bearings, atol=1e-12)

    def test_bearings_satisfy_measurement_equation(self):
        # (d / eta.p) p must land exactly on R^T x - xi
        target, pose, bearings = exact_scene(11)
        lifted = np.column_stack([target.points, np.zeros(target.n)])
        expected = lifted @ pose.rotation - pose.position
        depths = pose.distance / (bearings @ pose.normal)
        assert np.max(np.abs(depths[:, None] * bearings - expected)) < 1e-10

    def test_point_behind_camera_raises(self):
        # steep tilt at close range pushes a far corner behind the image plane
        target = TargetModel(
            points=np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [5.0, 5.0]]),
            extent=(5.0, 5.0),
        )
        rotation = rotation_from_rotvec(1.4 * np.array([1.0, 0.0, 0.0]))
        pose = GroundTruthPose(rotation=rotation, position=rotation.T @ np.array([0.0, 0.0, -0.1]))
        with pytest.raises(BehindCameraError):
            project_target(pose, target, default_intrinsics())
        assert not satisfies_side_constraint(pose, target, default_intrinsics())

    def test_valid_pose_satisfies_side_constraint(self):
        target = make_grid_target(4, 4, 0.3)
        pose = random_pose(np.random.default_rng(8), target)
        assert satisfies_side_constraint(pose, target, default_intrinsics())


class TestPixelNoise:
    def test_zero_sigma_returns_untouched_copy(self):
        pixels = np.array([[1.0, 2.0], [3.0, 4.0]])
        out = perturb_pixels(pixels, NoiseModel(sigma_px=0.0))
        assert np.array_equal(out, pixels)
        assert out is not pixels

    def test_seed_determinism(self):
        pixels = np.zeros((100, 2))
        a = perturb_pixels(pixels, NoiseModel(sigma_px=0.5, seed=42))
        b = perturb_pixels(pixels, NoiseModel(sigma_px=0.5, seed=42))
        c = perturb_pixels(pixels, NoiseModel(sigma_px=0.5, seed=43))
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_explicit_generator_wins(self):
        pixels = np.zeros((10, 2))
        a = perturb_pixels(pixels, NoiseModel(sigma_px=0.5, seed=1), np.random.default_rng(9))
        b = perturb_pixels(pixels, NoiseModel(sigma_px=0.5, seed=2), np.random.default_rng(9))
        assert np.array_equal(a, b)

    def test_empirical_noise_scale(self):
        pixels = np.zeros((50_000, 2))
        out = perturb_pixels(pixels, NoiseModel(sigma_px=0.5, seed=3))
        assert abs(out.std() - 0.5) < 0.01
        assert abs(out.mean()) < 0.01

    def test_negative_sigma_rejected(self):
        with pytest.raises(ValueError):
            NoiseModel(sigma_px=-0.1)


class TestRandomPose:
    def test_constraints_hold_over_many_draws(self):
        target = make_grid_target(3, 3, 0.4)
        cons = PoseConstraints(d_range=(1.5, 3.0), max_tilt=0.4, lateral_range=0.3)
        rng = np.random.default_rng(12)
        for _ in range(200):
            pose = random_pose(rng, target, cons)
            assert 1.5 <= pose.distance <= 3.0
            assert angle_between(pose.normal, E3) <= 0.4 + 1e-12
            assert np.max(np.abs(pose.target_frame_position[:2])) <= 0.3 + 1e-12
            assert abs(np.linalg.det(pose.rotation) - 1.0) < 1e-12

    def test_deterministic_given_generator_state(self):
        target = make_grid_target(3, 3, 0.4)
        a = random_pose(np.random.default_rng(7), target)
        b = random_pose(np.random.default_rng(7), target)
        assert np.array_equal(a.rotation, b.rotation)
        assert np.array_equal(a.position, b.position)

    def test_constraint_validation(self):
        with pytest.raises(ValueError):
            PoseConstraints(max_tilt=np.pi / 2)
        with pytest.raises(ValueError):
            PoseConstraints(d_range=(0.0, 1.0))
        with pytest.raises(ValueError):
            PoseConstraints(d_range=(2.0, 1.0))
        with pytest.raises(ValueError):
            PoseConstraints(lateral_range=-0.1)


class TestTrialRng:
    def test_same_coordinates_same_stream(self):
        a = trial_rng(0, 3, 1, 4).standard_normal(8)
        b = trial_rng(0, 3, 1, 4).standard_normal(8)
        assert np.array_equal(a, b)

    def test_different_coordinates_differ(self):
        a = trial_rng(0, 3, 1, 4).standard_normal(8)
        b = trial_rng(0, 3, 1, 5).standard_normal(8)
        c = trial_rng(1, 3, 1, 4).standard_normal(8)
        assert not np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_matches_seed_sequence_construction(self):
        expected = np.random.default_rng(np.random.SeedSequence([5, 2, 7])).random(4)
        assert np.array_equal(trial_rng(5, 2, 7).random(4), expected)
