"""posekit: camera pose from coplanar points and bearing measurements.

Recovers the camera rotation, position, and the observed plane's normal and
distance from n >= 4 coplanar target points, via a hierarchical algebraic
method: plane normal first (fused over 4-point subsets), then distance and
position, then rotation. Includes a synthetic-scene generator, a Monte-Carlo
benchmark harness, a homography bridge between two views, and a CLI.
"""

from ._kernels import backend_name
from .errors import (
    AllPointsExcludedError,
    AmbiguousEigenvectorError,
    BehindCameraError,
    CollinearQuadError,
    DegenerateInputError,
    DegenerateSumError,
    EmptyGroupError,
    GimbalLockWarning,
    GrazingBearingError,
    NonPositiveDeterminantError,
    NoValidQuadError,
    OrientationSideError,
    PoseKitError,
    RankDeficientError,
    SamplingExhaustedError,
    SingularBearingsError,
    SingularMomentError,
    ZeroCoefficientError,
)
from .geometry import (
    CameraIntrinsics,
    angle_between,
    bearings_to_pixels,
    euler_to_rotation,
    geodesic_angle,
    pixels_to_bearings,
    rotation_from_rotvec,
    rotation_to_euler,
)
from .homography import (
    Homography,
    RelativePose,
    bearing_transfer_residual,
    homography_from_poses,
    normalize_sl3,
    relative_pose,
)
from .normal import (
    NormalEstimate,
    SmoothedNormal,
    average_normals,
    batch_normal_estimates,
    least_squares_normal,
    normal_from_quad,
)
from .quads import QuadSelection, select_quads
from .scene import (
    GroundTruthPose,
    NoiseModel,
    PoseConstraints,
    TargetModel,
    default_intrinsics,
    make_grid_target,
    make_random_target,
    perturb_pixels,
    project_target,
    random_pose,
    trial_rng,
)
from .solver import CorrespondenceSet, PoseSolution, SolverConfig, solve_pose

__version__ = "0.1.0"

__all__ = [
    "AllPointsExcludedError",
    "AmbiguousEigenvectorError",
    "BehindCameraError",
    "CameraIntrinsics",
    "CollinearQuadError",
    "CorrespondenceSet",
    "DegenerateInputError",
    "DegenerateSumError",
    "EmptyGroupError",
    "GimbalLockWarning",
    "GrazingBearingError",
    "GroundTruthPose",
    "Homography",
    "NoValidQuadError",
    "NoiseModel",
    "NonPositiveDeterminantError",
    "NormalEstimate",
    "OrientationSideError",
    "PoseConstraints",
    "PoseKitError",
    "PoseSolution",
    "QuadSelection",
    "RankDeficientError",
    "RelativePose",
    "SamplingExhaustedError",
    "SingularBearingsError",
    "SingularMomentError",
    "SmoothedNormal",
    "SolverConfig",
    "TargetModel",
    "ZeroCoefficientError",
    "angle_between",
    "average_normals",
    "backend_name",
    "batch_normal_estimates",
    "bearing_transfer_residual",
    "bearings_to_pixels",
    "default_intrinsics",
    "euler_to_rotation",
    "geodesic_angle",
    "homography_from_poses",
    "least_squares_normal",
    "make_grid_target",
    "make_random_target",
    "normal_from_quad",
    "normalize_sl3",
    "perturb_pixels",
    "pixels_to_bearings",
    "project_target",
    "random_pose",
    "relative_pose",
    "rotation_from_rotvec",
    "rotation_to_euler",
    "select_quads",
    "solve_pose",
    "trial_rng",
    "__version__",
]
