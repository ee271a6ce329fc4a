"""Exception taxonomy for the pose library."""


class PoseKitError(Exception):
    """Base class for every error raised by this package."""


class DegenerateInputError(PoseKitError):
    """An input vector or matrix is too close to degenerate to use."""


class NoValidQuadError(PoseKitError):
    """No four-point subset of the target passes the collinearity filter."""


class CollinearQuadError(PoseKitError):
    """Three of a quad's four target points are collinear (point matrix singular)."""


class SingularBearingsError(PoseKitError):
    """The three non-anchor bearings of a quad are linearly dependent."""


class ZeroCoefficientError(PoseKitError):
    """An expansion coefficient vanished, so the bearing-ratio vector is undefined."""


class DegenerateSumError(PoseKitError):
    """The weighted sum of normal estimates is numerically zero."""


class AmbiguousEigenvectorError(PoseKitError):
    """The two smallest eigenvalues coincide; the fused normal is not unique."""


class SingularMomentError(PoseKitError):
    """The planar moment matrix is ill-conditioned (points nearly collinear)."""


class GrazingBearingError(PoseKitError):
    """A bearing is numerically parallel to the target plane."""


class AllPointsExcludedError(PoseKitError):
    """Every reference point sits at the target origin; distance is unobservable."""


class RankDeficientError(PoseKitError):
    """The direction matrix of the rotation stage is rank-deficient."""


class OrientationSideError(PoseKitError):
    """The data is inconsistent with a camera on the visible side of the plane."""


class NonPositiveDeterminantError(PoseKitError):
    """Determinant normalization needs a positive determinant."""


class BehindCameraError(PoseKitError):
    """A target point projects behind the camera."""


class SamplingExhaustedError(PoseKitError):
    """Rejection sampling found no valid pose within the retry budget."""


class EmptyGroupError(PoseKitError):
    """A metrics group contains no records."""


class GimbalLockWarning(RuntimeWarning):
    """Pitch is at +/-90 degrees; roll and yaw are not separately observable."""
