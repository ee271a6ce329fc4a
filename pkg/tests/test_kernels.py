"""Compiled kernels against the pure-numpy fallback: same decisions, same numbers."""

import numpy as np
import pytest

from posekit import _kernels
from posekit._kernels import _fallback
from posekit.geometry import angle_between

from _scenes import exact_scene

_native = pytest.importorskip(
    "posekit._kernels._native", reason="compiled backend not built"
)

STATUS_OK = _fallback.STATUS_OK
STATUS_COLLINEAR = _fallback.STATUS_COLLINEAR
STATUS_SINGULAR = _fallback.STATUS_SINGULAR_BEARINGS
STATUS_ZERO = _fallback.STATUS_ZERO_COEFFICIENT


def scene_arrays(seed):
    target, _, bearings = exact_scene(seed)
    return np.ascontiguousarray(target.points), np.ascontiguousarray(bearings)


class TestStatusConstants:
    def test_exported_and_consistent(self):
        for name in ("STATUS_OK", "STATUS_COLLINEAR", "STATUS_SINGULAR_BEARINGS",
                     "STATUS_ZERO_COEFFICIENT"):
            assert getattr(_native, name) == getattr(_fallback, name)
            assert getattr(_kernels, name) == getattr(_fallback, name)

    def test_backend_name_reports_native_when_loaded(self):
        assert _kernels.backend_name() in ("native", "python")


class TestQuadEnumerationParity:
    """Quad selection decides which subsets feed the solver, so the two
    backends must agree bitwise, including tie-breaks."""

    def test_enumerate_identical(self):
        for seed in range(30):
            pts, _ = scene_arrays(seed)
            a = _native.enumerate_valid_quads(pts, 1e-9, -1)
            b = _fallback.enumerate_valid_quads(pts, 1e-9, -1)
            assert np.array_equal(a, b), f"enumeration differs at seed {seed}"

    def test_enumerate_cap_identical(self):
        pts, _ = scene_arrays(3)
        for cap in (0, 1, 5, 100):
            a = _native.enumerate_valid_quads(pts, 1e-9, cap)
            b = _fallback.enumerate_valid_quads(pts, 1e-9, cap)
            assert np.array_equal(a, b)

    def test_top_spread_identical_including_areas(self):
        for seed in range(30):
            pts, _ = scene_arrays(seed)
            qa, aa = _native.top_spread_quads(pts, 1e-9, 20)
            qb, ab = _fallback.top_spread_quads(pts, 1e-9, 20)
            assert np.array_equal(qa, qb), f"top-k indices differ at seed {seed}"
            assert np.array_equal(aa, ab), f"top-k areas differ at seed {seed}"

    def test_top_spread_with_k_beyond_population(self):
        pts = np.ascontiguousarray(
            np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [2.0, 0.3]])
        )
        qa, aa = _native.top_spread_quads(pts, 1e-9, 50)
        qb, ab = _fallback.top_spread_quads(pts, 1e-9, 50)
        assert np.array_equal(qa, qb) and np.array_equal(aa, ab)
        assert qa.shape[0] == 5


class TestNormalKernelParity:
    """The arithmetic kernels agree to floating-point reduction order; the
    fallback sums through numpy/BLAS, so bitwise equality is not expected."""

    def test_normals_and_weights_agree_tightly(self):
        worst = 0.0
        for seed in range(30):
            pts, bearings = scene_arrays(seed)
            quads, _ = _native.top_spread_quads(pts, 1e-9, 20)
            nn, wn, xn, rn, sn = _native.quad_normal_batch(pts, bearings, quads)
            nf, wf, xf, rf, sf = _fallback.quad_normal_batch(pts, bearings, quads)
            assert np.array_equal(sn, sf), f"statuses differ at seed {seed}"
            ok = sn == STATUS_OK
            for i in np.flatnonzero(ok):
                worst = max(worst, angle_between(nn[i], nf[i]))
            assert np.allclose(wn[ok], wf[ok], rtol=1e-11, atol=0.0)
            assert np.allclose(xn[ok], xf[ok], rtol=1e-9, atol=1e-12)
            assert np.allclose(rn[ok], rf[ok], rtol=1e-9, atol=1e-12)
        assert worst < 1e-11, f"worst angular disagreement {worst:.3e} rad"

    def test_collinear_status(self):
        # the quad's point basis is built from the three non-anchor points,
        # so their collinearity is what this kernel can and must detect
        pts = np.ascontiguousarray(
            np.array([[0.0, 1.0], [0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
        )
        bearings = np.ascontiguousarray(
            np.array([[0.0, 0.0, 1.0], [0.1, 0.0, 1.0], [0.0, 0.1, 1.0], [0.1, 0.1, 1.0]])
        )
        bearings /= np.linalg.norm(bearings, axis=1)[:, None]
        quads = np.array([[0, 1, 2, 3]], dtype=np.int64)
        for impl in (_native, _fallback):
            _, _, _, _, status = impl.quad_normal_batch(pts, bearings, quads)
            assert status[0] == STATUS_COLLINEAR

    def test_singular_bearings_status(self):
        pts = np.ascontiguousarray(
            np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        )
        # bearings 2..4 identical: the bearing basis is rank deficient
        b = np.array([0.1, 0.2, 0.97])
        b /= np.linalg.norm(b)
        bearings = np.ascontiguousarray(np.vstack([[0.0, 0.0, 1.0], b, b, b]))
        quads = np.array([[0, 1, 2, 3]], dtype=np.int64)
        for impl in (_native, _fallback):
            _, _, _, _, status = impl.quad_normal_batch(pts, bearings, quads)
            assert status[0] == STATUS_SINGULAR

    def test_zero_coefficient_status(self):
        pts = np.ascontiguousarray(
            np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        )
        # anchor bearing in the span of the first two basis bearings only
        bearings = np.ascontiguousarray(
            np.array(
                [
                    [1.0, 1.0, 0.0] / np.sqrt(np.array(2.0)),
                    [1.0, 0.0, 0.0],
                    [0.0, 1.0, 0.0],
                    [0.0, 0.0, 1.0],
                ]
            )
        )
        quads = np.array([[0, 1, 2, 3]], dtype=np.int64)
        for impl in (_native, _fallback):
            _, _, _, _, status = impl.quad_normal_batch(pts, bearings, quads)
            assert status[0] == STATUS_ZERO

    def test_collinear_priority_over_singular(self):
        # both degeneracies at once: collinear non-anchor points AND a
        # rank-deficient bearing basis; the point check must win
        pts = np.ascontiguousarray(
            np.array([[0.0, 1.0], [0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
        )
        bearings = np.ascontiguousarray(np.tile([0.0, 0.0, 1.0], (4, 1)))
        quads = np.array([[0, 1, 2, 3]], dtype=np.int64)
        for impl in (_native, _fallback):
            _, _, _, _, status = impl.quad_normal_batch(pts, bearings, quads)
            assert status[0] == STATUS_COLLINEAR

    def test_bad_rows_are_zeroed(self):
        pts = np.ascontiguousarray(
            np.array([[0.0, 1.0], [0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
        )
        bearings = np.ascontiguousarray(np.tile([0.0, 0.0, 1.0], (4, 1)))
        quads = np.array([[0, 1, 2, 3]], dtype=np.int64)
        for impl in (_native, _fallback):
            normals, weights, _, _, status = impl.quad_normal_batch(pts, bearings, quads)
            assert status[0] != STATUS_OK
            assert np.array_equal(normals[0], np.zeros(3))
            assert weights[0] == 0.0


class TestEnvironmentSelection:
    def test_invalid_backend_value_rejected(self, monkeypatch):
        import importlib
        import posekit._kernels as pkg

        monkeypatch.setenv("POSEKIT_BACKEND", "fortran")
        with pytest.raises(ValueError):
            importlib.reload(pkg)
        monkeypatch.undo()
        importlib.reload(pkg)
        assert pkg.backend_name() in ("native", "python")

    def test_python_backend_forced(self, monkeypatch):
        import importlib
        import posekit._kernels as pkg

        ambient = pkg.backend_name()
        monkeypatch.setenv("POSEKIT_BACKEND", "python")
        importlib.reload(pkg)
        assert pkg.backend_name() == "python"
        monkeypatch.undo()
        importlib.reload(pkg)
        assert pkg.backend_name() == ambient
