"""Kernel backend selection.

The quad-enumeration and per-quad normal-solve loops dominate solver runtime,
so they exist twice: a compiled Cython extension (``_native``) and a
vectorized numpy fallback (``_fallback``) with identical signatures. The
extension is preferred when importable; set POSEKIT_BACKEND=python to force
the fallback or POSEKIT_BACKEND=native to fail loudly when the extension is
missing.
"""

from __future__ import annotations

import os

from . import _fallback

STATUS_OK = _fallback.STATUS_OK
STATUS_COLLINEAR = _fallback.STATUS_COLLINEAR
STATUS_SINGULAR_BEARINGS = _fallback.STATUS_SINGULAR_BEARINGS
STATUS_ZERO_COEFFICIENT = _fallback.STATUS_ZERO_COEFFICIENT

_requested = os.environ.get("POSEKIT_BACKEND", "auto").strip().lower()
if _requested not in ("auto", "native", "python"):
    raise ValueError(
        f"POSEKIT_BACKEND must be 'auto', 'native' or 'python', got {_requested!r}"
    )

_impl = _fallback
_BACKEND = "python"
if _requested in ("auto", "native"):
    try:
        from . import _native as _impl  # type: ignore[no-redef]

        _BACKEND = "native"
    except ImportError:
        if _requested == "native":
            raise ImportError(
                "POSEKIT_BACKEND=native but posekit._kernels._native is not built; "
                "run 'python setup.py build_ext --inplace'"
            ) from None

quad_normal_batch = _impl.quad_normal_batch
top_spread_quads = _impl.top_spread_quads
enumerate_valid_quads = _impl.enumerate_valid_quads


def backend_name() -> str:
    """Which kernel implementation is active: 'native' or 'python'."""
    return _BACKEND
