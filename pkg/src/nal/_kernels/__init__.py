"""Kernel selection: compiled extension when available, numpy otherwise.

Set NAL_PURE_PYTHON=1 to force the numpy implementation.
"""
import os

from . import _fallback

if os.environ.get("NAL_PURE_PYTHON"):
    _impl = _fallback
else:
    try:
        from . import _core as _impl
    except ImportError:
        _impl = _fallback

IMPLEMENTATION = "compiled" if _impl is not _fallback else "python"

gauge_max_abs = _impl.gauge_max_abs
orbit_grid = _impl.orbit_grid
plateau_poly = _impl.plateau_poly
# direction-sampled targets are not on the hot path; numpy only
plateau_dirs = _fallback.plateau_dirs

__all__ = [
    "IMPLEMENTATION",
    "gauge_max_abs",
    "orbit_grid",
    "plateau_poly",
    "plateau_dirs",
]
