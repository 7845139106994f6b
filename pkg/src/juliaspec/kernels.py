"""Kernel lane selection for the escape grids.

The compiled lane is preferred when its extension imported cleanly; the
numpy lane is the fallback and the reference. Both expose the same band
functions and produce bit-identical rasters (the build keeps float
contraction off in the compiled lane for exactly this reason), so lane
choice never changes results, only speed. Set JULIASPEC_PURE=1 to force
the numpy lane.
"""

import os

from . import _grids_py

_FORCE_PURE = os.environ.get("JULIASPEC_PURE", "") not in ("", "0")

if _FORCE_PURE:
    _impl = _grids_py
    COMPILED = False
else:
    try:
        from . import _grids_cy as _impl

        COMPILED = True
    except ImportError:
        _impl = _grids_py
        COMPILED = False

BOUNDED = _grids_py.BOUNDED

julia_band = _impl.julia_band
ep_band = _impl.ep_band


def lane_name():
    return "compiled" if COMPILED else "pure"


def lanes():
    """Both lane modules when available, for equality tests and timing."""
    out = {"pure": _grids_py}
    if not _FORCE_PURE:
        try:
            from . import _grids_cy

            out["compiled"] = _grids_cy
        except ImportError:
            pass
    return out
