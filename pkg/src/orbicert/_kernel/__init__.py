"""Mod-N hot loops with a compiled core and a vectorized fallback.

The Cython extension is optional; `ORBICERT_PURE=1` forces the numpy
implementation.  Both backends implement the same four operations with
identical outputs, including the index of the first failing point.
"""

import os

if os.environ.get("ORBICERT_PURE"):
    from . import _pykernel as _impl

    BACKEND = "python"
else:
    try:
        from . import _cykernel as _impl

        BACKEND = "cython"
    except ImportError:
        from . import _pykernel as _impl

        BACKEND = "python"

apply_batch = _impl.apply_batch
orbit_iterate = _impl.orbit_iterate
invariance_scan_range = _impl.invariance_scan_range
invariance_scan_points = _impl.invariance_scan_points
