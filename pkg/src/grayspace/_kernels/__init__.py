"""Kernel backend selection.

The compiled extension is preferred when importable; otherwise the
pure-numpy fallback takes over transparently (results are bit-identical,
only speed differs).  Set ``GRAYSPACE_KERNELS=native`` or ``=fallback``
to force a backend — ``native`` then raises if the extension is missing.
"""

from __future__ import annotations

import os

_requested = os.environ.get("GRAYSPACE_KERNELS", "").strip().lower()
if _requested not in ("", "native", "fallback"):
    raise ImportError(
        f"GRAYSPACE_KERNELS must be 'native' or 'fallback', got {_requested!r}"
    )

if _requested == "fallback":
    from . import fallback as _impl

    BACKEND = "fallback"
else:
    try:
        from . import _native as _impl  # type: ignore[attr-defined]

        BACKEND = "native"
    except ImportError:
        if _requested == "native":
            raise
        from . import fallback as _impl

        BACKEND = "fallback"

dilate_footprint = _impl.dilate_footprint

__all__ = ["BACKEND", "dilate_footprint"]
