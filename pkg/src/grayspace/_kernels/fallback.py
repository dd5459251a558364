"""Pure-numpy dilation kernel.

Same contract as the compiled twin in ``_native.pyx``: stamp a symmetric,
row-convex footprint (described by per-row halfwidths) onto every seed
point, using a difference array per row so overlapping stamps cost one
run each instead of one write per covered cell.  Integer arithmetic only,
so results are bit-identical to the compiled kernel.
"""

from __future__ import annotations

import numpy as np


def dilate_footprint(rows, cols, seed_rows, seed_cols, halfwidths, reach):
    """Boolean (rows, cols) array: union of footprints stamped at the seeds.

    ``halfwidths[dy + reach]`` is the largest |dx| covered on row offset dy,
    for dy in [-reach, reach].
    """
    width = cols + 1
    diff = np.zeros(rows * width, dtype=np.int64)
    if len(seed_rows):
        seed_rows = np.asarray(seed_rows, dtype=np.int64)
        seed_cols = np.asarray(seed_cols, dtype=np.int64)
        offsets = np.arange(-reach, reach + 1, dtype=np.int64)
        rr = seed_rows[:, None] + offsets[None, :]          # (K, 2*reach+1)
        inside = (rr >= 0) & (rr < rows)
        hw = np.asarray(halfwidths, dtype=np.int64)[None, :]
        lo = np.clip(seed_cols[:, None] - hw, 0, cols - 1)
        hi = np.clip(seed_cols[:, None] + hw, 0, cols - 1)
        start = (rr * width + lo)[inside]
        stop = (rr * width + hi + 1)[inside]
        diff += np.bincount(start, minlength=rows * width)
        diff -= np.bincount(stop, minlength=rows * width)
    covered = np.cumsum(diff.reshape(rows, width), axis=1) > 0
    return covered[:, :cols]
