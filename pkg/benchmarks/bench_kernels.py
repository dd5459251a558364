"""Benchmark the compiled dilation kernel against the NumPy fallback.

Both backends stamp disc footprints into a difference array and prefix-sum
it; the compiled one avoids the intermediate index arrays.  Run:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --sizes 256,1024 --density 0.02
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from grayspace.griddata import protection_disc_offsets
from grayspace._kernels import fallback

try:
    from grayspace._kernels import _native as native
except ImportError:
    native = None


def run_once(impl, rows, cols, seed_rows, seed_cols, halfwidths, reach, repeats):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = impl.dilate_footprint(rows, cols, seed_rows, seed_cols, halfwidths, reach)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="128,512,1024",
                        help="comma-separated grid side lengths")
    parser.add_argument("--density", type=float, default=0.05,
                        help="fraction of cells that are receivers")
    parser.add_argument("--radius-cells", type=int, default=8,
                        help="protection radius in cells")
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    footprint = protection_disc_offsets(args.radius_cells * 100.0, 100.0)
    halfwidths = np.asarray(footprint.halfwidths, dtype=np.int64)

    print(f"radius {args.radius_cells} cells ({len(footprint)} offsets), "
          f"density {args.density}, best of {args.repeats}")
    header = f"{'grid':>10} {'seeds':>8} {'fallback':>12} {'native':>12} {'speedup':>8}"
    print(header)
    for size in (int(s) for s in args.sizes.split(",")):
        mask = rng.random((size, size)) < args.density
        seed_rows, seed_cols = (idx.astype(np.int64) for idx in np.nonzero(mask))
        t_fb, out_fb = run_once(fallback, size, size, seed_rows, seed_cols,
                                halfwidths, footprint.reach, args.repeats)
        if native is None:
            print(f"{size:>7}^2 {len(seed_rows):>8} {t_fb * 1e3:>10.2f}ms"
                  f" {'n/a':>12} {'n/a':>8}")
            continue
        t_nat, out_nat = run_once(native, size, size, seed_rows, seed_cols,
                                  halfwidths, footprint.reach, args.repeats)
        assert np.array_equal(out_fb, out_nat), "backends disagree"
        print(f"{size:>7}^2 {len(seed_rows):>8} {t_fb * 1e3:>10.2f}ms"
              f" {t_nat * 1e3:>10.2f}ms {t_fb / t_nat:>7.1f}x")


if __name__ == "__main__":
    main()
