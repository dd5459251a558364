"""Household grids and protection-zone geometry.

A municipality is modelled as a regular grid of square cells; each cell
carries the number of TV-receiving households inside it.  Because positions
are only known to one cell, protection zones are built conservatively: a
cell is protected by a receiver cell when the *minimum* distance between the
two cell squares is below the protection radius, i.e. the receiver may sit
anywhere in its cell and the interferer anywhere in the protected cell.

The module covers CSV ingestion with sidecar metadata, compensation of the
mismatch between grid area and municipal area, disc-footprint construction,
mask dilation (delegating the hot loop to the compiled/fallback kernel), and
matrix export in plain CSV and run-length-encoded form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ._kernels import dilate_footprint
from .errors import DataError, DomainError

_METADATA_KEYS = ("rows", "cols", "resolution_m", "municipal_area_km2")


@dataclass(frozen=True)
class HouseholdGrid:
    """Immutable raster of household counts plus a validity mask.

    ``counts[y, x]`` is the number of households in row y, column x; cells
    outside the municipality (after area compensation) have ``valid`` False
    and always zero households.
    """

    counts: np.ndarray
    valid: np.ndarray
    resolution_m: float
    municipal_area_km2: float

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=np.int64)
        valid = np.asarray(self.valid, dtype=bool)
        if counts.ndim != 2 or counts.shape != valid.shape:
            raise DataError("counts and valid must be 2-D arrays of equal shape")
        if counts.size == 0:
            raise DataError("grid must contain at least one cell")
        if (counts < 0).any():
            raise DataError("household counts must be non-negative")
        if (counts[~valid] > 0).any():
            raise DataError("household counts must be zero in invalid cells")
        if not (math.isfinite(self.resolution_m) and self.resolution_m > 0):
            raise DomainError("resolution_m must be positive and finite")
        physical = counts.size * (self.resolution_m / 1000.0) ** 2
        if not (0 < self.municipal_area_km2 <= physical * (1 + 1e-9)):
            raise DataError(
                f"municipal_area_km2 ({self.municipal_area_km2}) must be positive "
                f"and no larger than the grid area ({physical} km2)"
            )
        counts.setflags(write=False)
        valid.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "valid", valid)

    @property
    def rows(self) -> int:
        return self.counts.shape[0]

    @property
    def cols(self) -> int:
        return self.counts.shape[1]

    @property
    def cell_area_km2(self) -> float:
        return (self.resolution_m / 1000.0) ** 2

    @property
    def physical_area_km2(self) -> float:
        return self.counts.size * self.cell_area_km2

    @property
    def total_households(self) -> int:
        return int(self.counts.sum())


def ingest_grid(
    records: Iterable[tuple[int, int, int]],
    resolution_m: float,
    municipal_area_km2: float | None = None,
    rows: int | None = None,
    cols: int | None = None,
) -> HouseholdGrid:
    """Build a grid from (x, y, households) cell records.

    Dimensions come from explicit ``rows``/``cols`` or, failing that, from
    the largest indices present.  Cells not listed hold zero households.
    Duplicate coordinates and negative values are rejected.  Without a
    municipal area the grid area is used (no compensation will occur).
    """
    seen: set[tuple[int, int]] = set()
    entries: list[tuple[int, int, int]] = []
    for x, y, households in records:
        if x < 0 or y < 0:
            raise DataError(f"cell coordinates must be non-negative, got ({x}, {y})")
        if households < 0:
            raise DataError(f"household count must be non-negative at ({x}, {y})")
        if (x, y) in seen:
            raise DataError(f"duplicate cell record for ({x}, {y})")
        seen.add((x, y))
        entries.append((x, y, households))

    max_x = max((x for x, _, _ in entries), default=-1)
    max_y = max((_y for _, _y, _ in entries), default=-1)
    n_cols = cols if cols is not None else max_x + 1
    n_rows = rows if rows is not None else max_y + 1
    if n_rows <= 0 or n_cols <= 0:
        raise DataError("grid dimensions could not be determined from the records")
    if max_x >= n_cols or max_y >= n_rows:
        raise DataError(
            f"record at ({max_x}, {max_y}) falls outside the declared "
            f"{n_rows}x{n_cols} grid"
        )

    counts = np.zeros((n_rows, n_cols), dtype=np.int64)
    for x, y, households in entries:
        counts[y, x] = households
    if municipal_area_km2 is None:
        municipal_area_km2 = counts.size * (resolution_m / 1000.0) ** 2
    return HouseholdGrid(
        counts=counts,
        valid=np.ones_like(counts, dtype=bool),
        resolution_m=resolution_m,
        municipal_area_km2=float(municipal_area_km2),
    )


def load_grid_csv(
    path: str | Path,
    resolution_m: float | None = None,
    municipal_area_km2: float | None = None,
) -> HouseholdGrid:
    """Read a grid CSV: ``# key=value`` metadata lines, an ``x,y,households``
    header, then one record per non-empty cell.

    Recognized metadata keys: rows, cols, resolution_m, municipal_area_km2.
    Explicit arguments override file metadata; the resolution must come from
    one of the two.
    """
    meta: dict[str, float] = {}
    records: list[tuple[int, int, int]] = []
    header_seen = False
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, _, value = body.partition("=")
                key = key.strip()
                if key not in _METADATA_KEYS:
                    raise DataError(f"{path}:{lineno}: unknown metadata key {key!r}")
                try:
                    meta[key] = float(value.strip())
                except ValueError:
                    raise DataError(
                        f"{path}:{lineno}: bad value for metadata key {key!r}"
                    ) from None
            continue
        if not header_seen:
            if [c.strip().lower() for c in line.split(",")] != ["x", "y", "households"]:
                raise DataError(f"{path}:{lineno}: expected header 'x,y,households'")
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise DataError(f"{path}:{lineno}: expected 3 fields, got {len(parts)}")
        try:
            records.append((int(parts[0]), int(parts[1]), int(parts[2])))
        except ValueError:
            raise DataError(f"{path}:{lineno}: non-integer field") from None
    if not header_seen:
        raise DataError(f"{path}: missing 'x,y,households' header")

    if resolution_m is None:
        resolution_m = meta.get("resolution_m")
    if resolution_m is None:
        raise DataError(f"{path}: resolution_m missing from metadata and arguments")
    if municipal_area_km2 is None:
        municipal_area_km2 = meta.get("municipal_area_km2")
    rows = int(meta["rows"]) if "rows" in meta else None
    cols = int(meta["cols"]) if "cols" in meta else None
    return ingest_grid(
        records,
        resolution_m=resolution_m,
        municipal_area_km2=municipal_area_km2,
        rows=rows,
        cols=cols,
    )


def write_grid_csv(path: str | Path, grid: HouseholdGrid) -> None:
    """Write a grid in the normalized ingestion format (sorted records)."""
    lines = [
        f"# rows={grid.rows}",
        f"# cols={grid.cols}",
        f"# resolution_m={_fmt(grid.resolution_m)}",
        f"# municipal_area_km2={_fmt(grid.municipal_area_km2)}",
        "x,y,households",
    ]
    ys, xs = np.nonzero(grid.counts)
    order = np.lexsort((xs, ys))
    for y, x in zip(ys[order], xs[order]):
        lines.append(f"{x},{y},{grid.counts[y, x]}")
    Path(path).write_text("\n".join(lines) + "\n")


def _border_scan(rows: int, cols: int) -> Iterable[tuple[int, int]]:
    """Yield (row, col) border-inward: per ring, top row left-to-right, then
    bottom row, then left column top-to-bottom, then right column."""
    ring = 0
    while True:
        top, bottom = ring, rows - 1 - ring
        left, right = ring, cols - 1 - ring
        if top > bottom or left > right:
            return
        for x in range(left, right + 1):
            yield top, x
        if bottom != top:
            for x in range(left, right + 1):
                yield bottom, x
        for y in range(top + 1, bottom):
            yield y, left
        if right != left:
            for y in range(top + 1, bottom):
                yield y, right
        ring += 1


def compensate_area(
    grid: HouseholdGrid, municipal_area_km2: float | None = None
) -> tuple[HouseholdGrid, int]:
    """Invalidate border cells so the valid area matches the municipal area.

    Exactly floor((grid_area - municipal_area) / cell_area) zero-household
    cells are invalidated, scanned border-inward in a fixed order, so the
    result is deterministic.  Household cells are never touched; if too few
    empty cells are reachable the shortfall is reported as a data error.
    Returns the compensated grid and the number of cells invalidated.
    """
    if municipal_area_km2 is None:
        municipal_area_km2 = grid.municipal_area_km2
    if not (0 < municipal_area_km2 <= grid.physical_area_km2 * (1 + 1e-9)):
        raise DataError(
            f"municipal area ({municipal_area_km2} km2) must be positive and "
            f"no larger than the grid area ({grid.physical_area_km2} km2)"
        )
    # The epsilon absorbs IEEE dust in cell_area (e.g. 0.1**2 != 0.01) that
    # could otherwise flip the floor by one whole cell.
    excess = (grid.physical_area_km2 - municipal_area_km2) / grid.cell_area_km2
    target = int(math.floor(excess + 1e-9))
    if target <= 0:
        return (
            HouseholdGrid(
                counts=grid.counts.copy(),
                valid=grid.valid.copy(),
                resolution_m=grid.resolution_m,
                municipal_area_km2=float(municipal_area_km2),
            ),
            0,
        )
    valid = grid.valid.copy()
    remaining = target
    for y, x in _border_scan(grid.rows, grid.cols):
        if remaining == 0:
            break
        if valid[y, x] and grid.counts[y, x] == 0:
            valid[y, x] = False
            remaining -= 1
    if remaining:
        raise DataError(
            f"area compensation needs {target} empty cells but only "
            f"{target - remaining} were available ({remaining} short)"
        )
    return (
        HouseholdGrid(
            counts=grid.counts.copy(),
            valid=valid,
            resolution_m=grid.resolution_m,
            municipal_area_km2=float(municipal_area_km2),
        ),
        target,
    )


def refine_grid(grid: HouseholdGrid, factor: int) -> HouseholdGrid:
    """Split every cell into ``factor``x``factor`` subcells, moving each
    cell's households to the subcell containing the coarse cell's center.

    Validity is inherited by all subcells; resolution shrinks accordingly.
    """
    if factor < 1:
        raise DomainError("factor must be >= 1")
    rows, cols = grid.counts.shape
    counts = np.zeros((rows * factor, cols * factor), dtype=np.int64)
    mid = factor // 2
    ys, xs = np.nonzero(grid.counts)
    counts[ys * factor + mid, xs * factor + mid] = grid.counts[ys, xs]
    valid = np.repeat(np.repeat(grid.valid, factor, axis=0), factor, axis=1)
    return HouseholdGrid(
        counts=counts,
        valid=valid,
        resolution_m=grid.resolution_m / factor,
        municipal_area_km2=grid.municipal_area_km2,
    )


@dataclass(frozen=True)
class DiscFootprint:
    """Cell offsets protected around a receiver cell for one radius.

    An offset (dx, dy) belongs to the footprint when the minimum distance
    between the receiver's cell square and the offset cell square is
    strictly below the radius.  The footprint is symmetric in both axes and
    row-convex, so it is stored as per-row halfwidths:
    ``halfwidths[dy + reach]`` is the largest |dx| on row offset dy.
    """

    radius_m: float
    resolution_m: float
    reach: int
    halfwidths: np.ndarray

    def __post_init__(self) -> None:
        hw = np.asarray(self.halfwidths, dtype=np.int64)
        hw.setflags(write=False)
        object.__setattr__(self, "halfwidths", hw)

    @property
    def offsets(self) -> frozenset[tuple[int, int]]:
        """The explicit (dx, dy) offset set."""
        out = set()
        for dy in range(-self.reach, self.reach + 1):
            w = int(self.halfwidths[dy + self.reach])
            for dx in range(-w, w + 1):
                out.add((dx, dy))
        return frozenset(out)

    def __len__(self) -> int:
        return int(2 * self.halfwidths.sum() + self.halfwidths.size)


def protection_disc_offsets(radius_m: float, resolution_m: float) -> DiscFootprint:
    """Footprint of cells whose square comes within ``radius_m`` of the
    receiver cell's square (strict inequality).

    The radius must be a positive multiple of the resolution (i.e. already
    quantized); anything else is rejected.  Integer arithmetic throughout,
    so boundary cases (offsets exactly at the radius) are exact.
    """
    if not (math.isfinite(resolution_m) and resolution_m > 0):
        raise DomainError("resolution_m must be positive and finite")
    if not math.isfinite(radius_m) or radius_m <= 0:
        raise DomainError("radius_m must be positive and finite")
    steps = radius_m / resolution_m
    reach = int(round(steps))
    if abs(steps - reach) > 1e-9 or reach < 1:
        raise DomainError(
            f"radius_m ({radius_m}) must be a positive multiple of the "
            f"resolution ({resolution_m}); quantize it first"
        )
    halfwidths = np.empty(2 * reach + 1, dtype=np.int64)
    for dy in range(-reach, reach + 1):
        gap = max(abs(dy) - 1, 0)
        # largest integer q with q^2 < reach^2 - gap^2 (strict), then one
        # more cell because squares a single step apart still touch
        q = math.isqrt(reach * reach - gap * gap - 1)
        halfwidths[dy + reach] = q + 1
    return DiscFootprint(
        radius_m=float(radius_m),
        resolution_m=float(resolution_m),
        reach=reach,
        halfwidths=halfwidths,
    )


@dataclass(frozen=True)
class ProtectionMask:
    """Boolean raster of cells where one channel relation is protected."""

    values: np.ndarray
    radius_m: float
    relation: str

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=bool)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


def dilate(receiver_mask: np.ndarray, footprint: DiscFootprint, relation: str = "") -> ProtectionMask:
    """Mark every cell covered by the footprint of any receiver cell.

    Equivalent to scanning all (cell, receiver) pairs for a minimum
    square-to-square distance below the radius, but computed by stamping
    the footprint at each receiver.
    """
    mask = np.asarray(receiver_mask)
    if mask.ndim != 2 or mask.dtype != np.bool_:
        raise DomainError("receiver_mask must be a 2-D boolean array")
    ys, xs = np.nonzero(mask)
    covered = dilate_footprint(
        mask.shape[0],
        mask.shape[1],
        ys.astype(np.int64),
        xs.astype(np.int64),
        footprint.halfwidths,
        footprint.reach,
    )
    return ProtectionMask(values=covered, radius_m=footprint.radius_m, relation=relation)


# ---------------------------------------------------------------------------
# matrix export: plain CSV and run-length encoding


def _fmt(value: float) -> str:
    return f"{value:.10g}"


def _matrix_rows(values: np.ndarray) -> np.ndarray:
    arr = np.asarray(values)
    if arr.ndim != 2:
        raise DomainError("matrix must be 2-D")
    if arr.dtype == np.bool_:
        arr = arr.astype(np.int64)
    return arr


def write_matrix_csv(path: str | Path, values: np.ndarray) -> None:
    """Rows of comma-separated values (%.10g); NaN marks invalid cells."""
    arr = _matrix_rows(values)
    lines = [",".join(_fmt(v) for v in row) for row in arr]
    Path(path).write_text("\n".join(lines) + "\n")


def read_matrix_csv(path: str | Path) -> np.ndarray:
    rows = [
        [float(tok) for tok in line.split(",")]
        for line in Path(path).read_text().splitlines()
        if line.strip()
    ]
    if not rows or len({len(r) for r in rows}) != 1:
        raise DataError(f"{path}: empty or ragged matrix")
    return np.array(rows, dtype=np.float64)


def write_matrix_rle(path: str | Path, values: np.ndarray) -> None:
    """Run-length variant for large grids: one line per row, comma-separated
    ``count*value`` tokens (e.g. ``640*0,3*8``)."""
    arr = _matrix_rows(values)
    lines = [f"# rle rows={arr.shape[0]} cols={arr.shape[1]}"]
    for row in arr:
        tokens = []
        run_value = row[0]
        run_len = 0
        for v in row:
            same = (v == run_value) or (np.isnan(v) and np.isnan(run_value))
            if same:
                run_len += 1
            else:
                tokens.append(f"{run_len}*{_fmt(run_value)}")
                run_value, run_len = v, 1
        tokens.append(f"{run_len}*{_fmt(run_value)}")
        lines.append(",".join(tokens))
    Path(path).write_text("\n".join(lines) + "\n")


def read_matrix_rle(path: str | Path) -> np.ndarray:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("# rle"):
        raise DataError(f"{path}: missing RLE header")
    header = dict(
        part.split("=") for part in lines[0][5:].strip().split() if "=" in part
    )
    try:
        rows, cols = int(header["rows"]), int(header["cols"])
    except (KeyError, ValueError):
        raise DataError(f"{path}: malformed RLE header") from None
    out = np.empty((rows, cols), dtype=np.float64)
    if len(lines) - 1 != rows:
        raise DataError(f"{path}: expected {rows} data lines")
    for i, line in enumerate(lines[1:]):
        col = 0
        for token in line.split(","):
            try:
                count_s, _, value_s = token.partition("*")
                count, value = int(count_s), float(value_s)
            except ValueError:
                raise DataError(f"{path}: bad RLE token {token!r}") from None
            if col + count > cols:
                raise DataError(f"{path}: row {i} longer than {cols} cells")
            out[i, col : col + count] = value
            col += count
        if col != cols:
            raise DataError(f"{path}: row {i} has {col} cells, expected {cols}")
    return out


def naive_protection_scan(
    receiver_mask: np.ndarray, radius_m: float, resolution_m: float
) -> np.ndarray:
    """Reference O(cells x receivers) protection computation.

    Checks the minimum square-to-square distance of every (cell, receiver)
    pair directly.  Exists as the independent route the dilation is tested
    against; use :func:`dilate` for real workloads.
    """
    mask = np.asarray(receiver_mask, dtype=bool)
    rows, cols = mask.shape
    out = np.zeros_like(mask)
    rys, rxs = np.nonzero(mask)
    if len(rys) == 0:
        return out
    ys, xs = np.indices((rows, cols))
    for ry, rx in zip(rys, rxs):
        gap_y = np.maximum(np.abs(ys - ry) - 1, 0) * resolution_m
        gap_x = np.maximum(np.abs(xs - rx) - 1, 0) * resolution_m
        out |= np.hypot(gap_x, gap_y) < radius_m
    return out
