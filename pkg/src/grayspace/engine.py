"""Monte Carlo gray-space engine.

For each realization the engine samples per-cell MUX usage, dilates the
receiver cells into co-channel and adjacent-channel protection masks, and
counts per cell how many channel slots (used channels plus adjacent-channel
slots) remain usable.  Statistics are averaged over realizations:

* a per-cell mean gray-space map (MHz, NaN outside the municipality),
* a survival-form CDF: percent of valid area with at least g MHz free,
* a household utilization table over configurable MHz buckets.

All per-realization quantities are integers (slot counts, cell counts,
household sums), and workers return integer partial sums, so results are
bit-identical for any worker count and for both kernel backends.  The
per-realization RNG is keyed on (master_seed, realization_index); see
:mod:`grayspace.scenario`.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigError, DataError, DomainError
from .griddata import (
    DiscFootprint,
    HouseholdGrid,
    dilate,
    protection_disc_offsets,
)
from .linkbudget import (
    DeviceProfile,
    ProtectionCriteria,
    quantize_distance,
    separation_report,
)
from .propagation import HataParams
from .scenario import ChannelPlan, KnowledgeConfig, gray_space_capacity, realize_cells

OTHER_BUCKET_LABEL = "other"


@dataclass(frozen=True)
class Bucket:
    """One utilization bucket: an inclusive MHz interval (the lower edge
    turns exclusive for open-ended ``X<`` buckets)."""

    label: str
    lower_mhz: float
    upper_mhz: float
    lower_inclusive: bool = True

    def __post_init__(self) -> None:
        if math.isnan(self.lower_mhz) or math.isnan(self.upper_mhz):
            raise ConfigError("bucket bounds must not be NaN")
        if self.lower_mhz > self.upper_mhz:
            raise ConfigError(f"bucket {self.label!r} has lower > upper")

    def contains(self, value_mhz: float) -> bool:
        if self.lower_inclusive:
            return self.lower_mhz <= value_mhz <= self.upper_mhz
        return self.lower_mhz < value_mhz <= self.upper_mhz


DEFAULT_BUCKETS = (
    Bucket("24-64", 24.0, 64.0),
    Bucket("72-96", 72.0, 96.0),
    Bucket("96<", 96.0, math.inf, lower_inclusive=False),
)


def parse_buckets(text: str) -> tuple[Bucket, ...]:
    """Parse a bucket list like ``24-64,72-96,96<``.

    ``A-B`` is the inclusive range [A, B]; ``B<`` is everything above B.
    Overlapping buckets are a configuration error.
    """
    buckets: list[Bucket] = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        try:
            if token.endswith("<"):
                lower = float(token[:-1])
                buckets.append(Bucket(token, lower, math.inf, lower_inclusive=False))
            else:
                lo_s, _, hi_s = token.partition("-")
                if not _:
                    raise ValueError(token)
                buckets.append(Bucket(token, float(lo_s), float(hi_s)))
        except ValueError:
            raise ConfigError(f"malformed bucket {token!r}") from None
    if not buckets:
        raise ConfigError("bucket list is empty")
    _check_bucket_overlap(buckets)
    return tuple(buckets)


def _check_bucket_overlap(buckets: Sequence[Bucket]) -> None:
    for i, a in enumerate(buckets):
        for b in buckets[i + 1 :]:
            lo = max(
                (a.lower_mhz, not a.lower_inclusive),
                (b.lower_mhz, not b.lower_inclusive),
            )
            hi = min(a.upper_mhz, b.upper_mhz)
            if lo[0] < hi or (lo[0] == hi and not lo[1]):
                raise ConfigError(f"buckets {a.label!r} and {b.label!r} overlap")


@dataclass(frozen=True)
class GraySpaceMap:
    """Per-cell gray space in MHz; NaN outside the municipality."""

    values: np.ndarray
    resolution_m: float

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class CdfCurve:
    """Survival curve: percent of valid area with >= level MHz available."""

    levels_mhz: np.ndarray
    percent_area: np.ndarray
    realizations: int


@dataclass(frozen=True)
class UtilizationTable:
    """Mean number of households per gray-space bucket.

    The trailing entry (label :data:`OTHER_BUCKET_LABEL`) collects every
    household whose cell value falls outside all configured buckets, so the
    rows always sum to the total household count.
    """

    labels: tuple[str, ...]
    mean_households: np.ndarray
    realizations: int


@dataclass(frozen=True)
class MonteCarloResult:
    mean_map: GraySpaceMap
    cdf: CdfCurve
    utilization: UtilizationTable
    realizations: int
    master_seed: int
    co_radius_m: float
    adjacent_radius_m: float
    warnings: tuple[str, ...]


@dataclass(frozen=True)
class _RunState:
    """Everything a worker needs to evaluate realizations."""

    grid: HouseholdGrid
    knowledge: KnowledgeConfig
    footprint_co: DiscFootprint
    footprint_adj: DiscFootprint
    used_count: int
    guard_indices: tuple[tuple[int, ...], ...]
    slot_bucket: np.ndarray  # slot count -> bucket index (len n_slots + 1)
    master_seed: int


def _slot_bucket_map(
    n_slots: int, bandwidth_mhz: float, buckets: Sequence[Bucket]
) -> np.ndarray:
    out = np.full(n_slots + 1, len(buckets), dtype=np.int64)
    for slot in range(n_slots + 1):
        value = slot * bandwidth_mhz
        for b, bucket in enumerate(buckets):
            if bucket.contains(value):
                out[slot] = b
                break
    return out


def _available_slots(state: _RunState, flags: np.ndarray) -> np.ndarray:
    """Count usable channel slots per cell for one realization's flags."""
    cache: dict[bytes, tuple[np.ndarray, np.ndarray]] = {}
    co_masks: list[np.ndarray] = []
    adj_masks: list[np.ndarray] = []
    for m in range(state.used_count):
        key = flags[m].tobytes()
        if key not in cache:
            cache[key] = (
                dilate(flags[m], state.footprint_co, "co").values,
                dilate(flags[m], state.footprint_adj, "adjacent").values,
            )
        co, adj = cache[key]
        co_masks.append(co)
        adj_masks.append(adj)

    avail = np.zeros(flags.shape[1:], dtype=np.int64)
    for co in co_masks:
        avail += ~co
    for guards in state.guard_indices:
        free = ~adj_masks[guards[0]]
        for g in guards[1:]:
            free = free & ~adj_masks[g]
        avail += free
    return avail


def _realization_slots(state: _RunState, index: int) -> np.ndarray:
    flags = realize_cells(state.grid, state.knowledge, state.master_seed, index).flags
    return _available_slots(state, flags)


def _accumulate(state: _RunState, indices: Sequence[int]):
    """Integer totals over a batch of realizations (order-independent)."""
    grid = state.grid
    n_slots = state.used_count + len(state.guard_indices)
    slot_sum = np.zeros(grid.counts.shape, dtype=np.int64)
    count_ge = np.zeros(n_slots + 1, dtype=np.int64)
    bucket_households = np.zeros(int(state.slot_bucket.max()) + 1, dtype=np.int64)
    for r in indices:
        avail = _realization_slots(state, r)
        slot_sum += avail
        hist = np.bincount(avail[grid.valid], minlength=n_slots + 1)
        count_ge += hist[::-1].cumsum()[::-1]
        cell_bucket = state.slot_bucket[avail]
        for b in range(len(bucket_households)):
            bucket_households[b] += grid.counts[cell_bucket == b].sum()
    return slot_sum, count_ge, bucket_households


_WORKER_STATE: _RunState | None = None


def _init_worker(state: _RunState) -> None:
    global _WORKER_STATE
    _WORKER_STATE = state


def _worker_accumulate(indices: Sequence[int]):
    assert _WORKER_STATE is not None
    return _accumulate(_WORKER_STATE, indices)


def _build_state(
    grid: HouseholdGrid,
    device: DeviceProfile,
    criteria: ProtectionCriteria,
    hata: HataParams,
    plan: ChannelPlan,
    knowledge: KnowledgeConfig,
    master_seed: int,
    buckets: Sequence[Bucket],
) -> tuple[_RunState, dict]:
    if len(plan.used_channels) != 5:
        raise ConfigError(
            "the usage model covers exactly 5 MUXs; the channel plan lists "
            f"{len(plan.used_channels)} used channels"
        )
    if not grid.valid.any():
        raise DataError("grid has no valid cells; nothing to evaluate")
    _check_bucket_overlap(buckets)

    sep = separation_report(device, criteria, hata)
    co_radius = quantize_distance(sep.min_distance_co_m, grid.resolution_m)
    adj_radius = quantize_distance(sep.min_distance_adjacent_m, grid.resolution_m)
    used_index = {m: i for i, m in enumerate(plan.used_channels)}
    guard_indices = tuple(
        tuple(used_index[m] for m in guards) for _, guards in plan.adjacent_entries()
    )
    n_slots = len(plan.used_channels) + len(guard_indices)
    state = _RunState(
        grid=grid,
        knowledge=knowledge,
        footprint_co=protection_disc_offsets(co_radius, grid.resolution_m),
        footprint_adj=protection_disc_offsets(adj_radius, grid.resolution_m),
        used_count=len(plan.used_channels),
        guard_indices=guard_indices,
        slot_bucket=_slot_bucket_map(n_slots, plan.channel_bandwidth_mhz, buckets),
        master_seed=master_seed,
    )
    extras = {
        "co_radius_m": co_radius,
        "adj_radius_m": adj_radius,
        "warnings": sep.warnings,
        "n_slots": n_slots,
    }
    return state, extras


def single_realization_map(
    grid: HouseholdGrid,
    device: DeviceProfile,
    criteria: ProtectionCriteria,
    hata: HataParams,
    plan: ChannelPlan,
    knowledge: KnowledgeConfig,
    master_seed: int,
    realization_index: int = 0,
) -> GraySpaceMap:
    """Gray-space map (MHz) of one realization — the engine's inner step.

    Useful for coupled per-realization comparisons across devices or
    knowledge levels (same seed and index => same household variates).
    """
    state, _ = _build_state(
        grid, device, criteria, hata, plan, knowledge, master_seed, DEFAULT_BUCKETS
    )
    values = _realization_slots(state, realization_index) * plan.channel_bandwidth_mhz
    values = values.astype(np.float64)
    values[~grid.valid] = np.nan
    return GraySpaceMap(values=values, resolution_m=grid.resolution_m)


def run_monte_carlo(
    grid: HouseholdGrid,
    device: DeviceProfile,
    criteria: ProtectionCriteria,
    hata: HataParams,
    plan: ChannelPlan,
    knowledge: KnowledgeConfig,
    realizations: int = 100,
    master_seed: int = 0,
    buckets: Sequence[Bucket] = DEFAULT_BUCKETS,
    workers: int = 1,
) -> MonteCarloResult:
    """Run the full Monte Carlo evaluation and average the statistics.

    KL1 is deterministic (usage is assumed, not sampled), so a single
    realization is evaluated and reused — the output is identical for any
    ``realizations`` value.  With ``workers > 1`` realizations are split
    across processes; integer partial sums keep the result bit-identical
    to the single-process run.
    """
    if realizations < 1:
        raise DomainError("realizations must be >= 1")
    if workers < 1:
        raise DomainError("workers must be >= 1")
    state, extras = _build_state(
        grid, device, criteria, hata, plan, knowledge, master_seed, buckets
    )
    effective = 1 if knowledge.level == "KL1" else realizations
    indices = range(effective)

    if workers == 1 or effective == 1:
        slot_sum, count_ge, bucket_households = _accumulate(state, indices)
    else:
        n_workers = min(workers, effective)
        chunks = [list(indices[i::n_workers]) for i in range(n_workers)]
        slot_sum = np.zeros(grid.counts.shape, dtype=np.int64)
        count_ge = np.zeros(extras["n_slots"] + 1, dtype=np.int64)
        bucket_households = np.zeros(int(state.slot_bucket.max()) + 1, dtype=np.int64)
        with ProcessPoolExecutor(
            max_workers=n_workers, initializer=_init_worker, initargs=(state,)
        ) as pool:
            for part_slots, part_ge, part_buckets in pool.map(
                _worker_accumulate, chunks
            ):
                slot_sum += part_slots
                count_ge += part_ge
                bucket_households += part_buckets

    bandwidth = plan.channel_bandwidth_mhz
    n_valid = int(grid.valid.sum())
    mean_values = slot_sum * (bandwidth / effective)
    mean_values[~grid.valid] = np.nan
    levels = np.arange(extras["n_slots"] + 1) * bandwidth
    percent = count_ge * (100.0 / (effective * n_valid))
    mean_households = bucket_households / effective

    labels = tuple(b.label for b in buckets) + (OTHER_BUCKET_LABEL,)
    return MonteCarloResult(
        mean_map=GraySpaceMap(values=mean_values, resolution_m=grid.resolution_m),
        cdf=CdfCurve(levels_mhz=levels, percent_area=percent, realizations=realizations),
        utilization=UtilizationTable(
            labels=labels, mean_households=mean_households, realizations=realizations
        ),
        realizations=realizations,
        master_seed=master_seed,
        co_radius_m=extras["co_radius_m"],
        adjacent_radius_m=extras["adj_radius_m"],
        warnings=extras["warnings"],
    )


# ---------------------------------------------------------------------------
# statistics over stored maps (used by the report command)


def cdf_from_map(values: np.ndarray, levels_mhz: Sequence[float]) -> CdfCurve:
    """Survival CDF of a single stored map; NaN cells are outside the area."""
    arr = np.asarray(values, dtype=np.float64)
    valid = ~np.isnan(arr)
    n_valid = int(valid.sum())
    if n_valid == 0:
        raise DataError("map has no valid cells")
    flat = arr[valid]
    levels = np.asarray(list(levels_mhz), dtype=np.float64)
    counts = np.array([(flat >= g).sum() for g in levels], dtype=np.int64)
    percent = counts * (100.0 / n_valid)
    return CdfCurve(levels_mhz=levels, percent_area=percent, realizations=1)


def utilization_from_map(
    values: np.ndarray, counts: np.ndarray, buckets: Sequence[Bucket]
) -> UtilizationTable:
    """Household bucket sums of a single stored map."""
    arr = np.asarray(values, dtype=np.float64)
    counts = np.asarray(counts, dtype=np.int64)
    if arr.shape != counts.shape:
        raise DataError("map and household grid shapes differ")
    _check_bucket_overlap(buckets)
    sums = []
    assigned = np.zeros(arr.shape, dtype=bool)
    valid = ~np.isnan(arr)
    with np.errstate(invalid="ignore"):
        for bucket in buckets:
            above = (
                arr >= bucket.lower_mhz
                if bucket.lower_inclusive
                else arr > bucket.lower_mhz
            )
            member = valid & above & (arr <= bucket.upper_mhz) & ~assigned
            assigned |= member
            sums.append(int(counts[member].sum()))
    sums.append(int(counts[valid & ~assigned].sum()))
    labels = tuple(b.label for b in buckets) + (OTHER_BUCKET_LABEL,)
    return UtilizationTable(
        labels=labels,
        mean_households=np.asarray(sums, dtype=np.float64),
        realizations=1,
    )


# ---------------------------------------------------------------------------
# output writers


def write_cdf_csv(path: str | Path, cdf: CdfCurve) -> None:
    lines = ["gray_mhz,percent_area"]
    for level, percent in zip(cdf.levels_mhz, cdf.percent_area):
        lines.append(f"{level:.10g},{percent:.10g}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_utilization_csv(path: str | Path, table: UtilizationTable) -> None:
    lines = ["bucket,mean_households"]
    for label, mean in zip(table.labels, table.mean_households):
        lines.append(f"{label},{mean:.1f}")
    Path(path).write_text("\n".join(lines) + "\n")
