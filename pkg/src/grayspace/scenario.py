"""Channel-plan accounting and receiver-usage sampling.

Five broadcast multiplexes (MUX 1-5) occupy five channels of a TV band.
How much of the band a secondary device must avoid around a household
depends on what is known about that household's *usage* of the MUXs.
Three knowledge levels are modelled:

* KL1 - registration only: every household is assumed to use every MUX.
* KL2 - capability/subscription: a household can receive the free MUX 1
  when it is covered at all, and the MUX 2-5 bundle when it additionally
  subscribes to it.
* KL3 - actual viewing: a covered household watches at most one MUX,
  drawn from per-time-period market shares (or is idle).

Sampling is driven by one uniform variate triple per household —
``(coverage, subscription, viewing)`` — shared by all knowledge levels, so
for any fixed draw the usage sets shrink as knowledge grows (exactly for
KL2 vs KL1 and, under the conditional share interpretation, for KL3 vs
KL2; MUX 2-5 viewing then implies subscription by construction).  Variates
are generated by a counter-based (Philox) stream keyed on
``(master_seed, realization_index)``, so any partitioning of realizations
across workers reproduces identical draws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import ConfigError, DomainError
from .griddata import HouseholdGrid

KNOWLEDGE_LEVELS = ("KL1", "KL2", "KL3")
TIME_PERIODS = ("TP1", "TP2")
SHARE_INTERPRETATIONS = ("unconditional", "conditional_on_subscription")

#: Per-MUX market shares by time period (fraction of covered households
#: watching that MUX), used verbatim — TP1 deliberately sums to 0.0998.
MUX_SHARES: dict[str, tuple[float, ...]] = {
    "TP1": (0.0346, 0.0245, 0.0159, 0.0178, 0.007),
    "TP2": (0.193, 0.127, 0.062, 0.057, 0.012),
}

#: Order of the uniform variates drawn per household.
VARIATE_COLUMNS = ("coverage", "subscription", "viewing")


@dataclass(frozen=True)
class ChannelPlan:
    """The band and the channels the five MUXs transmit on.

    ``dedup_adjacent`` controls how shared adjacent channels are counted:
    real plans count a channel sandwiched between two used channels once
    (and clearing it requires distance from both neighbours); switching it
    off counts one adjacent slot per (used channel, side), which is the
    abstract maximum-10 accounting.
    """

    total_band_mhz: float = 320.0
    channel_bandwidth_mhz: float = 8.0
    used_channels: tuple[int, ...] = (21, 24, 27, 30, 33)
    dedup_adjacent: bool = True

    def __post_init__(self) -> None:
        if not (math.isfinite(self.total_band_mhz) and self.total_band_mhz > 0):
            raise DomainError("total_band_mhz must be positive and finite")
        if not (
            math.isfinite(self.channel_bandwidth_mhz)
            and self.channel_bandwidth_mhz > 0
        ):
            raise DomainError("channel_bandwidth_mhz must be positive and finite")
        used = tuple(int(c) for c in self.used_channels)
        if len(set(used)) != len(used):
            raise ConfigError(f"used_channels contains duplicates: {used}")
        object.__setattr__(self, "used_channels", used)

    def adjacent_entries(self) -> tuple[tuple[int, tuple[int, ...]], ...]:
        """Adjacent-channel slots as (channel, guarding used channels).

        A slot is usable only when the device is outside the adjacent
        protection mask of *every* guarding used channel.  Channels that
        are themselves used never appear.
        """
        used = set(self.used_channels)
        if self.dedup_adjacent:
            channels = sorted(
                {c for m in self.used_channels for c in (m - 1, m + 1)} - used
            )
            return tuple(
                (c, tuple(m for m in self.used_channels if abs(m - c) == 1))
                for c in channels
            )
        entries = []
        for m in self.used_channels:
            for c in (m - 1, m + 1):
                if c not in used:
                    entries.append((c, (m,)))
        return tuple(entries)

    @property
    def adjacent_channels(self) -> tuple[int, ...]:
        return tuple(c for c, _ in self.adjacent_entries())


def gray_space_capacity(plan: ChannelPlan) -> float:
    """MHz reachable inside the service area: used plus adjacent slots."""
    n_slots = len(plan.used_channels) + len(plan.adjacent_entries())
    return n_slots * plan.channel_bandwidth_mhz


def white_space_amount(plan: ChannelPlan) -> float:
    """MHz untouched by the plan (available anywhere, receivers or not)."""
    white = plan.total_band_mhz - gray_space_capacity(plan)
    if white < 0:
        raise ConfigError(
            f"channel plan occupies {gray_space_capacity(plan)} MHz, more than "
            f"the {plan.total_band_mhz} MHz band"
        )
    return white


@dataclass(frozen=True)
class KnowledgeConfig:
    """What is known about household usage, and the sampling parameters."""

    level: str
    p_mux1_capable: float = 0.98
    p_subscribe_mux2to5: float = 0.15
    time_period: str | None = None
    mux_shares: tuple[float, ...] | None = None
    share_interpretation: str = "unconditional"

    def __post_init__(self) -> None:
        if self.level not in KNOWLEDGE_LEVELS:
            raise ConfigError(
                f"level must be one of {KNOWLEDGE_LEVELS}, got {self.level!r}"
            )
        for name in ("p_mux1_capable", "p_subscribe_mux2to5"):
            p = getattr(self, name)
            if not (math.isfinite(p) and 0.0 <= p <= 1.0):
                raise ConfigError(f"{name} must be a probability, got {p!r}")
        if self.share_interpretation not in SHARE_INTERPRETATIONS:
            raise ConfigError(
                "share_interpretation must be one of "
                f"{SHARE_INTERPRETATIONS}, got {self.share_interpretation!r}"
            )
        if self.level == "KL3":
            if self.time_period is None and self.mux_shares is None:
                raise ConfigError("KL3 requires a time_period (or explicit mux_shares)")
            if self.time_period is not None and self.time_period not in TIME_PERIODS:
                raise ConfigError(
                    f"time_period must be one of {TIME_PERIODS}, got {self.time_period!r}"
                )
            shares = self.effective_shares
            if len(shares) != 5:
                raise ConfigError("mux_shares must list exactly 5 values")
            if any(not (math.isfinite(s) and 0.0 <= s <= 1.0) for s in shares):
                raise ConfigError(f"mux_shares must be probabilities, got {shares}")
            if sum(shares) > 1.0 + 1e-12:
                raise ConfigError(f"mux_shares sum to {sum(shares)} > 1")
        elif self.time_period is not None or self.mux_shares is not None:
            raise ConfigError("time_period/mux_shares only apply to KL3")

    @property
    def effective_shares(self) -> tuple[float, ...]:
        if self.mux_shares is not None:
            return tuple(float(s) for s in self.mux_shares)
        assert self.time_period is not None
        return MUX_SHARES[self.time_period]


def _check_stream_key(master_seed: int, realization_index: int) -> None:
    if not (0 <= int(master_seed) < 2**64):
        raise DomainError("master_seed must fit in an unsigned 64-bit value")
    if realization_index < 0:
        raise DomainError("realization_index must be non-negative")


def household_variates(master_seed: int, realization_index: int, n: int) -> np.ndarray:
    """The (n, 3) uniform variates for one realization, in household order.

    Column meaning is :data:`VARIATE_COLUMNS`.  Keyed Philox streams make
    the result a pure function of (master_seed, realization_index), whatever
    process or worker asks for it.
    """
    _check_stream_key(master_seed, realization_index)
    if n < 0:
        raise DomainError("n must be non-negative")
    key = np.array([master_seed, realization_index], dtype=np.uint64)
    gen = np.random.Generator(np.random.Philox(key=key))
    return gen.random((n, 3))


def usage_from_variates(config: KnowledgeConfig, u: np.ndarray) -> np.ndarray:
    """Per-household MUX usage (n, 5 booleans) implied by variates ``u``.

    KL1 ignores the variates entirely (usage is assumed).  KL2/KL3 gate
    everything on coverage: an uncovered household uses nothing.  Under
    KL3 the viewing variate picks at most one MUX via the share intervals
    laid out consecutively from 0, so conditional-interpretation usage is
    a per-household subset of unconditional usage for the same draw.
    """
    u = np.asarray(u, dtype=np.float64)
    if u.ndim != 2 or u.shape[1] != 3:
        raise DomainError("u must have shape (n, 3)")
    n = u.shape[0]
    usage = np.zeros((n, 5), dtype=bool)
    if config.level == "KL1":
        usage[:] = True
        return usage
    covered = u[:, 0] < config.p_mux1_capable
    if config.level == "KL2":
        subscribed = u[:, 1] < config.p_subscribe_mux2to5
        usage[:, 0] = covered
        usage[:, 1:] = (covered & subscribed)[:, None]
        return usage
    # KL3: one categorical draw over (MUX1..MUX5, idle)
    edges = np.cumsum(config.effective_shares)
    category = np.searchsorted(edges, u[:, 2], side="right")
    watching = covered & (category < 5)
    if config.share_interpretation == "conditional_on_subscription":
        subscribed = u[:, 1] < config.p_subscribe_mux2to5
        watching &= subscribed | (category == 0)
    rows = np.nonzero(watching)[0]
    usage[rows, category[rows]] = True
    return usage


def sample_household(
    config: KnowledgeConfig, u_cov: float, u_sub: float, u_watch: float
) -> frozenset[int]:
    """MUX numbers (1-5) one household uses, given its variate triple."""
    u = np.array([[u_cov, u_sub, u_watch]], dtype=np.float64)
    row = usage_from_variates(config, u)[0]
    return frozenset(int(m) + 1 for m in np.nonzero(row)[0])


@dataclass(frozen=True)
class ReceiverRealization:
    """Per-cell usage flags for one Monte Carlo realization.

    ``flags[m]`` is a rows x cols boolean raster: True where at least one
    household in the cell uses MUX m+1.
    """

    flags: np.ndarray
    realization_index: int
    master_seed: int

    def __post_init__(self) -> None:
        flags = np.asarray(self.flags, dtype=bool)
        if flags.ndim != 3 or flags.shape[0] != 5:
            raise DomainError("flags must have shape (5, rows, cols)")
        flags.setflags(write=False)
        object.__setattr__(self, "flags", flags)


def realize_cells(
    grid: HouseholdGrid,
    config: KnowledgeConfig,
    master_seed: int,
    realization_index: int,
) -> ReceiverRealization:
    """Sample one realization of per-cell MUX usage for the whole grid.

    Households are enumerated in row-major cell order (cells with zero
    households draw nothing), each consuming one variate triple; a cell's
    flag for a MUX is the OR over its households.  KL1 consumes no
    randomness at all — its flags are simply ``counts > 0``.
    """
    _check_stream_key(master_seed, realization_index)
    rows, cols = grid.counts.shape
    flags = np.zeros((5, rows, cols), dtype=bool)
    if config.level == "KL1":
        flags[:] = grid.counts > 0
        return ReceiverRealization(flags, realization_index, master_seed)

    ys, xs = np.nonzero(grid.counts)
    k = grid.counts[ys, xs]
    total = int(k.sum())
    u = household_variates(master_seed, realization_index, total)
    usage = usage_from_variates(config, u)
    household_cell = np.repeat(np.arange(len(k)), k)
    for m in range(5):
        cell_any = np.bincount(
            household_cell, weights=usage[:, m], minlength=len(k)
        ) > 0
        flags[m, ys, xs] = cell_any
    return ReceiverRealization(flags, realization_index, master_seed)
