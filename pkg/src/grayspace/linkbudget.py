"""Link budget between a low-power transmitter and protected TV receivers.

Converts device EIRP to a field strength at a reference distance, applies a
regulator's carrier-to-interference requirements to obtain the minimum path
loss the environment must provide, and inverts the propagation model to turn
that loss into a minimum separation distance (raw and quantized to the grid
resolution in use).

Regulator parameter sets ship as frozen presets (``OFCOM``, ``FCC``); custom
criteria can be constructed directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ConfigError, DomainError
from .propagation import HataParams, distance_for_loss, path_loss

RELATIONS = ("co", "adjacent")


@dataclass(frozen=True)
class ProtectionCriteria:
    """Regulator protection parameters for TV receivers.

    ``ci_adjacent_db`` is the effective (stricter) adjacent-channel C/I used
    by the solver; regulators quoting distinct upper/lower adjacent values
    keep the second one in ``ci_adjacent_lower_db`` for reference.  The
    ``power_limit_*`` fields are informational text carried along from the
    regulator tables; they do not enter any computation.
    """

    label: str
    min_field_strength_dbuvm: float
    ci_cochannel_db: float
    ci_adjacent_db: float
    channel_bandwidth_mhz: float
    location_accuracy_m: float
    receiver_height_m: float = 10.0
    ci_adjacent_lower_db: float | None = None
    power_limit_cochannel: str = ""
    power_limit_adjacent: str = ""

    def __post_init__(self) -> None:
        if self.channel_bandwidth_mhz <= 0:
            raise DomainError("channel_bandwidth_mhz must be positive")
        if self.location_accuracy_m <= 0:
            raise DomainError("location_accuracy_m must be positive")
        if not self.ci_cochannel_db > self.ci_adjacent_db:
            raise DomainError(
                "co-channel C/I must exceed adjacent-channel C/I "
                f"({self.ci_cochannel_db} <= {self.ci_adjacent_db})"
            )

    def ci_db(self, relation: str) -> float:
        if relation == "co":
            return self.ci_cochannel_db
        if relation == "adjacent":
            return self.ci_adjacent_db
        raise DomainError(f"relation must be one of {RELATIONS}, got {relation!r}")


@dataclass(frozen=True)
class DeviceProfile:
    """A transmitter candidate: its EIRP and antenna height."""

    label: str
    eirp_mw: float
    antenna_height_m: float

    def __post_init__(self) -> None:
        if not self.label:
            raise DomainError("device label must not be empty")
        if not (math.isfinite(self.eirp_mw) and self.eirp_mw > 0):
            raise DomainError("eirp_mw must be positive and finite")
        if not (math.isfinite(self.antenna_height_m) and self.antenna_height_m > 0):
            raise DomainError("antenna_height_m must be positive and finite")


OFCOM = ProtectionCriteria(
    label="ofcom",
    min_field_strength_dbuvm=50.0,
    ci_cochannel_db=33.0,
    ci_adjacent_db=-17.0,
    channel_bandwidth_mhz=8.0,
    location_accuracy_m=100.0,
    receiver_height_m=10.0,
    power_limit_cochannel="as specified by the database",
    power_limit_adjacent="50 mW",
)

FCC = ProtectionCriteria(
    label="fcc",
    min_field_strength_dbuvm=41.0,
    ci_cochannel_db=23.0,
    ci_adjacent_db=-26.0,
    ci_adjacent_lower_db=-28.0,
    channel_bandwidth_mhz=6.0,
    location_accuracy_m=50.0,
    receiver_height_m=10.0,
    power_limit_cochannel="fixed device: 4 W",
    power_limit_adjacent="portable device: 40/100 mW",
)

REGULATOR_PRESETS = {"ofcom": OFCOM, "fcc": FCC}

#: Devices used throughout the shipped examples: a fixed base-station-class
#: radio and a hand-held one.
FIXED_4W = DeviceProfile(label="fixed-4w", eirp_mw=4000.0, antenna_height_m=30.0)
PORTABLE_100MW = DeviceProfile(label="portable-100mw", eirp_mw=100.0, antenna_height_m=2.0)


def eirp_to_field_strength(eirp_mw: float, distance_m: float = 1.0) -> float:
    """Field strength in dBuV/m radiated by ``eirp_mw`` at ``distance_m``.

    E = 10 log10(EIRP[mW]) - 20 log10(d[m]) + 104.8
    """
    if not (math.isfinite(eirp_mw) and eirp_mw > 0):
        raise DomainError("eirp_mw must be positive and finite")
    if not (math.isfinite(distance_m) and distance_m > 0):
        raise DomainError("distance_m must be positive and finite")
    return 10.0 * math.log10(eirp_mw) - 20.0 * math.log10(distance_m) + 104.8


def max_cr_field_at_receiver(criteria: ProtectionCriteria, relation: str) -> float:
    """Highest interfering field strength (dBuV/m) tolerable at a receiver.

    The TV signal is assumed at the regulator's minimum service level, so
    the allowance is that level minus the required C/I.
    """
    return criteria.min_field_strength_dbuvm - criteria.ci_db(relation)


def min_required_loss(
    device: DeviceProfile, criteria: ProtectionCriteria, relation: str
) -> float:
    """Path loss (dB) the environment must provide between device and receiver."""
    return eirp_to_field_strength(device.eirp_mw) - max_cr_field_at_receiver(
        criteria, relation
    )


def quantize_distance(distance_m: float, resolution_m: float) -> float:
    """Round ``distance_m`` up to the next multiple of ``resolution_m``.

    Positions are only known to one grid cell, so protection distances are
    always rounded *up*.  Returns 0 only for a distance of exactly 0.
    """
    if not (math.isfinite(resolution_m) and resolution_m > 0):
        raise DomainError("resolution_m must be positive and finite")
    if not math.isfinite(distance_m) or distance_m < 0:
        raise DomainError("distance_m must be non-negative and finite")
    cells = math.ceil(distance_m / resolution_m)
    if cells == 0 and distance_m > 0:  # subnormal distance underflowed
        cells = 1
    return cells * resolution_m


@dataclass(frozen=True)
class SeparationReport:
    """Minimum separation distances for one device under one regulator."""

    device: DeviceProfile
    criteria: ProtectionCriteria
    hata: HataParams
    field_strength_dbuvm: float
    min_loss_co_db: float
    min_loss_adjacent_db: float
    min_distance_co_m: float
    min_distance_adjacent_m: float
    warnings: tuple[str, ...] = field(default=())

    def min_distance_m(self, relation: str) -> float:
        if relation == "co":
            return self.min_distance_co_m
        if relation == "adjacent":
            return self.min_distance_adjacent_m
        raise DomainError(f"relation must be one of {RELATIONS}, got {relation!r}")


def separation_report(
    device: DeviceProfile, criteria: ProtectionCriteria, hata: HataParams
) -> SeparationReport:
    """Full link-budget evaluation for one device/regulator pair.

    The propagation parameters describe the device-to-receiver link, so the
    model's base height must equal the device antenna height; a mismatch is
    a configuration error, not a warning.
    """
    if hata.base_height_m != device.antenna_height_m:
        raise ConfigError(
            "propagation base_height_m must equal the device antenna height "
            f"({hata.base_height_m} != {device.antenna_height_m})"
        )
    warnings: list[str] = []
    if not hata.nominal_range():
        warnings.append(
            "propagation parameters outside the model's nominal range "
            f"(f={hata.carrier_frequency_mhz} MHz, h_b={hata.base_height_m} m, "
            f"h_m={hata.mobile_height_m} m)"
        )
    loss_co = min_required_loss(device, criteria, "co")
    loss_adj = min_required_loss(device, criteria, "adjacent")
    return SeparationReport(
        device=device,
        criteria=criteria,
        hata=hata,
        field_strength_dbuvm=eirp_to_field_strength(device.eirp_mw),
        min_loss_co_db=loss_co,
        min_loss_adjacent_db=loss_adj,
        min_distance_co_m=distance_for_loss(hata, loss_co) * 1000.0,
        min_distance_adjacent_m=distance_for_loss(hata, loss_adj) * 1000.0,
        warnings=tuple(warnings),
    )


def verify_margin(
    device: DeviceProfile,
    criteria: ProtectionCriteria,
    hata: HataParams,
    distance_km: float,
    relation: str,
) -> float:
    """Interference margin (dB) at a given separation distance.

    The achieved C/I is the TV signal level minus the device field strength
    attenuated by the path loss at ``distance_km``; the margin is how far
    that sits above the regulator requirement.  Positive means protected.
    """
    achieved = (
        criteria.min_field_strength_dbuvm
        - eirp_to_field_strength(device.eirp_mw)
        + path_loss(hata, distance_km)
    )
    return achieved - criteria.ci_db(relation)
