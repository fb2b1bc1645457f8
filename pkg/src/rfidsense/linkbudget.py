"""Free-space link budget arithmetic for UHF RFID power transfer.

Power bookkeeping happens in the dB domain and converts to linear units
only at the edges, so chained gains and losses stay exact under
inversion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

SPEED_OF_LIGHT_M_S = 299_792_458.0


class NoRangeError(ValueError):
    """The link cannot close at any physical separation."""


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class PowerLevel:
    """RF power referenced to 1 mW."""

    dbm: float

    def __post_init__(self) -> None:
        _require_finite("power", self.dbm)

    @property
    def milliwatts(self) -> float:
        return mw_from_dbm(self.dbm)

    @property
    def watts(self) -> float:
        return mw_from_dbm(self.dbm) / 1e3


@dataclass(frozen=True)
class Eirp:
    """Radiated power of the transmitter with its antenna gain folded in.

    Because the transmit gain is already part of the figure, no separate
    reader antenna term appears anywhere in the budget.
    """

    dbm: float

    def __post_init__(self) -> None:
        _require_finite("EIRP", self.dbm)

    @property
    def watts(self) -> float:
        return mw_from_dbm(self.dbm) / 1e3


@dataclass(frozen=True)
class AntennaGain:
    """Antenna gain relative to an isotropic radiator."""

    dbi: float

    def __post_init__(self) -> None:
        _require_finite("antenna gain", self.dbi)


@dataclass(frozen=True)
class Frequency:
    """Carrier frequency in hertz."""

    hertz: float

    def __post_init__(self) -> None:
        _require_finite("frequency", self.hertz)
        if self.hertz <= 0:
            raise ValueError(f"frequency must be positive, got {self.hertz}")

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT_M_S / self.hertz

    @property
    def mhz(self) -> float:
        return self.hertz / 1e6


@dataclass(frozen=True)
class Distance:
    """Separation in meters, strictly positive."""

    meters: float

    def __post_init__(self) -> None:
        _require_finite("distance", self.meters)
        if self.meters <= 0:
            raise ValueError(f"distance must be positive, got {self.meters}")


@dataclass(frozen=True)
class LinkGeometry:
    """Reader-to-tag separation and polarization alignment.

    ``plf`` is the polarization loss factor as a linear power fraction.
    A circularly polarized reader facing a linear tag antenna gives 0.5.
    """

    distance_m: float
    plf: float = 1.0

    def __post_init__(self) -> None:
        _require_finite("distance", self.distance_m)
        _require_finite("plf", self.plf)
        if self.distance_m <= 0:
            raise ValueError(f"distance must be positive, got {self.distance_m}")
        if not 0.0 < self.plf <= 1.0:
            raise ValueError(f"plf must be in (0, 1], got {self.plf}")

    @property
    def distance(self) -> Distance:
        return Distance(self.distance_m)


def mw_from_dbm(dbm: float) -> float:
    """Convert dBm to milliwatts."""
    return 10.0 ** (dbm / 10.0)


def dbm_from_mw(mw: float) -> float:
    """Convert milliwatts to dBm. Rejects non-positive power."""
    if mw <= 0:
        raise ValueError(f"power must be positive to express in dBm, got {mw}")
    return 10.0 * math.log10(mw)


def friis_factor(freq: Frequency, distance: Distance) -> float:
    """Free-space power transfer ratio (wavelength / 4 pi d) squared."""
    return (freq.wavelength_m / (4.0 * math.pi * distance.meters)) ** 2


def received_power(
    eirp: Eirp,
    tag_gain: AntennaGain,
    freq: Frequency,
    geometry: LinkGeometry,
) -> PowerLevel:
    """Power available at the tag antenna port for a free-space link."""
    spreading_db = 10.0 * math.log10(friis_factor(freq, geometry.distance))
    plf_db = 10.0 * math.log10(geometry.plf)
    return PowerLevel(eirp.dbm + tag_gain.dbi + spreading_db + plf_db)


def sensitivity_from_turn_on(
    eirp_on: Eirp,
    tag_gain: AntennaGain,
    freq: Frequency,
    geometry: LinkGeometry,
) -> PowerLevel:
    """Tag sensitivity inferred from the lowest EIRP that wakes it.

    The estimate is the power delivered to the tag at that EIRP, so it
    assumes the same free-space conditions the turn-on measurement used.
    """
    return received_power(eirp_on, tag_gain, freq, geometry)


def max_range(
    eirp: Eirp,
    sensitivity: PowerLevel,
    tag_gain: AntennaGain,
    freq: Frequency,
    plf: float,
) -> Distance:
    """Largest separation at which the tag still receives ``sensitivity``.

    Solves the free-space budget for distance in closed form. Raises
    :class:`NoRangeError` when the margin is non-positive, meaning the
    tag would not wake even inside the unity-spreading radius.
    """
    if not 0.0 < plf <= 1.0:
        raise ValueError(f"plf must be in (0, 1], got {plf}")
    margin_db = eirp.dbm + tag_gain.dbi + 10.0 * math.log10(plf) - sensitivity.dbm
    if margin_db <= 0.0:
        raise NoRangeError(
            f"link margin {margin_db:.2f} dB is non-positive, no operating range"
        )
    meters = freq.wavelength_m / (4.0 * math.pi) * 10.0 ** (margin_db / 20.0)
    return Distance(meters)
