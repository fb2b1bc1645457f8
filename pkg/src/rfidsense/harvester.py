"""Rectifier front end and charge-pump duty cycling for a battery-free tag.

The storage path alternates between accumulating harvested charge and
releasing it to the logic supply:

    idle       rectifier output below the pump start voltage
    charging   pump inflow accumulates on the storage capacitor
    supplying  the capacitor drains into the regulator until the low cutoff

``step`` advances the machine by one fixed timestep, so threshold
crossings are resolved at step boundaries. All functions are pure:
given the same state and drive they return the same result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

from .linkbudget import Frequency, PowerLevel, mw_from_dbm


class Phase(Enum):
    IDLE = "idle"
    CHARGING = "charging"
    SUPPLYING = "supplying"


class Mode(Enum):
    BOOSTED = "boosted"
    BYPASS = "bypass"


class RectifierOutput(NamedTuple):
    """DC side of the voltage multiplier: open-circuit volts and watts."""

    v_dc: float
    p_dc: float


@dataclass(frozen=True)
class RectifierModel:
    """Multi-stage voltage multiplier with a tuned matching network.

    The open-circuit output voltage grows with the square root of the
    input power and linearly with stage count. Off-tune carriers see an
    attenuation, in dB, quadratic in the offset from ``center_freq``.
    The curve is anchored by one calibration point: a ``cal_stages``
    stack delivers ``cal_voltage_v`` open circuit at ``cal_input_dbm``
    on the center frequency. ``bypass_cal_dbm`` is the input power at
    which a pump-less front end first sustains the logic with no load
    attached; the corresponding voltage is ``bypass_threshold_v``.
    """

    stages: int = 5
    cal_stages: int = 5
    center_freq: Frequency = Frequency(866.5e6)
    cal_input_dbm: float = -14.0
    cal_voltage_v: float = 0.35
    bypass_cal_dbm: float = -9.0
    detuning_rolloff_db_per_mhz2: float = 0.008
    eff_max: float = 0.20
    eff_midpoint_dbm: float = -10.0
    eff_scale_db: float = 5.0

    def __post_init__(self) -> None:
        if self.stages < 1 or self.cal_stages < 1:
            raise ValueError("stage counts must be at least 1")
        if self.cal_voltage_v <= 0:
            raise ValueError("calibration voltage must be positive")
        if self.detuning_rolloff_db_per_mhz2 < 0:
            raise ValueError("detuning rolloff must be non-negative")
        if not 0.0 < self.eff_max <= 1.0:
            raise ValueError(f"eff_max must be in (0, 1], got {self.eff_max}")
        if self.eff_scale_db <= 0:
            raise ValueError("eff_scale_db must be positive")

    def detuning_loss_db(self, freq: Frequency) -> float:
        offset_mhz = (freq.hertz - self.center_freq.hertz) / 1e6
        return self.detuning_rolloff_db_per_mhz2 * offset_mhz * offset_mhz

    def open_circuit_voltage(self, p_in: PowerLevel, freq: Frequency) -> float:
        p_eff_dbm = p_in.dbm - self.detuning_loss_db(freq)
        watts = mw_from_dbm(p_eff_dbm) / 1e3
        per_stage = self.cal_voltage_v / (
            self.cal_stages * math.sqrt(mw_from_dbm(self.cal_input_dbm) / 1e3)
        )
        return per_stage * self.stages * math.sqrt(watts)

    def conversion_efficiency(self, p_eff_dbm: float) -> float:
        """RF-to-DC power fraction, rising with drive level toward eff_max."""
        x = (p_eff_dbm - self.eff_midpoint_dbm) / self.eff_scale_db
        return self.eff_max / (1.0 + math.exp(-x))

    @property
    def bypass_threshold_v(self) -> float:
        """Open-circuit voltage at the no-load bypass turn-on point."""
        return self.open_circuit_voltage(
            PowerLevel(self.bypass_cal_dbm), self.center_freq
        )


def rectified_dc(
    p_in: PowerLevel, freq: Frequency, model: RectifierModel
) -> RectifierOutput:
    """DC operating point of the rectifier for a given RF input."""
    p_eff_dbm = p_in.dbm - model.detuning_loss_db(freq)
    watts = mw_from_dbm(p_eff_dbm) / 1e3
    v_dc = model.open_circuit_voltage(p_in, freq)
    p_dc = model.conversion_efficiency(p_eff_dbm) * watts
    return RectifierOutput(v_dc, p_dc)


@dataclass(frozen=True)
class ChargePumpParams:
    """Start, release and cutoff voltages of the step-up charge pump."""

    v_start: float = 0.35
    v_high: float = 2.4
    v_low: float = 1.85
    pump_efficiency: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 < self.v_start < self.v_low < self.v_high:
            raise ValueError(
                "thresholds must satisfy 0 < v_start < v_low < v_high, got "
                f"{self.v_start}, {self.v_low}, {self.v_high}"
            )
        if not 0.0 < self.pump_efficiency <= 1.0:
            raise ValueError(
                f"pump_efficiency must be in (0, 1], got {self.pump_efficiency}"
            )


@dataclass(frozen=True)
class StorageCapacitor:
    capacitance_f: float = 10e-6
    voltage_v: float = 0.0

    def __post_init__(self) -> None:
        if self.capacitance_f <= 0:
            raise ValueError("capacitance must be positive")
        if self.voltage_v < 0:
            raise ValueError("capacitor voltage cannot be negative")

    @property
    def energy_j(self) -> float:
        return 0.5 * self.capacitance_f * self.voltage_v * self.voltage_v

    def with_energy(self, energy_j: float) -> "StorageCapacitor":
        if energy_j < 0:
            energy_j = 0.0
        return StorageCapacitor(
            self.capacitance_f, math.sqrt(2.0 * energy_j / self.capacitance_f)
        )


@dataclass(frozen=True)
class HarvesterState:
    """Snapshot of the storage path between two simulation steps."""

    phase: Phase
    cap: StorageCapacitor
    mode: Mode
    params: ChargePumpParams
    bypass_threshold_v: float

    @classmethod
    def initial(
        cls,
        mode: Mode,
        params: ChargePumpParams,
        capacitance_f: float,
        bypass_threshold_v: float,
    ) -> "HarvesterState":
        return cls(
            phase=Phase.IDLE,
            cap=StorageCapacitor(capacitance_f, 0.0),
            mode=mode,
            params=params,
            bypass_threshold_v=bypass_threshold_v,
        )


def energy_window(params: ChargePumpParams, cap: StorageCapacitor) -> float:
    """Energy released per discharge burst, from v_high down to v_low."""
    return 0.5 * cap.capacitance_f * (params.v_high**2 - params.v_low**2)


def charge_time(
    p_dc_w: float, params: ChargePumpParams, cap: StorageCapacitor
) -> float:
    """Seconds to refill one discharge window from rectifier power ``p_dc_w``.

    The pump wastes ``1 - pump_efficiency`` of the DC input; a
    non-positive input never charges and yields ``inf``.
    """
    if p_dc_w <= 0:
        return math.inf
    return energy_window(params, cap) / (params.pump_efficiency * p_dc_w)


def bypass_operational(v_dc: float, threshold_v: float) -> bool:
    """Whether a pump-less front end can hold up the logic supply."""
    return v_dc >= threshold_v


def step(
    state: HarvesterState,
    drive: RectifierOutput,
    load_w: float,
    dt_s: float,
) -> tuple[HarvesterState, float]:
    """Advance the storage path by one timestep.

    Returns the successor state and the energy in joules handed to the
    load during the step. In bypass mode there are no storage dynamics:
    the load is served in full whenever the rectifier voltage clears the
    bypass threshold. In boosted mode the phase machine runs:

    * idle <-> charging strictly on the rectifier voltage against
      ``v_start`` (stored charge is retained while idle),
    * charging -> supplying once the capacitor reaches ``v_high``,
    * supplying -> charging once it falls to ``v_low``.

    While supplying, the capacitor loses ``load_w * dt_s`` net of any
    concurrent pump inflow, and delivery is capped at the energy
    actually on the capacitor so the voltage never goes negative.
    """
    if dt_s <= 0:
        raise ValueError("dt must be positive")
    if load_w < 0 or drive.p_dc < 0:
        raise ValueError("load and rectified power must be non-negative")

    params = state.params
    if state.mode is Mode.BYPASS:
        if bypass_operational(drive.v_dc, state.bypass_threshold_v):
            return state, load_w * dt_s
        return state, 0.0

    phase = state.phase
    pump_on = drive.v_dc >= params.v_start
    if phase is Phase.IDLE and pump_on:
        phase = Phase.CHARGING
    elif phase is Phase.CHARGING and not pump_on:
        phase = Phase.IDLE

    if phase is Phase.IDLE:
        if phase is state.phase:
            return state, 0.0
        return HarvesterState(phase, state.cap, state.mode, params,
                              state.bypass_threshold_v), 0.0

    inflow_j = params.pump_efficiency * drive.p_dc * dt_s
    energy = state.cap.energy_j

    if phase is Phase.CHARGING:
        energy += inflow_j
        cap = state.cap.with_energy(energy)
        if cap.voltage_v >= params.v_high:
            phase = Phase.SUPPLYING
        return HarvesterState(phase, cap, state.mode, params,
                              state.bypass_threshold_v), 0.0

    # supplying: serve the load from the cap plus concurrent inflow
    available = energy + inflow_j
    delivered = min(load_w * dt_s, available)
    cap = state.cap.with_energy(available - delivered)
    if cap.voltage_v <= params.v_low:
        phase = Phase.CHARGING
    return HarvesterState(phase, cap, state.mode, params,
                          state.bypass_threshold_v), delivered
