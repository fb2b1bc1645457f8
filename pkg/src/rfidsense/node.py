"""Analog temperature sensing, ADC quantization and the MCU task cycle."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .epc import Epc96, encode_epc


@dataclass(frozen=True)
class TemperatureSensor:
    """Linear analog sensor: v = v0 + slope * T, plus error terms.

    ``accuracy_bias_c`` shifts every reading by a constant offset and
    ``noise_sigma_c`` adds zero-mean Gaussian jitter, both in degrees C
    on the analog side before quantization.
    """

    v0_v: float = 1.300
    slope_v_per_c: float = -0.0055
    accuracy_bias_c: float = 0.0
    noise_sigma_c: float = 0.0

    def __post_init__(self) -> None:
        if self.slope_v_per_c == 0:
            raise ValueError("sensor slope cannot be zero")
        if self.noise_sigma_c < 0:
            raise ValueError("noise sigma cannot be negative")

    def output_volts(self, t_c: float) -> float:
        return self.v0_v + self.slope_v_per_c * t_c


@dataclass(frozen=True)
class Adc:
    bits: int = 10
    vref_v: float = 1.5

    def __post_init__(self) -> None:
        if self.bits < 1:
            raise ValueError("ADC needs at least one bit")
        if self.vref_v <= 0:
            raise ValueError("ADC reference must be positive")

    @property
    def full_scale(self) -> int:
        return (1 << self.bits) - 1


class AdcSample(NamedTuple):
    code: int
    clamped: bool


def sense(
    sensor: TemperatureSensor,
    adc: Adc,
    t_ambient_c: float,
    rng: Optional[random.Random] = None,
) -> AdcSample:
    """Quantize one temperature reading.

    Codes are rounded half up and clamped to the converter rails; the
    ``clamped`` flag reports when the analog value was out of range.
    Noise is drawn from ``rng`` only when the sensor has a non-zero
    sigma, so the default configuration is fully deterministic.
    """
    t_seen = t_ambient_c + sensor.accuracy_bias_c
    if sensor.noise_sigma_c > 0:
        if rng is None:
            raise ValueError("noisy sensor needs an rng for reproducibility")
        t_seen += rng.gauss(0.0, sensor.noise_sigma_c)
    volts = sensor.output_volts(t_seen)
    code = math.floor(volts / adc.vref_v * adc.full_scale + 0.5)
    if code < 0:
        return AdcSample(0, True)
    if code > adc.full_scale:
        return AdcSample(adc.full_scale, True)
    return AdcSample(code, False)


def decode_temperature(code: int, sensor: TemperatureSensor, adc: Adc) -> float:
    """Invert the sensor transfer for a raw ADC code."""
    if not 0 <= code <= adc.full_scale:
        raise ValueError(f"code {code} outside 0..{adc.full_scale}")
    volts = code / adc.full_scale * adc.vref_v
    return (volts - sensor.v0_v) / sensor.slope_v_per_c


def quantization_step_c(sensor: TemperatureSensor, adc: Adc) -> float:
    """Temperature change per ADC code, in degrees C."""
    return (adc.vref_v / adc.full_scale) / abs(sensor.slope_v_per_c)


@dataclass(frozen=True)
class TaskProfile:
    """Energy cost of one sample-and-store firmware pass."""

    sample_energy_j: float = 3e-6
    i2c_write_energy_j: float = 5e-6
    task_duration_s: float = 0.010

    def __post_init__(self) -> None:
        if self.sample_energy_j <= 0 or self.i2c_write_energy_j <= 0:
            raise ValueError("task energies must be positive")
        if self.task_duration_s <= 0:
            raise ValueError("task duration must be positive")

    @property
    def total_energy_j(self) -> float:
        return self.sample_energy_j + self.i2c_write_energy_j


@dataclass(frozen=True)
class NodeConfig:
    sensor: TemperatureSensor = TemperatureSensor()
    adc: Adc = Adc()
    profile: TaskProfile = TaskProfile()
    node_id: int = 1

    def __post_init__(self) -> None:
        if not 0 <= self.node_id <= 0xFF:
            raise ValueError(f"node_id must fit one byte, got {self.node_id}")


class TaskOutcome(NamedTuple):
    code: Optional[int]
    clamped: bool
    epc: Optional[Epc96]
    epc_written: bool
    energy_used_j: float
    timestamp_s: float


def execute_task_cycle(
    node: NodeConfig,
    available_j: float,
    t_ambient_c: float,
    now_s: float,
    seq: int,
    rng: Optional[random.Random] = None,
) -> TaskOutcome:
    """Run one firmware pass if the energy budget allows it.

    A pass samples the sensor and assembles the identifier payload that
    the caller will commit to tag memory. When ``available_j`` does not
    cover the profile no energy is spent and nothing is written.
    """
    profile = node.profile
    if available_j < profile.total_energy_j:
        return TaskOutcome(None, False, None, False, 0.0, now_s)
    sample = sense(node.sensor, node.adc, t_ambient_c, rng)
    epc = encode_epc(node.node_id, seq, sample.code)
    return TaskOutcome(
        sample.code, sample.clamped, epc, True, profile.total_energy_j, now_s
    )
