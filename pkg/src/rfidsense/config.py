"""Scenario configuration documents.

One YAML document, schema ``rfidsense/1``, one section per subsystem.
Every key is optional and takes the built-in default when omitted, so
the empty document is a valid scenario. Unknown sections or keys are
rejected rather than ignored, and environment variables are never
consulted. Keys use bench units: dBm, MHz, microfarads, microjoules,
volts, seconds.

    schema: rfidsense/1
    reader:       eirp_dbm, frequency_mhz, query_period_s, read_duration_s
    geometry:     distance_m, plf
    environment:  excess_path_loss_db, ambient_c
    rectifier:    stages, cal_stages, center_freq_mhz, cal_input_dbm,
                  cal_voltage_v, bypass_cal_dbm, detuning_rolloff_db_per_mhz2,
                  eff_max, eff_midpoint_dbm, eff_scale_db
    charge_pump:  v_start, v_high, v_low, pump_efficiency
    capacitor:    capacitance_uf
    sensor:       v0_v, slope_v_per_c, accuracy_bias_c, noise_sigma_c
    adc:          bits, vref_v
    task:         sample_energy_uj, i2c_write_energy_uj, task_duration_s
    node:         node_id, antenna_gain_dbi, bypass_load_penalty_db
    simulation:   mode, duration_s, dt_s, seed, regulatory_check
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

import yaml

from .gen2sim import ReaderConfig, Scenario
from .harvester import ChargePumpParams, Mode, RectifierModel
from .linkbudget import AntennaGain, Eirp, Frequency, LinkGeometry
from .node import Adc, NodeConfig, TaskProfile, TemperatureSensor

SCHEMA_ID = "rfidsense/1"

_FLOAT = "number"
_INT = "integer"
_BOOL = "boolean"
_STR = "string"

_SCHEMA: dict[str, dict[str, str]] = {
    "reader": {
        "eirp_dbm": _FLOAT,
        "frequency_mhz": _FLOAT,
        "query_period_s": _FLOAT,
        "read_duration_s": _FLOAT,
    },
    "geometry": {"distance_m": _FLOAT, "plf": _FLOAT},
    "environment": {"excess_path_loss_db": _FLOAT, "ambient_c": _FLOAT},
    "rectifier": {
        "stages": _INT,
        "cal_stages": _INT,
        "center_freq_mhz": _FLOAT,
        "cal_input_dbm": _FLOAT,
        "cal_voltage_v": _FLOAT,
        "bypass_cal_dbm": _FLOAT,
        "detuning_rolloff_db_per_mhz2": _FLOAT,
        "eff_max": _FLOAT,
        "eff_midpoint_dbm": _FLOAT,
        "eff_scale_db": _FLOAT,
    },
    "charge_pump": {
        "v_start": _FLOAT,
        "v_high": _FLOAT,
        "v_low": _FLOAT,
        "pump_efficiency": _FLOAT,
    },
    "capacitor": {"capacitance_uf": _FLOAT},
    "sensor": {
        "v0_v": _FLOAT,
        "slope_v_per_c": _FLOAT,
        "accuracy_bias_c": _FLOAT,
        "noise_sigma_c": _FLOAT,
    },
    "adc": {"bits": _INT, "vref_v": _FLOAT},
    "task": {
        "sample_energy_uj": _FLOAT,
        "i2c_write_energy_uj": _FLOAT,
        "task_duration_s": _FLOAT,
    },
    "node": {
        "node_id": _INT,
        "antenna_gain_dbi": _FLOAT,
        "bypass_load_penalty_db": _FLOAT,
    },
    "simulation": {
        "mode": _STR,
        "duration_s": _FLOAT,
        "dt_s": _FLOAT,
        "seed": _INT,
        "regulatory_check": _BOOL,
    },
}


class ConfigError(ValueError):
    """The document does not match the schema."""


def doc_from_scenario(s: Scenario) -> dict[str, Any]:
    """Express a scenario as a plain configuration mapping."""
    return {
        "schema": SCHEMA_ID,
        "reader": {
            "eirp_dbm": s.reader.eirp.dbm,
            "frequency_mhz": s.reader.frequency.hertz / 1e6,
            "query_period_s": s.reader.query_period_s,
            "read_duration_s": s.reader.read_duration_s,
        },
        "geometry": {
            "distance_m": s.geometry.distance_m,
            "plf": s.geometry.plf,
        },
        "environment": {
            "excess_path_loss_db": s.excess_path_loss_db,
            "ambient_c": s.ambient_c,
        },
        "rectifier": {
            "stages": s.rectifier.stages,
            "cal_stages": s.rectifier.cal_stages,
            "center_freq_mhz": s.rectifier.center_freq.hertz / 1e6,
            "cal_input_dbm": s.rectifier.cal_input_dbm,
            "cal_voltage_v": s.rectifier.cal_voltage_v,
            "bypass_cal_dbm": s.rectifier.bypass_cal_dbm,
            "detuning_rolloff_db_per_mhz2": s.rectifier.detuning_rolloff_db_per_mhz2,
            "eff_max": s.rectifier.eff_max,
            "eff_midpoint_dbm": s.rectifier.eff_midpoint_dbm,
            "eff_scale_db": s.rectifier.eff_scale_db,
        },
        "charge_pump": {
            "v_start": s.pump.v_start,
            "v_high": s.pump.v_high,
            "v_low": s.pump.v_low,
            "pump_efficiency": s.pump.pump_efficiency,
        },
        "capacitor": {"capacitance_uf": s.capacitance_f * 1e6},
        "sensor": {
            "v0_v": s.node.sensor.v0_v,
            "slope_v_per_c": s.node.sensor.slope_v_per_c,
            "accuracy_bias_c": s.node.sensor.accuracy_bias_c,
            "noise_sigma_c": s.node.sensor.noise_sigma_c,
        },
        "adc": {"bits": s.node.adc.bits, "vref_v": s.node.adc.vref_v},
        "task": {
            "sample_energy_uj": s.node.profile.sample_energy_j * 1e6,
            "i2c_write_energy_uj": s.node.profile.i2c_write_energy_j * 1e6,
            "task_duration_s": s.node.profile.task_duration_s,
        },
        "node": {
            "node_id": s.node.node_id,
            "antenna_gain_dbi": s.node_gain.dbi,
            "bypass_load_penalty_db": s.bypass_load_penalty_db,
        },
        "simulation": {
            "mode": s.mode.value,
            "duration_s": s.duration_s,
            "dt_s": s.dt_s,
            "seed": s.seed,
            "regulatory_check": s.regulatory_check,
        },
    }


def _check_type(path: str, value: Any, kind: str) -> None:
    if kind == _FLOAT:
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    elif kind == _INT:
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif kind == _BOOL:
        ok = isinstance(value, bool)
    else:
        ok = isinstance(value, str)
    if not ok:
        raise ConfigError(
            f"config key '{path}' expects a {kind}, got {type(value).__name__}"
        )


def _effective_doc(raw: dict[str, Any]) -> dict[str, Any]:
    doc = doc_from_scenario(Scenario())
    for section, content in raw.items():
        if section == "schema":
            if content != SCHEMA_ID:
                raise ConfigError(
                    f"unsupported schema {content!r}, expected {SCHEMA_ID!r}"
                )
            continue
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section {section!r}")
        if not isinstance(content, dict):
            raise ConfigError(f"config section {section!r} must be a mapping")
        for key, value in content.items():
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown config key '{section}.{key}'")
            _check_type(f"{section}.{key}", value, _SCHEMA[section][key])
            doc[section][key] = value
    return doc


def scenario_from_doc(raw: dict[str, Any]) -> Scenario:
    """Build a scenario from a parsed document, filling in defaults."""
    doc = _effective_doc(raw)
    mode_name = doc["simulation"]["mode"]
    try:
        mode = Mode(mode_name)
    except ValueError:
        names = ", ".join(m.value for m in Mode)
        raise ConfigError(
            f"simulation.mode must be one of {names}, got {mode_name!r}"
        ) from None
    return Scenario(
        reader=ReaderConfig(
            eirp=Eirp(float(doc["reader"]["eirp_dbm"])),
            frequency=Frequency(float(doc["reader"]["frequency_mhz"]) * 1e6),
            query_period_s=float(doc["reader"]["query_period_s"]),
            read_duration_s=float(doc["reader"]["read_duration_s"]),
        ),
        geometry=LinkGeometry(
            float(doc["geometry"]["distance_m"]), float(doc["geometry"]["plf"])
        ),
        node_gain=AntennaGain(float(doc["node"]["antenna_gain_dbi"])),
        rectifier=RectifierModel(
            stages=doc["rectifier"]["stages"],
            cal_stages=doc["rectifier"]["cal_stages"],
            center_freq=Frequency(float(doc["rectifier"]["center_freq_mhz"]) * 1e6),
            cal_input_dbm=float(doc["rectifier"]["cal_input_dbm"]),
            cal_voltage_v=float(doc["rectifier"]["cal_voltage_v"]),
            bypass_cal_dbm=float(doc["rectifier"]["bypass_cal_dbm"]),
            detuning_rolloff_db_per_mhz2=float(
                doc["rectifier"]["detuning_rolloff_db_per_mhz2"]
            ),
            eff_max=float(doc["rectifier"]["eff_max"]),
            eff_midpoint_dbm=float(doc["rectifier"]["eff_midpoint_dbm"]),
            eff_scale_db=float(doc["rectifier"]["eff_scale_db"]),
        ),
        pump=ChargePumpParams(
            v_start=float(doc["charge_pump"]["v_start"]),
            v_high=float(doc["charge_pump"]["v_high"]),
            v_low=float(doc["charge_pump"]["v_low"]),
            pump_efficiency=float(doc["charge_pump"]["pump_efficiency"]),
        ),
        capacitance_f=float(doc["capacitor"]["capacitance_uf"]) / 1e6,
        node=NodeConfig(
            sensor=TemperatureSensor(
                v0_v=float(doc["sensor"]["v0_v"]),
                slope_v_per_c=float(doc["sensor"]["slope_v_per_c"]),
                accuracy_bias_c=float(doc["sensor"]["accuracy_bias_c"]),
                noise_sigma_c=float(doc["sensor"]["noise_sigma_c"]),
            ),
            adc=Adc(bits=doc["adc"]["bits"], vref_v=float(doc["adc"]["vref_v"])),
            profile=TaskProfile(
                sample_energy_j=float(doc["task"]["sample_energy_uj"]) / 1e6,
                i2c_write_energy_j=float(doc["task"]["i2c_write_energy_uj"]) / 1e6,
                task_duration_s=float(doc["task"]["task_duration_s"]),
            ),
            node_id=doc["node"]["node_id"],
        ),
        mode=mode,
        excess_path_loss_db=float(doc["environment"]["excess_path_loss_db"]),
        bypass_load_penalty_db=float(doc["node"]["bypass_load_penalty_db"]),
        ambient_c=float(doc["environment"]["ambient_c"]),
        duration_s=float(doc["simulation"]["duration_s"]),
        dt_s=float(doc["simulation"]["dt_s"]),
        seed=doc["simulation"]["seed"],
        regulatory_check=doc["simulation"]["regulatory_check"],
    )


def parse_config(text: str) -> Scenario:
    """Parse a YAML scenario document. The empty document gives defaults."""
    raw = yaml.safe_load(text)
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    return scenario_from_doc(raw)


def load_config(path: str | Path) -> Scenario:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def serialize_config(scenario: Scenario) -> str:
    """Render a scenario back into its document form.

    Parsing the result yields a scenario whose effective values equal
    the input's, so parse and serialize are inverse up to formatting.
    """
    return yaml.safe_dump(doc_from_scenario(scenario), sort_keys=False)
