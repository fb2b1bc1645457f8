"""Simulation and analysis toolkit for battery-free UHF RFID sensor tags.

The package covers the whole chain of such a tag: the radio link that
powers it, the rectifier and charge pump that turn field strength into
usable energy, the duty cycle that energy budget forces, and the
identifier-embedded sensor readings a standard reader can collect
without any custom air protocol.
"""

from .config import ConfigError, load_config, parse_config, serialize_config
from .epc import (
    Epc96,
    EpcFormatError,
    TagMemory,
    TagMemoryError,
    commit,
    crc16,
    crc16_check,
    decode_epc,
    encode_epc,
    read_epc,
    verify,
)
from .gen2sim import (
    RatePoint,
    ReaderConfig,
    ReadLog,
    Scenario,
    ScenarioError,
    SensitivityPoint,
    TracePoint,
    node_input_power,
    range_sweep,
    read_rate,
    run_scenario,
    temperature_trace,
    turn_on_sweep,
    validate_scenario,
)
from .harvester import (
    ChargePumpParams,
    HarvesterState,
    Mode,
    Phase,
    RectifierModel,
    RectifierOutput,
    StorageCapacitor,
    bypass_operational,
    charge_time,
    energy_window,
    rectified_dc,
    step,
)
from .linkbudget import (
    AntennaGain,
    Distance,
    Eirp,
    Frequency,
    LinkGeometry,
    NoRangeError,
    PowerLevel,
    dbm_from_mw,
    friis_factor,
    max_range,
    mw_from_dbm,
    received_power,
    sensitivity_from_turn_on,
)
from .node import (
    Adc,
    AdcSample,
    NodeConfig,
    TaskProfile,
    TemperatureSensor,
    decode_temperature,
    execute_task_cycle,
    quantization_step_c,
    sense,
)

__version__ = "0.1.0"

__all__ = [
    "Adc",
    "AdcSample",
    "AntennaGain",
    "ChargePumpParams",
    "ConfigError",
    "Distance",
    "Eirp",
    "Epc96",
    "EpcFormatError",
    "Frequency",
    "HarvesterState",
    "LinkGeometry",
    "Mode",
    "NoRangeError",
    "NodeConfig",
    "Phase",
    "PowerLevel",
    "RatePoint",
    "ReadLog",
    "ReaderConfig",
    "RectifierModel",
    "RectifierOutput",
    "Scenario",
    "ScenarioError",
    "SensitivityPoint",
    "StorageCapacitor",
    "TagMemory",
    "TagMemoryError",
    "TaskProfile",
    "TemperatureSensor",
    "TracePoint",
    "bypass_operational",
    "charge_time",
    "commit",
    "crc16",
    "crc16_check",
    "dbm_from_mw",
    "decode_epc",
    "decode_temperature",
    "encode_epc",
    "energy_window",
    "execute_task_cycle",
    "friis_factor",
    "load_config",
    "max_range",
    "mw_from_dbm",
    "node_input_power",
    "parse_config",
    "quantization_step_c",
    "range_sweep",
    "read_epc",
    "read_rate",
    "received_power",
    "rectified_dc",
    "run_scenario",
    "sense",
    "sensitivity_from_turn_on",
    "serialize_config",
    "step",
    "temperature_trace",
    "turn_on_sweep",
    "validate_scenario",
    "verify",
    "__version__",
]
