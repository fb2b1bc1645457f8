"""Config document parsing, validation and round-tripping."""

import pytest

from rfidsense.config import (
    ConfigError,
    doc_from_scenario,
    load_config,
    parse_config,
    serialize_config,
)
from rfidsense.gen2sim import Scenario
from rfidsense.harvester import Mode


def test_empty_document_is_all_defaults():
    assert parse_config("") == Scenario()
    assert parse_config("schema: rfidsense/1\n") == Scenario()


def test_partial_document_keeps_other_defaults():
    scenario = parse_config(
        "geometry:\n  distance_m: 4.8\nsimulation:\n  duration_s: 30.0\n"
    )
    assert scenario.geometry.distance_m == 4.8
    assert scenario.duration_s == 30.0
    assert scenario.reader == Scenario().reader
    assert scenario.rectifier == Scenario().rectifier


def test_unknown_section_rejected():
    with pytest.raises(ConfigError, match="unknown config section 'antenna'"):
        parse_config("antenna:\n  gain: 3\n")


def test_unknown_key_rejected_with_dotted_path():
    with pytest.raises(ConfigError, match="reader.power_dbm"):
        parse_config("reader:\n  power_dbm: 30\n")


def test_wrong_schema_rejected():
    with pytest.raises(ConfigError, match="unsupported schema"):
        parse_config("schema: rfidsense/2\n")


def test_type_errors_are_loud():
    with pytest.raises(ConfigError, match="reader.eirp_dbm"):
        parse_config("reader:\n  eirp_dbm: strong\n")
    with pytest.raises(ConfigError, match="adc.bits"):
        parse_config("adc:\n  bits: 10.5\n")
    with pytest.raises(ConfigError, match="simulation.regulatory_check"):
        parse_config("simulation:\n  regulatory_check: 1\n")
    # booleans are not acceptable numbers even though bool is an int
    with pytest.raises(ConfigError, match="adc.bits"):
        parse_config("adc:\n  bits: true\n")


def test_scalar_section_rejected():
    with pytest.raises(ConfigError, match="must be a mapping"):
        parse_config("reader: 5\n")
    with pytest.raises(ConfigError, match="root"):
        parse_config("- 1\n- 2\n")


def test_mode_names():
    assert parse_config("simulation:\n  mode: bypass\n").mode is Mode.BYPASS
    with pytest.raises(ConfigError, match="simulation.mode"):
        parse_config("simulation:\n  mode: turbo\n")


def test_unit_fields_convert():
    scenario = parse_config(
        "reader:\n  frequency_mhz: 868.0\n"
        "capacitor:\n  capacitance_uf: 22.0\n"
        "task:\n  sample_energy_uj: 4.0\n"
    )
    assert scenario.reader.frequency.hertz == 868.0e6
    assert scenario.capacitance_f == 22.0 / 1e6
    assert scenario.node.profile.sample_energy_j == 4.0 / 1e6


def test_serialize_parse_round_trip():
    """Serialized defaults parse back to the identical scenario."""
    base = Scenario()
    assert parse_config(serialize_config(base)) == base


def test_round_trip_preserves_overrides():
    text = (
        "geometry:\n  distance_m: 2.5\n  plf: 0.7\n"
        "simulation:\n  mode: bypass\n  seed: 5\n"
        "charge_pump:\n  v_high: 2.5\n"
    )
    first = parse_config(text)
    again = parse_config(serialize_config(first))
    assert again == first


def test_doc_covers_every_section():
    doc = doc_from_scenario(Scenario())
    assert doc["schema"] == "rfidsense/1"
    assert set(doc) == {
        "schema",
        "reader",
        "geometry",
        "environment",
        "rectifier",
        "charge_pump",
        "capacitor",
        "sensor",
        "adc",
        "task",
        "node",
        "simulation",
    }


def test_load_config_reads_files(tmp_path):
    path = tmp_path / "scenario.yaml"
    path.write_text("geometry:\n  distance_m: 3.0\n", encoding="utf-8")
    assert load_config(path).geometry.distance_m == 3.0


def test_bundled_configs_parse(configs_dir):
    office = load_config(configs_dir / "office.yaml")
    assert office.geometry.distance_m == 4.8
    bypass = load_config(configs_dir / "bypass_short.yaml")
    assert bypass.mode is Mode.BYPASS
    assert bypass.duration_s == 10.0
