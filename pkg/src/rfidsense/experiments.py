"""Canned studies over the simulator, plus delimited input and output.

Each study returns plain rows that the CLI writes out as CSV. The
writer is deliberately hand-rolled: comma separated, header line, ``.``
decimal point, LF line endings, UTF-8, floats rendered with ``%.6g``,
NaN spelled ``nan``. That keeps repeated runs byte-identical across
platforms, which the tests rely on.
"""

from __future__ import annotations

import csv
import math
from functools import partial
from pathlib import Path
from typing import NamedTuple, Optional, Sequence

from .gen2sim import (
    RatePoint,
    Scenario,
    SensitivityPoint,
    TracePoint,
    range_sweep,
    turn_on_sweep,
)
from .harvester import (
    HarvesterState,
    Mode,
    Phase,
    RectifierOutput,
    StorageCapacitor,
    energy_window,
    step,
)
from .linkbudget import AntennaGain, Eirp, Frequency, LinkGeometry, sensitivity_from_turn_on

DEFAULT_FREQS_MHZ = [840.0 + 0.5 * k for k in range(121)]
DEFAULT_DISTANCES_M = [
    0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 2.5,
    3.0, 3.5, 4.0, 4.5, 4.8, 5.0, 5.5, 6.0,
]

SENSITIVITY_HEADER = ("freq_mhz", "sensitivity_dbm", "mode")
RANGE_HEADER = ("distance_m", "reads_per_min", "mode")
TRACE_HEADER = ("t_s", "true_c", "decoded_c", "err_c")
DUTY_CYCLE_HEADER = ("inflow_uw", "charge_time_s", "burst_s", "est_reads_per_min")
INGEST_HEADER = ("freq_mhz", "sensitivity_dbm")

_MEASUREMENT_COLUMNS = ("freq_mhz", "eirp_on_dbm", "distance_m", "plf", "node_gain_dbi")


def format_value(value: object) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return format(value, ".6g")
    return str(value)


def write_csv(
    path: str | Path, header: Sequence[str], rows: Sequence[Sequence[object]]
) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(format_value(v) for v in row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _sensitivity_for(
    freq_hz: float, scenario: Scenario, step_db: float
) -> list[SensitivityPoint]:
    return turn_on_sweep(
        [Frequency(freq_hz)],
        scenario.geometry,
        step_db,
        rectifier=scenario.rectifier,
        pump=scenario.pump,
        node_gain=scenario.node_gain,
    )


def sensitivity_rows(
    scenario: Scenario,
    freqs_mhz: Optional[Sequence[float]] = None,
    step_db: float = 0.1,
    workers: int = 1,
) -> list[SensitivityPoint]:
    """Turn-on sensitivity over the carrier grid, both harvesting modes.

    The sweep reproduces an anechoic measurement, so the scenario's
    excess path loss does not apply here. Carriers are independent and
    fan out to a process pool when ``workers`` exceeds one.
    """
    mhz = DEFAULT_FREQS_MHZ if freqs_mhz is None else list(freqs_mhz)
    hz = [m * 1e6 for m in mhz]
    job = partial(_sensitivity_for, scenario=scenario, step_db=step_db)
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(job, hz))
    else:
        chunks = [job(f) for f in hz]
    return [point for chunk in chunks for point in chunk]


def range_rows(
    scenario: Scenario,
    distances_m: Optional[Sequence[float]] = None,
    workers: int = 1,
) -> list[RatePoint]:
    """Read rate against reader-tag separation, both harvesting modes."""
    distances = DEFAULT_DISTANCES_M if distances_m is None else list(distances_m)
    return range_sweep(distances, scenario, workers=workers)


def trace_rows(points: Sequence[TracePoint]) -> list[tuple[float, float, float, float]]:
    return [(p.t_s, p.true_c, p.decoded_c, p.err_c) for p in points]


def read_trace_csv(path: str | Path) -> list[tuple[float, float]]:
    """Load a temperature trace: ``time_s,temp_c`` rows, strict format.

    Unlike measurement ingest there is no row skipping here. A trace is
    replayed point for point, so a malformed row is an error, not noise
    to step around.
    """
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError("trace file has no header") from None
        if [cell.strip() for cell in header] != ["time_s", "temp_c"]:
            raise ValueError("trace file must have columns time_s,temp_c")
        rows = []
        for cells in reader:
            if not cells or cells == [""]:
                continue
            if len(cells) != 2:
                raise ValueError(f"trace line {reader.line_num}: expected 2 fields")
            try:
                rows.append((float(cells[0]), float(cells[1])))
            except ValueError:
                raise ValueError(
                    f"trace line {reader.line_num}: values must be numbers"
                ) from None
    return rows


class DutyCycleSummary(NamedTuple):
    inflow_uw: float
    charge_time_s: float
    burst_s: float
    est_reads_per_min: float


def duty_cycle_summary(scenario: Scenario, inflow_uw: float) -> DutyCycleSummary:
    """Closed-form duty cycle at a given net inflow into storage.

    ``inflow_uw`` is the rate the storage capacitor actually gains
    energy, i.e. after pump losses. One cycle charges through the
    hysteresis window at that rate, then spends the window on the task
    load, so the sustained rate is one read per charge-plus-burst.
    """
    if inflow_uw <= 0:
        raise ValueError("inflow must be positive")
    window = energy_window(
        scenario.pump, StorageCapacitor(scenario.capacitance_f, 0.0)
    )
    load_w = scenario.node.profile.total_energy_j / scenario.node.profile.task_duration_s
    charge_s = window / (inflow_uw * 1e-6)
    burst_s = window / load_w
    return DutyCycleSummary(
        inflow_uw, charge_s, burst_s, 60.0 / (charge_s + burst_s)
    )


def duty_cycle_trajectory(
    scenario: Scenario, inflow_uw: float, cycles: int = 3
) -> list[tuple[float, float, str]]:
    """Capacitor voltage over a few charge-discharge cycles.

    Steps the harvester with a constant net inflow and the task load
    applied during discharge, mirroring how the full simulation drives
    it. Used for the duty-cycle figure.
    """
    if inflow_uw <= 0:
        raise ValueError("inflow must be positive")
    if cycles < 1:
        raise ValueError("cycles must be at least 1")
    pump = scenario.pump
    p_dc = inflow_uw * 1e-6 / pump.pump_efficiency
    load_w = scenario.node.profile.total_energy_j / scenario.node.profile.task_duration_s
    state = HarvesterState.initial(
        Mode.BOOSTED,
        pump,
        scenario.capacitance_f,
        scenario.rectifier.bypass_threshold_v,
    )
    dt = scenario.dt_s
    samples = [(0.0, state.cap.voltage_v, state.phase.value)]
    seen = 0
    max_steps = 10_000_000
    for k in range(1, max_steps + 1):
        supplying = state.phase is Phase.SUPPLYING
        drive = RectifierOutput(pump.v_high, 0.0 if supplying else p_dc)
        state, _ = step(state, drive, load_w if supplying else 0.0, dt)
        samples.append((k * dt, state.cap.voltage_v, state.phase.value))
        if supplying and state.phase is not Phase.SUPPLYING:
            seen += 1
            if seen >= cycles:
                break
    else:
        raise ValueError("trajectory did not complete, inflow too small for the step")
    return samples


def ingest_measurements(
    path: str | Path,
) -> tuple[list[tuple[float, float]], list[tuple[int, str]]]:
    """Reduce chamber turn-on measurements to per-carrier sensitivity.

    Expects columns ``freq_mhz, eirp_on_dbm, distance_m, plf,
    node_gain_dbi``. A file missing any of those is rejected outright.
    Rows that fail to parse are skipped and reported as (line number,
    reason) so a long capture with a few bad lines still reduces.
    """
    rows: list[tuple[float, float]] = []
    skipped: list[tuple[int, str]] = []
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        names = reader.fieldnames or []
        missing = [c for c in _MEASUREMENT_COLUMNS if c not in names]
        if missing:
            raise ValueError(
                "measurement file missing columns: " + ", ".join(missing)
            )
        for record in reader:
            line = reader.line_num
            if record.get(None):
                skipped.append((line, "too many fields"))
                continue
            try:
                freq_mhz = float(record["freq_mhz"])
                eirp_on = float(record["eirp_on_dbm"])
                distance = float(record["distance_m"])
                plf = float(record["plf"])
                gain = float(record["node_gain_dbi"])
                sens = sensitivity_from_turn_on(
                    Eirp(eirp_on),
                    AntennaGain(gain),
                    Frequency(freq_mhz * 1e6),
                    LinkGeometry(distance, plf),
                )
            except (TypeError, ValueError) as exc:
                reason = str(exc) if str(exc) else "malformed row"
                if isinstance(exc, TypeError):
                    reason = "missing fields"
                skipped.append((line, reason))
                continue
            if not math.isfinite(sens.dbm):
                skipped.append((line, "sensitivity is not finite"))
                continue
            rows.append((freq_mhz, sens.dbm))
    return rows, skipped
