"""Deterministic reader-tag simulation on a fixed-step clock.

Reader queries and node commits dispatch from an event queue keyed by
(time step, insertion index). All queries for a run are scheduled
before the run starts, so a query always precedes a node event that
lands on the same step boundary. Every source of randomness comes from
one seeded generator, which makes equal-seed runs bit-identical.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional, Sequence

from .epc import Epc96, TagMemory, commit, decode_epc, read_epc
from .harvester import (
    ChargePumpParams,
    HarvesterState,
    Mode,
    Phase,
    RectifierModel,
    RectifierOutput,
    StorageCapacitor,
    bypass_operational,
    energy_window,
    rectified_dc,
    step,
)
from .linkbudget import (
    AntennaGain,
    Eirp,
    Frequency,
    LinkGeometry,
    PowerLevel,
    dbm_from_mw,
    received_power,
    sensitivity_from_turn_on,
)
from .node import NodeConfig, decode_temperature, execute_task_cycle

REGULATORY_MAX_EIRP_W = 3.2
REGULATORY_BAND_HZ = (865.0e6, 868.0e6)

_QUERY = "query"
_REFRESH = "refresh"


class ScenarioError(ValueError):
    """Scenario parameters are inconsistent or not permitted."""


@dataclass(frozen=True)
class ReaderConfig:
    """Interrogator settings: carrier, radiated power and query cadence."""

    eirp: Eirp = Eirp(35.05)
    frequency: Frequency = Frequency(866.5e6)
    query_period_s: float = 0.050
    read_duration_s: float = 0.020

    def __post_init__(self) -> None:
        if self.query_period_s <= 0:
            raise ValueError("query period must be positive")
        if self.read_duration_s <= 0:
            raise ValueError("read duration must be positive")


@dataclass(frozen=True)
class Scenario:
    """One tag in a static field of one reader."""

    reader: ReaderConfig = ReaderConfig()
    geometry: LinkGeometry = LinkGeometry(1.0, 0.5)
    node_gain: AntennaGain = AntennaGain(1.8)
    rectifier: RectifierModel = RectifierModel()
    pump: ChargePumpParams = ChargePumpParams()
    capacitance_f: float = 10e-6
    node: NodeConfig = NodeConfig()
    mode: Mode = Mode.BOOSTED
    excess_path_loss_db: float = 3.0
    bypass_load_penalty_db: float = 4.5
    ambient_c: float = 25.0
    duration_s: float = 60.0
    dt_s: float = 1e-3
    seed: int = 0
    regulatory_check: bool = True


def node_input_power(scenario: Scenario) -> PowerLevel:
    """Power at the tag antenna port, free space minus the site excess."""
    clear = received_power(
        scenario.reader.eirp,
        scenario.node_gain,
        scenario.reader.frequency,
        scenario.geometry,
    )
    return PowerLevel(clear.dbm - scenario.excess_path_loss_db)


def loaded_bypass_threshold_v(scenario: Scenario) -> float:
    """Rectifier voltage needed to carry the logic load without the pump.

    The no-load turn-on point is not enough once the MCU draws current,
    so the in-situ threshold sits ``bypass_load_penalty_db`` above it in
    input power, which scales the voltage by the square root.
    """
    return scenario.rectifier.bypass_threshold_v * 10.0 ** (
        scenario.bypass_load_penalty_db / 20.0
    )


def _steps(value_s: float, dt_s: float, what: str) -> int:
    ratio = value_s / dt_s
    steps = round(ratio)
    if steps < 1 or abs(ratio - steps) > 1e-6 * max(1.0, ratio):
        raise ScenarioError(
            f"{what} ({value_s} s) must be a whole number of {dt_s} s steps"
        )
    return steps


def validate_scenario(scenario: Scenario) -> None:
    """Reject impossible or, when checking is on, non-compliant setups."""
    if scenario.dt_s <= 0:
        raise ScenarioError("timestep must be positive")
    if scenario.duration_s <= 0:
        raise ScenarioError("duration must be positive")
    if scenario.excess_path_loss_db < 0:
        raise ScenarioError("excess path loss cannot be negative")
    if scenario.bypass_load_penalty_db < 0:
        raise ScenarioError("bypass load penalty cannot be negative")
    if not math.isfinite(scenario.ambient_c):
        raise ScenarioError("ambient temperature must be finite")
    _steps(scenario.reader.query_period_s, scenario.dt_s, "query period")
    _steps(scenario.node.profile.task_duration_s, scenario.dt_s, "task duration")
    window = energy_window(
        scenario.pump, StorageCapacitor(scenario.capacitance_f, 0.0)
    )
    if scenario.node.profile.total_energy_j > window:
        raise ScenarioError(
            f"task needs {scenario.node.profile.total_energy_j:.3g} J but one "
            f"discharge window releases only {window:.3g} J"
        )
    if scenario.regulatory_check:
        cap_dbm = dbm_from_mw(REGULATORY_MAX_EIRP_W * 1e3)
        if scenario.reader.eirp.dbm > cap_dbm + 1e-9:
            raise ScenarioError(
                f"EIRP {scenario.reader.eirp.dbm} dBm exceeds the "
                f"{REGULATORY_MAX_EIRP_W} W ({cap_dbm:.2f} dBm) limit"
            )
        lo, hi = REGULATORY_BAND_HZ
        if not lo <= scenario.reader.frequency.hertz <= hi:
            raise ScenarioError(
                f"carrier {scenario.reader.frequency.mhz} MHz outside the "
                f"{lo / 1e6:.0f}-{hi / 1e6:.0f} MHz band"
            )


@dataclass
class SimClock:
    """Fixed-step clock; times are derived from the step index only."""

    dt_s: float
    step: int = 0

    @property
    def now_s(self) -> float:
        return self.step * self.dt_s

    def advance(self) -> None:
        self.step += 1


class EventQueue:
    """Events ordered by (step, insertion index).

    Two events due on the same step dispatch in insertion order, which
    is how reader queries get priority over node writes: queries are
    scheduled for the whole run up front.
    """

    def __init__(self) -> None:
        self._heap: list[tuple[int, int, str]] = []
        self._count = 0

    def push(self, step_index: int, kind: str) -> None:
        heapq.heappush(self._heap, (step_index, self._count, kind))
        self._count += 1

    def pop_due(self, step_index: int) -> list[str]:
        due = []
        while self._heap and self._heap[0][0] <= step_index:
            due.append(heapq.heappop(self._heap)[2])
        return due

    def __len__(self) -> int:
        return len(self._heap)


class ReadRecord(NamedTuple):
    t_s: float
    seq: int
    code: int
    temp_c: float
    epc: Epc96


class CommitRecord(NamedTuple):
    t_s: float
    seq: int
    code: int


class EnergySample(NamedTuple):
    t_s: float
    voltage_v: float
    phase: str


@dataclass
class ReadLog:
    """Everything observable from one scenario run."""

    mode: Mode
    duration_s: float
    reads: list[ReadRecord] = field(default_factory=list)
    commits: list[CommitRecord] = field(default_factory=list)
    energy_samples: list[EnergySample] = field(default_factory=list)
    harvested_dc_j: float = 0.0
    pump_delivered_j: float = 0.0
    cap_energy_gain_j: float = 0.0
    direct_drive_j: float = 0.0
    task_energy_j: float = 0.0
    memory: Optional[TagMemory] = None


def run_scenario(scenario: Scenario) -> ReadLog:
    """Simulate one scenario and return its log.

    A read is logged at a query instant when the tag holds a committed
    identifier and the field is strong enough for its operating mode.
    In boosted mode each discharge burst funds exactly one task pass,
    so at most one read follows each commit.
    """
    validate_scenario(scenario)
    if scenario.mode is Mode.BYPASS:
        return _run_bypass(scenario)
    return _run_boosted(scenario)


def _run_boosted(scenario: Scenario) -> ReadLog:
    rng = random.Random(scenario.seed)
    drive = rectified_dc(
        node_input_power(scenario), scenario.reader.frequency, scenario.rectifier
    )
    dt = scenario.dt_s
    n_steps = _steps(scenario.duration_s, dt, "duration")
    query_stride = _steps(scenario.reader.query_period_s, dt, "query period")
    task_steps = _steps(scenario.node.profile.task_duration_s, dt, "task duration")
    sample_stride = query_stride

    events = EventQueue()
    for q in range(0, n_steps, query_stride):
        events.push(q, _QUERY)

    state = HarvesterState.initial(
        Mode.BOOSTED,
        scenario.pump,
        scenario.capacitance_f,
        scenario.rectifier.bypass_threshold_v,
    )
    log = ReadLog(mode=Mode.BOOSTED, duration_s=scenario.duration_s)
    mem = TagMemory.fresh()
    seq = 0
    pending_read = False
    committed = False
    task_outcome = None
    commit_step: Optional[int] = None
    e_start = state.cap.energy_j
    e_low = 0.5 * scenario.capacitance_f * scenario.pump.v_low**2
    task_load_w = (
        scenario.node.profile.total_energy_j / scenario.node.profile.task_duration_s
    )
    powered = drive.v_dc >= scenario.pump.v_start
    # the pump's transfer switch disconnects its output while the cap
    # discharges, so inflow pauses for the supplying phase
    gated = RectifierOutput(drive.v_dc, 0.0)
    clock = SimClock(dt)

    for k in range(n_steps):
        for kind in events.pop_due(k):
            if kind == _QUERY and committed and pending_read and powered:
                epc = read_epc(mem)
                _, rseq, code = decode_epc(epc)
                log.reads.append(
                    ReadRecord(
                        clock.now_s,
                        rseq,
                        code,
                        decode_temperature(code, scenario.node.sensor,
                                           scenario.node.adc),
                        epc,
                    )
                )
                pending_read = False
        if commit_step == k and task_outcome is not None:
            mem = commit(mem, task_outcome.epc)
            log.commits.append(
                CommitRecord(clock.now_s, task_outcome.epc.seq, task_outcome.code)
            )
            log.task_energy_j += task_outcome.energy_used_j
            committed = True
            pending_read = True
            seq = (seq + 1) & 0xFFFF
            task_outcome = None
            commit_step = None

        if k % sample_stride == 0:
            log.energy_samples.append(
                EnergySample(clock.now_s, state.cap.voltage_v, state.phase.value)
            )

        supplying = state.phase is Phase.SUPPLYING
        load_w = task_load_w if supplying else 0.0
        prev_phase = state.phase
        state, delivered = step(state, gated if supplying else drive, load_w, dt)
        log.pump_delivered_j += delivered
        log.harvested_dc_j += drive.p_dc * dt
        clock.advance()

        if state.phase is Phase.SUPPLYING and prev_phase is not Phase.SUPPLYING:
            outcome = execute_task_cycle(
                scenario.node,
                state.cap.energy_j - e_low,
                scenario.ambient_c,
                clock.now_s,
                seq,
                rng,
            )
            if outcome.epc_written:
                task_outcome = outcome
                commit_step = clock.step + task_steps
        elif state.phase is not Phase.SUPPLYING and prev_phase is Phase.SUPPLYING:
            if commit_step is not None and clock.step < commit_step:
                # burst ended before the task finished: nothing was stored
                task_outcome = None
                commit_step = None

    log.energy_samples.append(
        EnergySample(clock.now_s, state.cap.voltage_v, state.phase.value)
    )
    log.cap_energy_gain_j = state.cap.energy_j - e_start
    log.memory = mem
    return log


def _run_bypass(scenario: Scenario) -> ReadLog:
    rng = random.Random(scenario.seed)
    drive = rectified_dc(
        node_input_power(scenario), scenario.reader.frequency, scenario.rectifier
    )
    dt = scenario.dt_s
    n_steps = _steps(scenario.duration_s, dt, "duration")
    query_stride = _steps(scenario.reader.query_period_s, dt, "query period")
    operational = bypass_operational(drive.v_dc, loaded_bypass_threshold_v(scenario))

    log = ReadLog(mode=Mode.BYPASS, duration_s=scenario.duration_s)
    mem = TagMemory.fresh()
    seq = 0
    committed = False
    task_cost = scenario.node.profile.total_energy_j

    def run_task(now_s: float) -> None:
        nonlocal mem, seq, committed
        outcome = execute_task_cycle(
            scenario.node, task_cost, scenario.ambient_c, now_s, seq, rng
        )
        mem = commit(mem, outcome.epc)
        log.commits.append(CommitRecord(now_s, outcome.epc.seq, outcome.code))
        log.direct_drive_j += outcome.energy_used_j
        seq = (seq + 1) & 0xFFFF
        committed = True

    events = EventQueue()
    query_steps = range(0, n_steps, query_stride)
    for q in query_steps:
        events.push(q, _QUERY)
    for q in query_steps:
        if q > 0:
            events.push(q, _REFRESH)

    if operational:
        # the node was already powered before the observation window, so
        # a stored identifier exists by the time of the first query
        run_task(0.0)

    for k in range(n_steps):
        t = k * dt
        for kind in events.pop_due(k):
            if not operational:
                continue
            if kind == _QUERY and committed:
                epc = read_epc(mem)
                _, rseq, code = decode_epc(epc)
                log.reads.append(
                    ReadRecord(
                        t,
                        rseq,
                        code,
                        decode_temperature(code, scenario.node.sensor,
                                           scenario.node.adc),
                        epc,
                    )
                )
            elif kind == _REFRESH:
                run_task(t)
        if k % query_stride == 0:
            log.energy_samples.append(
                EnergySample(t, drive.v_dc, "direct" if operational else "idle")
            )

    log.harvested_dc_j = drive.p_dc * scenario.duration_s
    log.memory = mem
    return log


def read_rate(log: ReadLog, duration_s: Optional[float] = None) -> float:
    """Successful reads per minute over the run."""
    span = log.duration_s if duration_s is None else duration_s
    if span <= 0:
        raise ValueError("duration must be positive")
    return 60.0 * len(log.reads) / span


class SensitivityPoint(NamedTuple):
    freq_mhz: float
    sensitivity_dbm: float
    mode: str


class RatePoint(NamedTuple):
    distance_m: float
    reads_per_min: float
    mode: str


class TracePoint(NamedTuple):
    t_s: float
    true_c: float
    decoded_c: float
    err_c: float


def _energizable(
    eirp_dbm: float,
    freq: Frequency,
    geometry: LinkGeometry,
    node_gain: AntennaGain,
    rectifier: RectifierModel,
    pump: ChargePumpParams,
    mode: Mode,
) -> bool:
    p_in = received_power(Eirp(eirp_dbm), node_gain, freq, geometry)
    drive = rectified_dc(p_in, freq, rectifier)
    if mode is Mode.BOOSTED:
        # without storage leakage, any inflow above the start voltage
        # eventually completes a charge-discharge cycle
        return drive.v_dc >= pump.v_start
    return bypass_operational(drive.v_dc, rectifier.bypass_threshold_v)


def turn_on_sweep(
    freqs: Sequence[Frequency],
    geometry: LinkGeometry,
    step_db: float = 0.1,
    *,
    rectifier: RectifierModel = RectifierModel(),
    pump: ChargePumpParams = ChargePumpParams(),
    node_gain: AntennaGain = AntennaGain(1.8),
    modes: Sequence[Mode] = (Mode.BOOSTED, Mode.BYPASS),
    eirp_lo_dbm: float = -10.0,
    eirp_hi_dbm: float = 40.0,
) -> list[SensitivityPoint]:
    """Estimate tag sensitivity per carrier by bisecting the turn-on EIRP.

    Emulates the chamber procedure: raise radiated power until the tag
    wakes, then convert that EIRP to power at the tag. Carriers that do
    not wake the tag even at ``eirp_hi_dbm`` get a NaN sensitivity.
    """
    if step_db <= 0:
        raise ValueError("step_db must be positive")
    points = []
    for freq in freqs:
        for mode in modes:
            args = (freq, geometry, node_gain, rectifier, pump, mode)
            if not _energizable(eirp_hi_dbm, *args):
                points.append(
                    SensitivityPoint(freq.mhz, math.nan, mode.value)
                )
                continue
            lo, hi = eirp_lo_dbm, eirp_hi_dbm
            if not _energizable(lo, *args):
                while hi - lo > step_db:
                    mid = 0.5 * (lo + hi)
                    if _energizable(mid, *args):
                        hi = mid
                    else:
                        lo = mid
            else:
                hi = lo
            sens = sensitivity_from_turn_on(Eirp(hi), node_gain, freq, geometry)
            points.append(SensitivityPoint(freq.mhz, sens.dbm, mode.value))
    return points


def _rate_for(scenario: Scenario) -> float:
    return read_rate(run_scenario(scenario))


def range_sweep(
    distances_m: Sequence[float],
    template: Scenario,
    modes: Sequence[Mode] = (Mode.BOOSTED, Mode.BYPASS),
    workers: int = 1,
) -> list[RatePoint]:
    """Read rate against separation for each harvesting mode.

    Scenarios are independent, so with ``workers > 1`` they fan out to a
    process pool; results merge back in input order either way.
    """
    jobs = []
    for mode in modes:
        for d in distances_m:
            jobs.append(
                replace(
                    template,
                    geometry=LinkGeometry(d, template.geometry.plf),
                    mode=mode,
                )
            )
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            rates = list(pool.map(_rate_for, jobs))
    else:
        rates = [_rate_for(job) for job in jobs]
    points = []
    i = 0
    for mode in modes:
        for d in distances_m:
            points.append(RatePoint(d, rates[i], mode.value))
            i += 1
    return points


def temperature_trace(
    scenario: Scenario,
    trace: Sequence[tuple[float, float]],
) -> list[TracePoint]:
    """Push a temperature trace through the full sense-store-read chain.

    Each trace point is sampled, quantized, packed into the identifier,
    committed to tag memory and read back the way a reader would see it.
    Raises :class:`ScenarioError` when the tag is not energizable at the
    scenario geometry, and :class:`ValueError` for an empty trace.
    """
    if not trace:
        raise ValueError("trace is empty")
    validate_scenario(scenario)
    drive = rectified_dc(
        node_input_power(scenario), scenario.reader.frequency, scenario.rectifier
    )
    if scenario.mode is Mode.BOOSTED:
        ok = drive.v_dc >= scenario.pump.v_start
    else:
        ok = bypass_operational(drive.v_dc, loaded_bypass_threshold_v(scenario))
    if not ok:
        raise ScenarioError(
            "tag is not energizable at the configured geometry, no trace possible"
        )
    rng = random.Random(scenario.seed)
    mem = TagMemory.fresh()
    points = []
    for seq, (t_s, true_c) in enumerate(trace):
        outcome = execute_task_cycle(
            scenario.node,
            scenario.node.profile.total_energy_j,
            true_c,
            t_s,
            seq & 0xFFFF,
            rng,
        )
        mem = commit(mem, outcome.epc)
        _, _, code = decode_epc(read_epc(mem))
        decoded_c = decode_temperature(code, scenario.node.sensor, scenario.node.adc)
        points.append(TracePoint(t_s, true_c, decoded_c, decoded_c - true_c))
    return points
