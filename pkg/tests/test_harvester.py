"""Rectifier curve anchors and the charge-pump phase machine."""

import math

import pytest

from rfidsense.harvester import (
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
from rfidsense.linkbudget import Frequency, PowerLevel

CENTER = Frequency(866.5e6)
MODEL = RectifierModel()
PUMP = ChargePumpParams()


def make_state(phase=Phase.IDLE, volts=0.0, mode=Mode.BOOSTED):
    return HarvesterState(
        phase=phase,
        cap=StorageCapacitor(10e-6, volts),
        mode=mode,
        params=PUMP,
        bypass_threshold_v=MODEL.bypass_threshold_v,
    )


class TestRectifier:
    def test_calibration_anchor(self):
        """At the calibration input the open-circuit output is exact."""
        out = rectified_dc(PowerLevel(-14.0), CENTER, MODEL)
        assert out.v_dc == pytest.approx(0.35, rel=1e-12)

    def test_voltage_scales_with_sqrt_power(self):
        # +6 dB is x4 power, so the open-circuit voltage doubles
        low = rectified_dc(PowerLevel(-14.0), CENTER, MODEL)
        high = rectified_dc(PowerLevel(-8.0), CENTER, MODEL)
        assert high.v_dc / low.v_dc == pytest.approx(10.0 ** 0.3, rel=1e-12)
        assert high.v_dc / low.v_dc == pytest.approx(2.0, rel=1e-2)

    def test_voltage_scales_with_stages(self):
        ten = RectifierModel(stages=10)
        v5 = rectified_dc(PowerLevel(-14.0), CENTER, MODEL).v_dc
        v10 = rectified_dc(PowerLevel(-14.0), CENTER, ten).v_dc
        assert v10 == pytest.approx(2.0 * v5, rel=1e-12)

    def test_detuning_quadratic(self):
        assert MODEL.detuning_loss_db(CENTER) == 0.0
        assert MODEL.detuning_loss_db(Frequency(876.5e6)) == pytest.approx(0.8)
        assert MODEL.detuning_loss_db(Frequency(856.5e6)) == pytest.approx(0.8)
        # 0.8 dB off tune knocks the voltage down by 10^(-0.8/20)
        tuned = rectified_dc(PowerLevel(-14.0), CENTER, MODEL)
        detuned = rectified_dc(PowerLevel(-14.0), Frequency(876.5e6), MODEL)
        assert detuned.v_dc / tuned.v_dc == pytest.approx(
            10.0 ** (-0.8 / 20.0), rel=1e-12
        )

    def test_efficiency_midpoint_gives_ten_microwatts(self):
        """Half of eff_max applies right at the midpoint drive level."""
        assert MODEL.conversion_efficiency(-10.0) == pytest.approx(0.1, rel=1e-12)
        out = rectified_dc(PowerLevel(-10.0), CENTER, MODEL)
        assert out.p_dc == pytest.approx(1e-5, rel=1e-12)

    def test_efficiency_saturates(self):
        assert MODEL.conversion_efficiency(40.0) == pytest.approx(0.2, abs=1e-5)
        assert MODEL.conversion_efficiency(-40.0) < 0.001

    def test_bypass_threshold_voltage(self):
        # 5 dB above the pump calibration point: 0.35 * 10^(5/40)
        assert MODEL.bypass_threshold_v == pytest.approx(
            0.6223977935136229, rel=1e-12
        )

    def test_validation(self):
        with pytest.raises(ValueError):
            RectifierModel(stages=0)
        with pytest.raises(ValueError):
            RectifierModel(eff_max=1.5)
        with pytest.raises(ValueError):
            RectifierModel(detuning_rolloff_db_per_mhz2=-0.1)


class TestChargePump:
    def test_energy_window_value(self):
        cap = StorageCapacitor(10e-6, 0.0)
        # 0.5 * 10 uF * (2.4^2 - 1.85^2) = 11.6875 uJ
        assert energy_window(PUMP, cap) == pytest.approx(1.16875e-5, rel=1e-12)

    def test_charge_time_at_ten_microwatts_dc(self):
        cap = StorageCapacitor(10e-6, 0.0)
        # 10 uW DC in, half lost in the pump: 11.6875 uJ / 5 uW
        t = charge_time(1e-5, PUMP, cap)
        assert t == pytest.approx(2.3375, rel=1e-12)
        assert f"{t:.2f}" == "2.34"
        assert charge_time(0.0, PUMP, cap) == math.inf

    def test_threshold_ordering_enforced(self):
        with pytest.raises(ValueError):
            ChargePumpParams(v_start=2.0, v_high=2.4, v_low=1.85)
        with pytest.raises(ValueError):
            ChargePumpParams(pump_efficiency=0.0)

    def test_idle_until_start_voltage(self):
        state = make_state()
        nxt, delivered = step(state, RectifierOutput(0.2, 1e-5), 0.0, 1e-3)
        assert nxt.phase is Phase.IDLE
        assert nxt.cap.voltage_v == 0.0
        assert delivered == 0.0

    def test_idle_preserves_stored_charge(self):
        state = make_state(Phase.IDLE, volts=1.2)
        nxt, _ = step(state, RectifierOutput(0.1, 0.0), 0.0, 1e-3)
        assert nxt.cap.voltage_v == pytest.approx(1.2)

    def test_charging_starts_at_start_voltage(self):
        state = make_state()
        nxt, _ = step(state, RectifierOutput(0.35, 1e-5), 0.0, 1e-3)
        assert nxt.phase is Phase.CHARGING

    def test_refill_crosses_after_2338_steps(self):
        """One hysteresis window at 5 uW effective is 2338 ms steps."""
        state = make_state(Phase.CHARGING, volts=1.85)
        drive = RectifierOutput(1.0, 1e-5)
        crossed_at = None
        for k in range(1, 3000):
            state, _ = step(state, drive, 0.0, 1e-3)
            if state.phase is Phase.SUPPLYING:
                crossed_at = k
                break
        assert crossed_at == 2338

    def test_supplying_drains_to_cutoff(self):
        state = make_state(Phase.SUPPLYING, volts=2.4)
        load = 0.8e-3
        flipped_at = None
        for k in range(1, 100):
            state, delivered = step(state, RectifierOutput(1.0, 0.0), load, 1e-3)
            assert delivered == pytest.approx(load * 1e-3)
            if state.phase is Phase.CHARGING:
                flipped_at = k
                break
        # (28.8 uJ - 17.1125 uJ) / 0.8 uJ per step = 14.6 -> 15 steps
        assert flipped_at == 15
        assert state.cap.voltage_v == pytest.approx(1.8330302779823369, rel=1e-9)
        assert state.cap.voltage_v <= PUMP.v_low

    def test_full_cycle_voltage_bounds(self):
        """Across a whole cycle the voltage stays inside [0, v_high + slack]."""
        state = make_state()
        drive = RectifierOutput(1.0, 5e-5)
        transitions = []
        prev = state.phase
        for _ in range(30000):
            supplying = state.phase is Phase.SUPPLYING
            gated = RectifierOutput(drive.v_dc, 0.0) if supplying else drive
            state, _ = step(state, gated, 0.8e-3 if supplying else 0.0, 1e-3)
            assert 0.0 <= state.cap.voltage_v < PUMP.v_high + 0.05
            if state.phase is not prev:
                transitions.append((prev, state.phase, state.cap.voltage_v))
                prev = state.phase
        assert len(transitions) >= 4
        for before, after, volts in transitions:
            if (before, after) == (Phase.CHARGING, Phase.SUPPLYING):
                assert volts >= PUMP.v_high
            if (before, after) == (Phase.SUPPLYING, Phase.CHARGING):
                assert volts <= PUMP.v_low

    def test_step_input_validation(self):
        state = make_state()
        with pytest.raises(ValueError):
            step(state, RectifierOutput(1.0, 1e-5), 0.0, 0.0)
        with pytest.raises(ValueError):
            step(state, RectifierOutput(1.0, -1e-5), 0.0, 1e-3)
        with pytest.raises(ValueError):
            step(state, RectifierOutput(1.0, 1e-5), -1.0, 1e-3)


class TestBypass:
    def test_operational_threshold(self):
        assert bypass_operational(0.7, 0.6223977935136229)
        assert not bypass_operational(0.6, 0.6223977935136229)

    def test_bypass_step_serves_load_when_powered(self):
        state = make_state(mode=Mode.BYPASS)
        strong = RectifierOutput(0.7, 1e-4)
        nxt, delivered = step(state, strong, 1e-4, 1e-3)
        assert delivered == pytest.approx(1e-7)
        assert nxt.cap.voltage_v == state.cap.voltage_v

    def test_bypass_step_dark_below_threshold(self):
        state = make_state(mode=Mode.BYPASS)
        weak = RectifierOutput(0.5, 1e-4)
        _, delivered = step(state, weak, 1e-4, 1e-3)
        assert delivered == 0.0
