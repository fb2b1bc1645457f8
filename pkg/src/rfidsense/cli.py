"""Command line front end.

Five subcommands, one per study. Each writes a CSV into the output
directory and, unless ``--no-figures`` is given, a PNG with the same
stem. Scenario parameters come from a YAML config file or from the
built-in defaults.
"""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path
from typing import Callable, Optional, TypeVar

import click

from . import __version__, experiments, report
from .config import load_config
from .gen2sim import Scenario, temperature_trace

_F = TypeVar("_F", bound=Callable)


def _scenario(config: str, seed: Optional[int]) -> Scenario:
    try:
        scenario = Scenario() if config == "default" else load_config(config)
    except OSError as exc:
        raise click.ClickException(f"cannot read config: {exc}")
    except ValueError as exc:
        raise click.ClickException(str(exc))
    if seed is not None:
        scenario = replace(scenario, seed=seed)
    return scenario


def _outdir(out: str) -> Path:
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _common(fn: _F) -> _F:
    fn = click.option(
        "--config",
        default="default",
        show_default=True,
        help="Scenario YAML file, or 'default' for the built-in scenario.",
    )(fn)
    fn = click.option(
        "--out",
        default="out",
        show_default=True,
        help="Directory for CSV and figure output.",
    )(fn)
    fn = click.option(
        "--seed", type=int, default=None, help="Override the scenario seed."
    )(fn)
    fn = click.option(
        "--figures/--no-figures",
        default=True,
        show_default=True,
        help="Render a PNG next to each CSV.",
    )(fn)
    return fn


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Link-budget, harvesting and duty-cycle studies for battery-free
    RFID sensor tags."""


@main.command("sensitivity-sweep")
@_common
@click.option("--workers", type=int, default=1, show_default=True)
@click.option(
    "--step-db",
    type=float,
    default=0.1,
    show_default=True,
    help="Turn-on power bisection resolution.",
)
def sensitivity_sweep(
    config: str, out: str, seed: Optional[int], figures: bool, workers: int, step_db: float
) -> None:
    """Turn-on sensitivity across the carrier grid, per harvesting mode."""
    scenario = _scenario(config, seed)
    try:
        rows = experiments.sensitivity_rows(scenario, step_db=step_db, workers=workers)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    outdir = _outdir(out)
    csv_path = outdir / "sensitivity_sweep.csv"
    experiments.write_csv(csv_path, experiments.SENSITIVITY_HEADER, rows)
    note = ""
    if figures:
        fig = report.sensitivity_figure(rows, csv_path.with_suffix(".png"))
        note = f" and {fig}"
    click.echo(f"sensitivity-sweep: {len(rows)} rows -> {csv_path}{note}")


@main.command("range-sweep")
@_common
@click.option("--workers", type=int, default=1, show_default=True)
def range_sweep_cmd(
    config: str, out: str, seed: Optional[int], figures: bool, workers: int
) -> None:
    """Read rate against reader-tag separation, per harvesting mode."""
    scenario = _scenario(config, seed)
    try:
        rows = experiments.range_rows(scenario, workers=workers)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    outdir = _outdir(out)
    csv_path = outdir / "range_sweep.csv"
    experiments.write_csv(csv_path, experiments.RANGE_HEADER, rows)
    note = ""
    if figures:
        fig = report.range_figure(rows, csv_path.with_suffix(".png"))
        note = f" and {fig}"
    click.echo(f"range-sweep: {len(rows)} rows -> {csv_path}{note}")


@main.command("trace")
@_common
@click.option(
    "--input",
    "input_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
    help="Temperature trace CSV with columns time_s,temp_c.",
)
def trace(
    config: str, out: str, seed: Optional[int], figures: bool, input_path: str
) -> None:
    """Replay a temperature trace through sensing, storage and readout."""
    scenario = _scenario(config, seed)
    try:
        series = experiments.read_trace_csv(input_path)
        points = temperature_trace(scenario, series)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    outdir = _outdir(out)
    csv_path = outdir / "trace.csv"
    experiments.write_csv(
        csv_path, experiments.TRACE_HEADER, experiments.trace_rows(points)
    )
    note = ""
    if figures:
        fig = report.trace_figure(points, csv_path.with_suffix(".png"))
        note = f" and {fig}"
    worst = max(abs(p.err_c) for p in points)
    click.echo(
        f"trace: {len(points)} points, max decode error {worst:.3f} C "
        f"-> {csv_path}{note}"
    )


@main.command("duty-cycle")
@_common
@click.option(
    "--inflow-uw",
    type=float,
    default=5.0,
    show_default=True,
    help="Net power into storage after pump losses, in microwatts.",
)
def duty_cycle(
    config: str, out: str, seed: Optional[int], figures: bool, inflow_uw: float
) -> None:
    """Charge and burst timing at a fixed net inflow into storage."""
    scenario = _scenario(config, seed)
    try:
        summary = experiments.duty_cycle_summary(scenario, inflow_uw)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    outdir = _outdir(out)
    csv_path = outdir / "duty_cycle.csv"
    experiments.write_csv(csv_path, experiments.DUTY_CYCLE_HEADER, [summary])
    note = ""
    if figures:
        samples = experiments.duty_cycle_trajectory(scenario, inflow_uw)
        fig = report.duty_cycle_figure(
            samples,
            scenario.pump.v_high,
            scenario.pump.v_low,
            csv_path.with_suffix(".png"),
        )
        note = f" and {fig}"
    click.echo(
        f"duty-cycle: charge time {summary.charge_time_s:.2f} s, "
        f"burst {summary.burst_s * 1e3:.1f} ms, about "
        f"{summary.est_reads_per_min:.1f} reads/min at {inflow_uw:g} uW "
        f"-> {csv_path}{note}"
    )


@main.command("ingest")
@_common
@click.option(
    "--input",
    "input_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
    help="Chamber measurement CSV.",
)
def ingest(
    config: str, out: str, seed: Optional[int], figures: bool, input_path: str
) -> None:
    """Reduce chamber turn-on measurements to per-carrier sensitivity."""
    # the reduction only uses measured columns, but a broken --config
    # should still fail loudly instead of being silently ignored
    _scenario(config, seed)
    try:
        rows, skipped = experiments.ingest_measurements(input_path)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    outdir = _outdir(out)
    csv_path = outdir / "ingested_sensitivity.csv"
    experiments.write_csv(csv_path, experiments.INGEST_HEADER, rows)
    note = ""
    if figures:
        fig = report.ingest_figure(rows, csv_path.with_suffix(".png"))
        note = f" and {fig}"
    for line, reason in skipped:
        click.echo(f"skipped line {line}: {reason}", err=True)
    click.echo(
        f"ingest: {len(rows)} rows reduced, {len(skipped)} skipped "
        f"-> {csv_path}{note}"
    )


if __name__ == "__main__":
    main()
