"""Figure rendering for the CLI report paths.

Every study that writes a CSV can also drop a PNG with the same stem
next to it. Rendering always goes through the Agg backend so it works
headless, and figures are closed after saving to keep long sweeps from
accumulating state.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .gen2sim import RatePoint, SensitivityPoint, TracePoint

_DPI = 150
_FIGSIZE = (7.0, 4.5)

_MODE_STYLE = {
    "boosted": {"color": "tab:blue", "marker": "o"},
    "bypass": {"color": "tab:orange", "marker": "s"},
}


def _style(mode: str) -> dict:
    return _MODE_STYLE.get(mode, {"color": "tab:gray", "marker": "x"})


def _finish(fig: "plt.Figure", path: str | Path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def _modes(points: Sequence) -> list[str]:
    seen = []
    for p in points:
        if p.mode not in seen:
            seen.append(p.mode)
    return seen


def sensitivity_figure(points: Sequence[SensitivityPoint], path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for mode in _modes(points):
        xs = [p.freq_mhz for p in points if p.mode == mode]
        ys = [p.sensitivity_dbm for p in points if p.mode == mode]
        ax.plot(xs, ys, label=mode, markersize=3, **_style(mode))
        dead = [x for x, y in zip(xs, ys) if math.isnan(y)]
        if dead:
            ax.plot(
                dead,
                [0.0] * len(dead),
                linestyle="none",
                marker="v",
                color=_style(mode)["color"],
                alpha=0.4,
            )
    ax.set_xlabel("carrier (MHz)")
    ax.set_ylabel("sensitivity (dBm)")
    ax.set_title("Turn-on sensitivity vs carrier")
    ax.grid(alpha=0.3)
    ax.legend()
    return _finish(fig, path)


def range_figure(points: Sequence[RatePoint], path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for mode in _modes(points):
        xs = [p.distance_m for p in points if p.mode == mode]
        ys = [p.reads_per_min for p in points if p.mode == mode]
        ax.plot(xs, ys, label=mode, markersize=4, **_style(mode))
    ax.set_xlabel("reader-tag separation (m)")
    ax.set_ylabel("reads per minute")
    ax.set_title("Read rate vs separation")
    ax.grid(alpha=0.3)
    ax.legend()
    return _finish(fig, path)


def trace_figure(points: Sequence[TracePoint], path: str | Path) -> Path:
    fig, (ax, ax_err) = plt.subplots(
        2, 1, figsize=(7.0, 6.0), sharex=True, height_ratios=[2, 1]
    )
    ts = [p.t_s for p in points]
    ax.plot(ts, [p.true_c for p in points], color="tab:gray", label="true")
    ax.plot(
        ts,
        [p.decoded_c for p in points],
        color="tab:blue",
        linestyle="--",
        label="decoded",
    )
    ax.set_ylabel("temperature (°C)")
    ax.set_title("Decoded vs true temperature")
    ax.grid(alpha=0.3)
    ax.legend()
    ax_err.plot(ts, [p.err_c for p in points], color="tab:red")
    ax_err.axhline(0.0, color="black", linewidth=0.8)
    ax_err.set_xlabel("time (s)")
    ax_err.set_ylabel("error (°C)")
    ax_err.grid(alpha=0.3)
    return _finish(fig, path)


def duty_cycle_figure(
    samples: Sequence[tuple[float, float, str]],
    v_high: float,
    v_low: float,
    path: str | Path,
) -> Path:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.plot(
        [s[0] for s in samples],
        [s[1] for s in samples],
        color="tab:blue",
        linewidth=1.2,
    )
    ax.axhline(v_high, color="tab:green", linestyle=":", label="discharge start")
    ax.axhline(v_low, color="tab:red", linestyle=":", label="discharge stop")
    ax.set_xlabel("time (s)")
    ax.set_ylabel("storage voltage (V)")
    ax.set_title("Storage voltage over charge-discharge cycles")
    ax.grid(alpha=0.3)
    ax.legend()
    return _finish(fig, path)


def ingest_figure(rows: Sequence[tuple[float, float]], path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.plot(
        [r[0] for r in rows],
        [r[1] for r in rows],
        linestyle="none",
        marker="o",
        markersize=4,
        color="tab:purple",
    )
    ax.set_xlabel("carrier (MHz)")
    ax.set_ylabel("sensitivity (dBm)")
    ax.set_title("Measured turn-on sensitivity")
    ax.grid(alpha=0.3)
    return _finish(fig, path)
