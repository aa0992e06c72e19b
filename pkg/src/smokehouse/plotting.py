"""Render run telemetry to PNG figures next to the CSV output."""

import matplotlib

matplotlib.use("Agg")  # headless; must be set before pyplot import

import matplotlib.pyplot as plt

from .engine import TelemetryRecord

_PHASE_SHADE = {
    "BoilWater": "#d9e8f5",
    "Cook": "#f5e3d9",
    "Smoke": "#e3d9f5",
    "Dry": "#d9f5e0",
    "Fault": "#f5d9d9",
}


def _phase_spans(records: list[TelemetryRecord]) -> list[tuple[str, float, float]]:
    spans = []
    start = records[0].t_s
    current = records[0].phase
    for rec in records[1:]:
        if rec.phase != current:
            spans.append((current, start, rec.t_s))
            start = rec.t_s
            current = rec.phase
    spans.append((current, start, records[-1].t_s + 1.0))
    return spans


def _shade_phases(ax, records):
    for phase, t0, t1 in _phase_spans(records):
        color = _PHASE_SHADE.get(phase)
        if color:
            ax.axvspan(t0, t1, color=color, alpha=0.6, linewidth=0)


def plot_temperatures(records: list[TelemetryRecord], path) -> None:
    """Node temperatures and sensor readings over the run, phases shaded."""
    if not records:
        raise ValueError("cannot plot empty telemetry")
    t = [r.t_s for r in records]
    fig, ax = plt.subplots(figsize=(11, 5))
    _shade_phases(ax, records)
    ax.plot(t, [r.T_boiler_water for r in records], label="boiler water", lw=1.2)
    ax.plot(t, [r.T_cook_zone for r in records], label="cook zone", lw=1.2)
    ax.plot(t, [r.T_smoke_firebox for r in records], label="smoke firebox", lw=1.2)
    ax.plot(t, [r.T_smoke_path for r in records], label="smoke path", lw=1.2)
    ax.plot(t, [r.R_cook for r in records], label="cook sensor", lw=0.8, ls="--", color="k")
    ax.set_xlabel("time [s]")
    ax.set_ylabel("temperature [degC]")
    ax.set_title("Run temperatures")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def plot_actuators(records: list[TelemetryRecord], path) -> None:
    """Heater duty plus the on/off actuator traces as stacked lanes."""
    if not records:
        raise ValueError("cannot plot empty telemetry")
    t = [r.t_s for r in records]
    fig, (ax_duty, ax_bits) = plt.subplots(
        2, 1, figsize=(11, 5), sharex=True, height_ratios=[2, 3]
    )
    _shade_phases(ax_duty, records)
    _shade_phases(ax_bits, records)
    ax_duty.plot(t, [r.heater_duty for r in records], lw=1.0, label="heater duty")
    ax_duty.set_ylabel("duty [0..1]")
    ax_duty.set_ylim(-0.05, 1.05)
    ax_duty.legend(loc="best", fontsize=8)
    ax_duty.grid(True, alpha=0.3)

    lanes = [
        ("heater_on", [r.heater_on for r in records]),
        ("igniter", [r.igniter for r in records]),
        ("boiler_fans", [r.boiler_fans for r in records]),
        ("smoke_fan", [r.smoke_fan for r in records]),
        ("tray", [r.tray_pos for r in records]),
    ]
    for i, (name, values) in enumerate(lanes):
        offset = (len(lanes) - 1 - i) * 1.5
        ax_bits.step(t, [v + offset for v in values], where="post", lw=0.9)
        ax_bits.text(t[0], offset + 0.5, name, fontsize=8, va="center")
    ax_bits.set_xlabel("time [s]")
    ax_bits.set_yticks([])
    ax_bits.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
