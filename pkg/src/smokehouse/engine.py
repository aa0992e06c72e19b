"""Deterministic fixed-timestep run orchestrator.

Each control tick runs the same fixed order: sample sensors, advance the
sequencer, update the active controller, resolve actuators, integrate the
plant at the finer step, append one telemetry row. Two runs of the same
config produce byte-identical telemetry.
"""

import json
import math
import random
from dataclasses import dataclass, replace

from .control import (
    PidConfig,
    PidGains,
    PidState,
    RelayWindow,
    fan_hysteresis,
    pid_step,
    relay_modulate,
)
from .devices import (
    ActuatorBank,
    CombustionState,
    SensorModel,
    SensorReading,
    TrayActuator,
    apply_actuators,
    sensor_sample,
    tray_update,
)
from .errors import ConfigError, PlantDiverged, SmokehouseError
from .plant import PlantConfig, default_plant_config, initial_state, plant_step
from .sequencer import (
    ControlSelection,
    FaultCause,
    Phase,
    PhasePlan,
    TERMINAL_PHASES,
    plan_total_duration,
    sequencer_fault,
    sequencer_start,
    sequencer_step,
)

CSV_HEADER = (
    "t_s,phase,T_boiler_water,T_cook_zone,T_smoke_firebox,T_smoke_path,"
    "R_cook,R_smoke,heater_duty,heater_on,igniter,boiler_fans,smoke_fan,tray_pos"
)

# sensor name -> plant node it is mounted on
SENSOR_NODES = {"cook": "cook_zone", "smoke": "smoke_firebox"}


@dataclass(frozen=True)
class ControlConfig:
    cook_gains: PidGains = PidGains(kp=0.660771, ki=0.0431118, kd=6.59572)
    smoke_gains: PidGains = PidGains(kp=0.5, ki=0.005, kd=0.0)
    windup_limit: float = 1.0
    relay_window_s: float = 10.0
    smoke_hysteresis_c: float = 0.875  # 14 sensor counts: fan-off reading 64.0625
    fans_under_pid: bool = False  # hysteresis by default; PID path available
    overshoot_weight: float = 10.0  # tuner objective: IAE + weight*overshoot

    def validate(self, path: str = "control"):
        try:
            self.cook_gains.validate()
            self.smoke_gains.validate()
        except ValueError as exc:
            raise ConfigError(str(exc), f"{path}.gains") from exc
        if not (self.windup_limit > 0):
            raise ConfigError("windup_limit must be positive", f"{path}.windup_limit")
        if not (self.relay_window_s > 0):
            raise ConfigError("relay_window_s must be positive", f"{path}.relay_window_s")
        if not (self.smoke_hysteresis_c > 0):
            raise ConfigError(
                "smoke_hysteresis_c must be positive", f"{path}.smoke_hysteresis_c"
            )
        if self.overshoot_weight < 0:
            raise ConfigError(
                "overshoot_weight must be >= 0", f"{path}.overshoot_weight"
            )


@dataclass(frozen=True)
class DeviceConfig:
    sensor: SensorModel = SensorModel()
    tray: TrayActuator = TrayActuator()
    burn_duration_s: float = 3600.0  # sawdust burn covers smoke + dry

    def validate(self, path: str = "devices"):
        self.sensor.validate(f"{path}.sensor")
        self.tray.validate(f"{path}.tray")
        if not (self.burn_duration_s > 0):
            raise ConfigError(
                "burn_duration_s must be positive", f"{path}.burn_duration_s"
            )


@dataclass(frozen=True)
class StepConfig:
    plant_dt: float = 0.1
    control_dt: float = 1.0

    def validate(self, path: str = "steps"):
        if not (0.0 < self.plant_dt <= 1.0):
            raise ConfigError(
                f"plant_dt must be in (0, 1], got {self.plant_dt}", f"{path}.plant_dt"
            )
        if not (self.control_dt > 0):
            raise ConfigError("control_dt must be positive", f"{path}.control_dt")
        ratio = self.control_dt / self.plant_dt
        if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
            raise ConfigError(
                f"control_dt must be an integer multiple of plant_dt "
                f"({self.control_dt} / {self.plant_dt})",
                f"{path}.control_dt",
            )

    @property
    def substeps(self) -> int:
        return int(round(self.control_dt / self.plant_dt))


@dataclass(frozen=True)
class ScenarioConfig:
    plant: PlantConfig
    plan: PhasePlan = PhasePlan()
    control: ControlConfig = ControlConfig()
    devices: DeviceConfig = DeviceConfig()
    steps: StepConfig = StepConfig()
    seed: int = 0
    preset_name: str = "default"

    def violations(self) -> list[tuple[str, str]]:
        """All config problems as (dotted path, message) pairs; empty means
        the scenario is runnable."""
        found: list[tuple[str, str]] = []
        for check in (
            lambda: self.plan.validate("plan"),
            lambda: self.plant.validate("plant"),
            lambda: self.control.validate("control"),
            lambda: self.devices.validate("devices"),
            lambda: self.steps.validate("steps"),
            self._check_sensor_nodes,
        ):
            try:
                check()
            except ConfigError as exc:
                found.append((exc.path or "config", exc.message))
        return found

    def _check_sensor_nodes(self):
        names = self.plant.node_names()
        for sensor, node in SENSOR_NODES.items():
            if node not in names:
                raise ConfigError(
                    f"plant must declare node {node!r} for the {sensor} sensor",
                    "plant.nodes",
                )

    def ensure_valid(self):
        problems = self.violations()
        if problems:
            path, message = problems[0]
            raise ConfigError(message, path)


@dataclass(frozen=True)
class TelemetryRecord:
    t_s: float
    phase: str
    T_boiler_water: float
    T_cook_zone: float
    T_smoke_firebox: float
    T_smoke_path: float
    R_cook: float
    R_smoke: float
    heater_duty: float
    heater_on: int
    igniter: int
    boiler_fans: int
    smoke_fan: int
    tray_pos: float


@dataclass(frozen=True)
class PhaseControlStats:
    setpoint: float
    overshoot: float
    settling_time: float | None  # seconds into the phase; None = never settled
    time_in_band_fraction: float  # fraction of post-settling rows inside +-1
    band_fraction_whole: float  # fraction of the whole phase inside +-1


@dataclass(frozen=True)
class RunSummary:
    realized_durations: dict[str, float]
    sensor_extremes: dict[str, dict[str, tuple[float, float]]]
    control: dict[str, PhaseControlStats]
    transitions: tuple[tuple[float, str, str], ...]
    total_duration: float
    terminal_phase: str
    peak_cook_reading: float


def default_scenario() -> ScenarioConfig:
    """The calibrated machine with the stock one-hour plan."""
    return ScenarioConfig(plant=default_plant_config("milkfish"))


# Presets leave the boil on temperature, not on the default 300 s timer:
# batch size (the fish thermal load) then sets how long the boil runs,
# which is what spreads the four batch totals apart. The ceiling is a
# safety timeout only.
PRESET_BOIL_CEILING_S = 900.0


def preset_names() -> tuple[str, ...]:
    from .plant import PRESETS

    return tuple(sorted(PRESETS))


def preset_scenario(name: str) -> ScenarioConfig:
    if name not in preset_names():
        raise ConfigError(
            f"unknown preset {name!r}; expected one of {', '.join(preset_names())}"
        )
    return ScenarioConfig(
        plant=default_plant_config(name),
        plan=PhasePlan(boil_max=PRESET_BOIL_CEILING_S),
        preset_name=name,
    )


def run_scenario(
    config: ScenarioConfig,
    stop_after_phase: Phase | str | None = None,
) -> tuple[list[TelemetryRecord], RunSummary]:
    """Simulate one batch. Terminates at Done or Fault (or right after
    stop_after_phase completes); returns telemetry and its summary."""
    config.ensure_valid()
    stop_after = Phase(stop_after_phase) if isinstance(stop_after_phase, str) else stop_after_phase

    plan = config.plan
    plant_cfg = config.plant
    dt = config.steps.control_dt
    pdt = config.steps.plant_dt
    n_sub = config.steps.substeps
    sensor_model = config.devices.sensor

    state = initial_state(plant_cfg)
    seq = sequencer_start(plan)
    tray = config.devices.tray
    combustion = CombustionState(burn_duration=config.devices.burn_duration_s)
    rng = random.Random(config.seed)
    window = RelayWindow(config.control.relay_window_s, 0.0)
    cook_cfg = PidConfig(setpoint=plan.cook_setpoint, windup_limit=config.control.windup_limit)
    smoke_cfg = PidConfig(setpoint=plan.smoke_setpoint, windup_limit=config.control.windup_limit)
    pid_cook = PidState()
    pid_smoke = PidState()
    readings: dict[str, SensorReading | None] = {"cook": None, "smoke": None}
    smoke_fan_on = False
    duty_prev = 0.0
    records: list[TelemetryRecord] = []

    max_ticks = int((plan_total_duration(plan) + 900.0) / dt) + 16
    finished = False
    for k in range(max_ticks):
        t = k * dt
        temps = state.temperatures
        tray_pos = tray.position

        # 1. sense (noise drawn only when a fresh conversion is due, so the
        # random stream is untouched on held samples and when sigma is 0)
        for name in ("cook", "smoke"):
            last = readings[name]
            due = last is None or t - last.sample_time >= sensor_model.conversion_period
            noise = 0.0
            if due and sensor_model.noise_sigma > 0:
                noise = rng.gauss(0.0, sensor_model.noise_sigma)
            readings[name] = sensor_sample(
                temps[SENSOR_NODES[name]], sensor_model, t, last, noise
            )

        # 2. sequence
        prev_phase = seq.phase
        seq, bank, selection = sequencer_step(
            seq, readings, tray, plan, dt, heater_duty=duty_prev
        )
        if stop_after is not None and prev_phase == stop_after and seq.phase != stop_after:
            finished = True
            break
        if seq.phase != prev_phase:
            pid_cook = PidState()
            pid_smoke = PidState()

        # 3. control
        duty = 0.0
        smoke_fan_cmd = bank.smoke_fan
        if selection == ControlSelection.HEATER_FULL:
            duty = 1.0
        elif selection == ControlSelection.HEATER_PID:
            pid_cook, duty = pid_step(
                pid_cook, config.control.cook_gains, cook_cfg, readings["cook"].value, dt
            )
        elif selection == ControlSelection.SMOKE_FAN:
            if config.control.fans_under_pid:
                # reverse-acting loop: reflect the measurement about the
                # setpoint so a hot firebox drives the duty up, then treat
                # duty >= 0.5 as "fan on"
                mirrored = 2.0 * plan.smoke_setpoint - readings["smoke"].value
                pid_smoke, fan_duty = pid_step(
                    pid_smoke, config.control.smoke_gains, smoke_cfg, mirrored, dt
                )
                smoke_fan_on = fan_duty >= 0.5
            else:
                smoke_fan_on = fan_hysteresis(
                    readings["smoke"].value,
                    plan.smoke_setpoint,
                    config.control.smoke_hysteresis_c,
                    smoke_fan_on,
                )
            smoke_fan_cmd = smoke_fan_on

        # 4. actuate
        if smoke_fan_cmd != bank.smoke_fan:
            bank = replace(bank, smoke_fan=smoke_fan_cmd)
        inputs, combustion = apply_actuators(bank, plant_cfg, combustion, t)
        heater_allowed = bank.heater
        inputs_on = dict(inputs, heater=True)
        inputs_off = dict(inputs, heater=False)
        heater_on_now = heater_allowed and relay_modulate(duty, window, t)

        # 5. integrate
        for i in range(n_sub):
            ts = t + i * pdt
            on = heater_allowed and relay_modulate(duty, window, ts)
            try:
                state = plant_step(state, plant_cfg, inputs_on if on else inputs_off, pdt)
            except PlantDiverged:
                seq = sequencer_fault(seq, FaultCause.PlantDiverged)
                bank = ActuatorBank.fault_safe()
                duty = 0.0
                heater_on_now = False
                break
        tray = tray_update(tray, bank.tray_command, dt)

        # 6. record (temperatures and tray position are the start-of-tick
        # snapshot; phase and actuators are what ran during the tick)
        records.append(
            TelemetryRecord(
                t_s=t,
                phase=seq.phase.value,
                T_boiler_water=temps["boiler_water"],
                T_cook_zone=temps["cook_zone"],
                T_smoke_firebox=temps["smoke_firebox"],
                T_smoke_path=temps["smoke_path"],
                R_cook=readings["cook"].value,
                R_smoke=readings["smoke"].value,
                heater_duty=duty,
                heater_on=int(heater_on_now),
                igniter=int(bank.igniter),
                boiler_fans=int(any(bank.boiler_fans)),
                smoke_fan=int(bank.smoke_fan),
                tray_pos=tray_pos,
            )
        )
        duty_prev = duty
        if seq.phase in TERMINAL_PHASES:
            finished = True
            break

    if not finished:
        raise SmokehouseError(
            f"run exceeded its time budget ({max_ticks} ticks) without terminating"
        )
    return records, summarize(records, config)


_CONTROLLED = {
    Phase.Cook.value: ("R_cook", "cook_setpoint"),
    Phase.Smoke.value: ("R_smoke", "smoke_setpoint"),
}

REGULATION_BAND_C = 1.0  # +-1 degC regulation target for cook and smoke


def summarize(records: list[TelemetryRecord], config: ScenarioConfig) -> RunSummary:
    """Reduce telemetry to the run report: realized durations, per-phase
    extremes, regulation quality for the controlled phases."""
    if not records:
        raise ValueError("cannot summarize empty telemetry")
    dt = config.steps.control_dt

    durations: dict[str, float] = {}
    extremes: dict[str, dict[str, tuple[float, float]]] = {}
    transitions: list[tuple[float, str, str]] = []
    prev = None
    for rec in records:
        durations[rec.phase] = durations.get(rec.phase, 0.0) + dt
        ext = extremes.setdefault(
            rec.phase,
            {"R_cook": (rec.R_cook, rec.R_cook), "R_smoke": (rec.R_smoke, rec.R_smoke)},
        )
        for key, value in (("R_cook", rec.R_cook), ("R_smoke", rec.R_smoke)):
            lo, hi = ext[key]
            ext[key] = (min(lo, value), max(hi, value))
        if prev is not None and rec.phase != prev.phase:
            transitions.append((rec.t_s, prev.phase, rec.phase))
        prev = rec

    control: dict[str, PhaseControlStats] = {}
    for phase_name, (column, sp_field) in _CONTROLLED.items():
        values = [getattr(r, column) for r in records if r.phase == phase_name]
        if not values:
            continue
        setpoint = getattr(config.plan, sp_field)
        band = REGULATION_BAND_C
        in_band = [abs(v - setpoint) <= band for v in values]
        whole = sum(in_band) / len(in_band)
        # settling: first sample after the last out-of-band excursion
        settle_idx = 0
        for i in range(len(values) - 1, -1, -1):
            if not in_band[i]:
                settle_idx = i + 1
                break
        if settle_idx >= len(values) or not in_band[-1]:
            settling = None
            post = 0.0
        else:
            settling = settle_idx * dt
            tail = in_band[settle_idx:]
            post = sum(tail) / len(tail)
        control[phase_name] = PhaseControlStats(
            setpoint=setpoint,
            overshoot=max(0.0, max(v - setpoint for v in values)),
            settling_time=settling,
            time_in_band_fraction=post,
            band_fraction_whole=whole,
        )

    return RunSummary(
        realized_durations=durations,
        sensor_extremes=extremes,
        control=control,
        transitions=tuple(transitions),
        total_duration=len(records) * dt,
        terminal_phase=records[-1].phase,
        peak_cook_reading=max(r.R_cook for r in records),
    )


def verify_determinism(config: ScenarioConfig) -> bool:
    """Run the scenario twice and compare serialized telemetry bytes."""
    first, _ = run_scenario(config)
    second, _ = run_scenario(config)
    return telemetry_to_csv_bytes(first) == telemetry_to_csv_bytes(second)


def evaluate_gains(scenario: ScenarioConfig, phase_name: str, gains: PidGains) -> float:
    """Tuner objective: IAE over the tuned phase plus the weighted max
    overshoot, from a run stopped right after that phase."""
    if phase_name == "cook":
        config = replace(scenario, control=replace(scenario.control, cook_gains=gains))
        stop = Phase.Cook
        column, setpoint = "R_cook", scenario.plan.cook_setpoint
    elif phase_name == "smoke":
        config = replace(scenario, control=replace(scenario.control, smoke_gains=gains))
        stop = Phase.Smoke
        column, setpoint = "R_smoke", scenario.plan.smoke_setpoint
    else:
        raise ValueError(f"unknown phase {phase_name!r}")
    records, summary = run_scenario(config, stop_after_phase=stop)
    if summary.terminal_phase == Phase.Fault.value:
        return math.inf
    values = [getattr(r, column) for r in records if r.phase == stop.value]
    if not values:
        return math.inf
    dt = config.steps.control_dt
    iae = sum(abs(setpoint - v) for v in values) * dt
    overshoot = max(0.0, max(v - setpoint for v in values))
    return iae + scenario.control.overshoot_weight * overshoot


# --- telemetry serialization -------------------------------------------------


def _fmt_t(t: float) -> str:
    if t == int(t):
        return str(int(t))
    return f"{t:.3f}".rstrip("0").rstrip(".")


def telemetry_to_csv_bytes(records: list[TelemetryRecord]) -> bytes:
    lines = [CSV_HEADER]
    for r in records:
        lines.append(
            f"{_fmt_t(r.t_s)},{r.phase},"
            f"{r.T_boiler_water:.4f},{r.T_cook_zone:.4f},"
            f"{r.T_smoke_firebox:.4f},{r.T_smoke_path:.4f},"
            f"{r.R_cook:.4f},{r.R_smoke:.4f},"
            f"{r.heater_duty:.4f},{r.heater_on},{r.igniter},"
            f"{r.boiler_fans},{r.smoke_fan},{r.tray_pos:.4f}"
        )
    return ("\n".join(lines) + "\n").encode("ascii")


def write_telemetry_csv(records: list[TelemetryRecord], path) -> None:
    with open(path, "wb") as fh:
        fh.write(telemetry_to_csv_bytes(records))


def read_telemetry_csv(path) -> list[TelemetryRecord]:
    records = []
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().rstrip("\n")
        if header != CSV_HEADER:
            raise ConfigError(f"unexpected telemetry header: {header!r}")
        for lineno, line in enumerate(fh, start=2):
            parts = line.rstrip("\n").split(",")
            if len(parts) != 14:
                raise ConfigError(f"line {lineno}: expected 14 fields, got {len(parts)}")
            records.append(
                TelemetryRecord(
                    t_s=float(parts[0]),
                    phase=parts[1],
                    T_boiler_water=float(parts[2]),
                    T_cook_zone=float(parts[3]),
                    T_smoke_firebox=float(parts[4]),
                    T_smoke_path=float(parts[5]),
                    R_cook=float(parts[6]),
                    R_smoke=float(parts[7]),
                    heater_duty=float(parts[8]),
                    heater_on=int(parts[9]),
                    igniter=int(parts[10]),
                    boiler_fans=int(parts[11]),
                    smoke_fan=int(parts[12]),
                    tray_pos=float(parts[13]),
                )
            )
    return records


# --- summary rendering -------------------------------------------------------


def _fmt_minutes(seconds: float) -> str:
    return f"{seconds / 60.0:.1f} min"


def summary_text(summary: RunSummary, preset_name: str = "") -> str:
    title = "Run summary" + (f" ({preset_name})" if preset_name else "")
    lines = [title, "-" * max(30, len(title))]
    lines.append(f"terminal phase   {summary.terminal_phase}")
    lines.append(
        f"total duration   {summary.total_duration:.0f} s"
        f" ({_fmt_minutes(summary.total_duration)})"
    )
    lines.append(f"peak cook zone   {summary.peak_cook_reading:.4f} C")
    lines.append("phase durations:")
    for phase, dur in summary.realized_durations.items():
        ext = summary.sensor_extremes[phase]
        lines.append(
            f"  {phase:<10} {dur:7.0f} s   cook {ext['R_cook'][0]:7.2f}..{ext['R_cook'][1]:7.2f} C"
            f"   smoke {ext['R_smoke'][0]:7.2f}..{ext['R_smoke'][1]:7.2f} C"
        )
    if summary.control:
        lines.append("regulation:")
        for phase, stats in summary.control.items():
            settling = (
                f"{stats.settling_time:.0f} s" if stats.settling_time is not None else "never"
            )
            lines.append(
                f"  {phase:<6} setpoint {stats.setpoint:.1f} C"
                f"  overshoot {stats.overshoot:.3f} C"
                f"  settling {settling}"
                f"  in-band {stats.band_fraction_whole * 100.0:.1f}% of phase"
            )
    if summary.transitions:
        lines.append("transitions:")
        for t, src, dst in summary.transitions:
            lines.append(f"  t={t:7.0f} s  {src} -> {dst}")
    return "\n".join(lines)


def summary_keyvalues(summary: RunSummary) -> str:
    pairs: list[tuple[str, str]] = [
        ("terminal_phase", summary.terminal_phase),
        ("total_duration_s", f"{summary.total_duration:.0f}"),
        ("peak_cook_reading_C", f"{summary.peak_cook_reading:.4f}"),
    ]
    for phase, dur in summary.realized_durations.items():
        pairs.append((f"duration_{phase}_s", f"{dur:.0f}"))
    for phase, stats in summary.control.items():
        pairs.append((f"overshoot_{phase}_C", f"{stats.overshoot:.4f}"))
        pairs.append(
            (
                f"settling_{phase}_s",
                "nan" if stats.settling_time is None else f"{stats.settling_time:.0f}",
            )
        )
        pairs.append((f"in_band_{phase}", f"{stats.time_in_band_fraction:.4f}"))
        pairs.append((f"band_fraction_{phase}", f"{stats.band_fraction_whole:.4f}"))
    return "\n".join(f"{k}={v}" for k, v in pairs)


# --- scenario (de)serialization ----------------------------------------------


def scenario_to_dict(config: ScenarioConfig) -> dict:
    return {
        "preset_name": config.preset_name,
        "seed": config.seed,
        "steps": {"plant_dt": config.steps.plant_dt, "control_dt": config.steps.control_dt},
        "plan": {
            "boil_max": config.plan.boil_max,
            "cook": config.plan.cook,
            "smoke": config.plan.smoke,
            "dry": config.plan.dry,
            "boil_target": config.plan.boil_target,
            "cook_setpoint": config.plan.cook_setpoint,
            "smoke_setpoint": config.plan.smoke_setpoint,
            "cook_band": list(config.plan.cook_band),
            "smoke_band": list(config.plan.smoke_band),
            "overtemp_limit": config.plan.overtemp_limit,
            "ignite_s": config.plan.ignite_s,
            "stuck_window_s": config.plan.stuck_window_s,
            "stuck_margin_c": config.plan.stuck_margin_c,
        },
        "control": {
            "cook_gains": dict(zip("kp ki kd".split(), config.control.cook_gains.as_tuple())),
            "smoke_gains": dict(zip("kp ki kd".split(), config.control.smoke_gains.as_tuple())),
            "windup_limit": config.control.windup_limit,
            "relay_window_s": config.control.relay_window_s,
            "smoke_hysteresis_c": config.control.smoke_hysteresis_c,
            "fans_under_pid": config.control.fans_under_pid,
            "overshoot_weight": config.control.overshoot_weight,
        },
        "devices": {
            "sensor": {
                "resolution": config.devices.sensor.resolution,
                "conversion_period": config.devices.sensor.conversion_period,
                "noise_sigma": config.devices.sensor.noise_sigma,
                "range_low": config.devices.sensor.range_low,
                "range_high": config.devices.sensor.range_high,
            },
            "tray": {
                "steps_per_rev": config.devices.tray.steps_per_rev,
                "driver_pulley_diameter": config.devices.tray.driver_pulley_diameter,
                "belt_speed": config.devices.tray.belt_speed,
                "travel": config.devices.tray.travel,
            },
            "burn_duration_s": config.devices.burn_duration_s,
        },
        "plant": {
            "ambient": config.plant.ambient,
            "fish_thermal_load": config.plant.fish_thermal_load,
            "nodes": [
                {"name": n.name, "heat_capacity": n.heat_capacity, "temperature": n.temperature}
                for n in config.plant.nodes
            ],
            "conductances": [
                {
                    "node_a": c.node_a,
                    "node_b": c.node_b,
                    "base_value": c.base_value,
                    "fan_multiplier": c.fan_multiplier,
                    "fan": c.fan,
                }
                for c in config.plant.conductances
            ],
            "sources": [
                {"node": s.node, "power": s.power, "driven_by": s.driven_by}
                for s in config.plant.sources
            ],
        },
    }


def _require_keys(data: dict, allowed: set[str], path: str):
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(sorted(unknown))}", path)


def _section(data: dict, key: str) -> dict:
    value = data.get(key, {})
    if not isinstance(value, dict):
        raise ConfigError(f"section must be an object, got {type(value).__name__}", key)
    return value


def _gains(data: dict, default: PidGains, path: str) -> PidGains:
    _require_keys(data, {"kp", "ki", "kd"}, path)
    return PidGains(
        kp=float(data.get("kp", default.kp)),
        ki=float(data.get("ki", default.ki)),
        kd=float(data.get("kd", default.kd)),
    )


def scenario_from_dict(data: dict) -> ScenarioConfig:
    """Build a scenario from parsed JSON. Unknown keys anywhere are errors
    so typos never silently fall back to defaults."""
    from .plant import Conductance, HeatSource, ThermalNode

    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    _require_keys(
        data,
        {"preset_name", "seed", "steps", "plan", "control", "devices", "plant"},
        "config",
    )
    defaults = default_scenario()

    steps_d = _section(data, "steps")
    _require_keys(steps_d, {"plant_dt", "control_dt"}, "steps")
    steps = StepConfig(
        plant_dt=float(steps_d.get("plant_dt", defaults.steps.plant_dt)),
        control_dt=float(steps_d.get("control_dt", defaults.steps.control_dt)),
    )

    plan_d = _section(data, "plan")
    plan_fields = {
        "boil_max", "cook", "smoke", "dry", "boil_target", "cook_setpoint",
        "smoke_setpoint", "cook_band", "smoke_band", "overtemp_limit",
        "ignite_s", "stuck_window_s", "stuck_margin_c",
    }
    _require_keys(plan_d, plan_fields, "plan")
    dp = defaults.plan
    plan = PhasePlan(
        boil_max=float(plan_d.get("boil_max", dp.boil_max)),
        cook=float(plan_d.get("cook", dp.cook)),
        smoke=float(plan_d.get("smoke", dp.smoke)),
        dry=float(plan_d.get("dry", dp.dry)),
        boil_target=float(plan_d.get("boil_target", dp.boil_target)),
        cook_setpoint=float(plan_d.get("cook_setpoint", dp.cook_setpoint)),
        smoke_setpoint=float(plan_d.get("smoke_setpoint", dp.smoke_setpoint)),
        cook_band=tuple(float(v) for v in plan_d.get("cook_band", dp.cook_band)),
        smoke_band=tuple(float(v) for v in plan_d.get("smoke_band", dp.smoke_band)),
        overtemp_limit=float(plan_d.get("overtemp_limit", dp.overtemp_limit)),
        ignite_s=float(plan_d.get("ignite_s", dp.ignite_s)),
        stuck_window_s=float(plan_d.get("stuck_window_s", dp.stuck_window_s)),
        stuck_margin_c=float(plan_d.get("stuck_margin_c", dp.stuck_margin_c)),
    )

    control_d = _section(data, "control")
    _require_keys(
        control_d,
        {
            "cook_gains", "smoke_gains", "windup_limit", "relay_window_s",
            "smoke_hysteresis_c", "fans_under_pid", "overshoot_weight",
        },
        "control",
    )
    dc = defaults.control
    control = ControlConfig(
        cook_gains=_gains(control_d.get("cook_gains", {}), dc.cook_gains, "control.cook_gains"),
        smoke_gains=_gains(
            control_d.get("smoke_gains", {}), dc.smoke_gains, "control.smoke_gains"
        ),
        windup_limit=float(control_d.get("windup_limit", dc.windup_limit)),
        relay_window_s=float(control_d.get("relay_window_s", dc.relay_window_s)),
        smoke_hysteresis_c=float(
            control_d.get("smoke_hysteresis_c", dc.smoke_hysteresis_c)
        ),
        fans_under_pid=bool(control_d.get("fans_under_pid", dc.fans_under_pid)),
        overshoot_weight=float(control_d.get("overshoot_weight", dc.overshoot_weight)),
    )

    devices_d = _section(data, "devices")
    _require_keys(devices_d, {"sensor", "tray", "burn_duration_s"}, "devices")
    sensor_d = _section(devices_d, "sensor")
    _require_keys(
        sensor_d,
        {"resolution", "conversion_period", "noise_sigma", "range_low", "range_high"},
        "devices.sensor",
    )
    ds = defaults.devices.sensor
    sensor = SensorModel(
        resolution=float(sensor_d.get("resolution", ds.resolution)),
        conversion_period=float(sensor_d.get("conversion_period", ds.conversion_period)),
        noise_sigma=float(sensor_d.get("noise_sigma", ds.noise_sigma)),
        range_low=float(sensor_d.get("range_low", ds.range_low)),
        range_high=float(sensor_d.get("range_high", ds.range_high)),
    )
    tray_d = _section(devices_d, "tray")
    _require_keys(
        tray_d, {"steps_per_rev", "driver_pulley_diameter", "belt_speed", "travel"}, "devices.tray"
    )
    dtr = defaults.devices.tray
    tray = TrayActuator(
        steps_per_rev=int(tray_d.get("steps_per_rev", dtr.steps_per_rev)),
        driver_pulley_diameter=float(
            tray_d.get("driver_pulley_diameter", dtr.driver_pulley_diameter)
        ),
        belt_speed=float(tray_d.get("belt_speed", dtr.belt_speed)),
        travel=float(tray_d.get("travel", dtr.travel)),
    )
    devices = DeviceConfig(
        sensor=sensor,
        tray=tray,
        burn_duration_s=float(
            devices_d.get("burn_duration_s", defaults.devices.burn_duration_s)
        ),
    )

    plant_d = _section(data, "plant")
    if plant_d:
        _require_keys(
            plant_d,
            {"ambient", "fish_thermal_load", "nodes", "conductances", "sources"},
            "plant",
        )
        for key in ("ambient", "nodes", "conductances", "sources"):
            if key not in plant_d:
                raise ConfigError(f"missing required key {key!r}", "plant")
        nodes = []
        for i, n in enumerate(plant_d["nodes"]):
            _require_keys(n, {"name", "heat_capacity", "temperature"}, f"plant.nodes[{i}]")
            nodes.append(
                ThermalNode(
                    name=str(n["name"]),
                    heat_capacity=float(n["heat_capacity"]),
                    temperature=float(n["temperature"]),
                )
            )
        conductances = []
        for i, c in enumerate(plant_d["conductances"]):
            _require_keys(
                c,
                {"node_a", "node_b", "base_value", "fan_multiplier", "fan"},
                f"plant.conductances[{i}]",
            )
            conductances.append(
                Conductance(
                    node_a=str(c["node_a"]),
                    node_b=str(c["node_b"]),
                    base_value=float(c["base_value"]),
                    fan_multiplier=float(c.get("fan_multiplier", 1.0)),
                    fan=c.get("fan"),
                )
            )
        sources = []
        for i, s in enumerate(plant_d["sources"]):
            _require_keys(s, {"node", "power", "driven_by"}, f"plant.sources[{i}]")
            sources.append(
                HeatSource(
                    node=str(s["node"]), power=float(s["power"]), driven_by=str(s["driven_by"])
                )
            )
        plant = PlantConfig(
            nodes=tuple(nodes),
            conductances=tuple(conductances),
            sources=tuple(sources),
            ambient=float(plant_d["ambient"]),
            fish_thermal_load=float(plant_d.get("fish_thermal_load", 0.0)),
        )
    else:
        plant = defaults.plant

    return ScenarioConfig(
        plant=plant,
        plan=plan,
        control=control,
        devices=devices,
        steps=steps,
        seed=int(data.get("seed", 0)),
        preset_name=str(data.get("preset_name", "custom")),
    )


def scenario_from_file(path) -> ScenarioConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    return scenario_from_dict(data)


def apply_overrides(data: dict, overrides: list[str]) -> dict:
    """Apply repeatable --set key=value entries onto a config dict. Paths
    are dotted; list elements are addressed by integer index. Overriding a
    path that does not already exist is an error, never a silent add."""
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must look like path=value, got {item!r}")
        raw_path, raw_value = item.split("=", 1)
        parts = raw_path.strip().split(".")
        try:
            value = json.loads(raw_value)
        except json.JSONDecodeError:
            value = raw_value  # bare strings are fine
        node = data
        for depth, part in enumerate(parts):
            last = depth == len(parts) - 1
            key: int | str = part
            if isinstance(node, list):
                if not part.lstrip("-").isdigit():
                    raise ConfigError(
                        f"list index expected at {'.'.join(parts[: depth + 1])}", raw_path
                    )
                key = int(part)
                if not (0 <= key < len(node)):
                    raise ConfigError(f"index {key} out of range", raw_path)
            elif isinstance(node, dict):
                if part not in node:
                    raise ConfigError(f"unknown config path {raw_path!r}", raw_path)
            else:
                raise ConfigError(
                    f"cannot descend into {'.'.join(parts[:depth])}", raw_path
                )
            if last:
                node[key] = value
            else:
                node = node[key]
    return data
