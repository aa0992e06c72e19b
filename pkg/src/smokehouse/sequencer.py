"""Process state machine.

Runs the batch through Idle -> LowerTray -> BoilWater -> Cook ->
RaiseTray -> Ignite -> Smoke -> Dry -> Done, with a Fault state reachable
from every non-terminal phase. The sequencer owns phase timers and safety
interlocks and tells the engine which controller is active; it never
touches the plant directly.
"""

import enum
from dataclasses import dataclass, replace

from .errors import ConfigError
from .devices import ActuatorBank, SensorReading, TrayActuator


class Phase(enum.Enum):
    Idle = "Idle"
    LowerTray = "LowerTray"
    BoilWater = "BoilWater"
    Cook = "Cook"
    RaiseTray = "RaiseTray"
    Ignite = "Ignite"
    Smoke = "Smoke"
    Dry = "Dry"
    Done = "Done"
    Fault = "Fault"


#: canonical phase order for prefix checks; Fault is deliberately absent
PHASE_ORDER = (
    Phase.Idle,
    Phase.LowerTray,
    Phase.BoilWater,
    Phase.Cook,
    Phase.RaiseTray,
    Phase.Ignite,
    Phase.Smoke,
    Phase.Dry,
    Phase.Done,
)

TERMINAL_PHASES = (Phase.Done, Phase.Fault)


class FaultCause(enum.Enum):
    SensorInvalid = "SensorInvalid"
    SensorStuck = "SensorStuck"
    Overtemp = "Overtemp"
    PlantDiverged = "PlantDiverged"


class ControlSelection(enum.Enum):
    NONE = "none"
    HEATER_FULL = "heater_full"  # boil: heater runs flat out
    HEATER_PID = "heater_pid"  # cook: PID holds the cook setpoint
    SMOKE_FAN = "smoke_fan"  # smoke: exhaust fan regulates the firebox


@dataclass(frozen=True)
class PhasePlan:
    boil_max: float = 300.0  # ceiling on water heat-up, seconds
    cook: float = 1200.0
    smoke: float = 900.0
    dry: float = 1200.0
    boil_target: float = 98.0  # leave boil early once the zone reads this
    cook_setpoint: float = 85.0
    smoke_setpoint: float = 65.0
    cook_band: tuple[float, float] = (75.0, 90.0)
    smoke_band: tuple[float, float] = (60.0, 70.0)
    overtemp_limit: float = 110.0
    ignite_s: float = 5.0  # igniter pulse length
    # stuck-sensor watch: reading frozen this long under real heater load
    # trips a fault, but only when far from the active target, because a
    # well-regulated loop legitimately parks the reading on one count
    stuck_window_s: float = 60.0
    stuck_margin_c: float = 3.0

    def validate(self, path: str = "plan"):
        for name in ("boil_max", "cook", "smoke", "dry", "ignite_s"):
            if not (getattr(self, name) > 0):
                raise ConfigError(
                    f"{name} must be positive, got {getattr(self, name)}",
                    f"{path}.{name}",
                )
        lo, hi = self.cook_band
        if not (lo < hi):
            raise ConfigError("cook_band must be (low, high)", f"{path}.cook_band")
        if not (lo <= self.cook_setpoint <= hi):
            raise ConfigError(
                f"cook_setpoint {self.cook_setpoint} outside band [{lo}, {hi}]",
                f"{path}.cook_setpoint",
            )
        lo, hi = self.smoke_band
        if not (lo < hi):
            raise ConfigError("smoke_band must be (low, high)", f"{path}.smoke_band")
        if not (lo <= self.smoke_setpoint <= hi):
            raise ConfigError(
                f"smoke_setpoint {self.smoke_setpoint} outside band [{lo}, {hi}]",
                f"{path}.smoke_setpoint",
            )
        # only the regulation setpoints must clear the limit; boil_target may
        # sit above it, in which case the boil trips an overtemp fault
        if not (self.overtemp_limit > max(self.cook_setpoint, self.smoke_setpoint)):
            raise ConfigError(
                f"overtemp_limit {self.overtemp_limit} does not clear the setpoints",
                f"{path}.overtemp_limit",
            )
        if not (self.stuck_window_s > 0) or not (self.stuck_margin_c > 0):
            raise ConfigError(
                "stuck_window_s and stuck_margin_c must be positive", f"{path}"
            )


@dataclass(frozen=True)
class SequencerState:
    phase: Phase = Phase.Idle
    phase_elapsed: float = 0.0
    total_elapsed: float = 0.0
    fault_cause: FaultCause | None = None
    tray_target: str = "hold"
    # stuck-sensor bookkeeping
    last_cook_value: float | None = None
    unchanged_s: float = 0.0


def sequencer_start(plan: PhasePlan) -> SequencerState:
    """Validate the plan and return the Idle state; the first step after
    this enters LowerTray."""
    plan.validate()
    return SequencerState()


def sequencer_fault(state: SequencerState, cause: FaultCause) -> SequencerState:
    """Force the machine into Fault (used by the engine for conditions the
    sequencer cannot observe itself, like plant divergence)."""
    return replace(
        state,
        phase=Phase.Fault,
        fault_cause=cause,
        phase_elapsed=0.0,
        tray_target="hold",
    )


def plan_total_duration(plan: PhasePlan) -> float:
    """Upper bound on the timed portion of a run: boil ceiling plus the
    fixed cook, smoke, and dry durations (tray moves and the igniter pulse
    are excluded; realized boil time may be shorter than boil_max)."""
    return plan.boil_max + plan.cook + plan.smoke + plan.dry


_PHASE_BANKS = {
    Phase.Idle: ActuatorBank(),
    Phase.LowerTray: ActuatorBank(tray_command="lower"),
    Phase.BoilWater: ActuatorBank(heater=True),
    Phase.Cook: ActuatorBank(heater=True),
    Phase.RaiseTray: ActuatorBank(tray_command="raise"),
    Phase.Ignite: ActuatorBank(igniter=True),
    Phase.Smoke: ActuatorBank(),  # smoke fan is controller-owned
    Phase.Dry: ActuatorBank(boiler_fans=(True,) * 4, smoke_fan=True),
    Phase.Done: ActuatorBank(),
    Phase.Fault: ActuatorBank.fault_safe(),
}

_PHASE_SELECTIONS = {
    Phase.BoilWater: ControlSelection.HEATER_FULL,
    Phase.Cook: ControlSelection.HEATER_PID,
    Phase.Smoke: ControlSelection.SMOKE_FAN,
}


def _active_target(phase: Phase, plan: PhasePlan) -> float:
    if phase == Phase.BoilWater:
        return plan.boil_target
    return plan.cook_setpoint


def sequencer_step(
    state: SequencerState,
    readings: dict[str, SensorReading],
    tray: TrayActuator,
    plan: PhasePlan,
    dt: float,
    heater_duty: float = 0.0,
) -> tuple[SequencerState, ActuatorBank, ControlSelection]:
    """Advance timers, apply safety checks, and resolve phase transitions.

    readings must contain 'cook' and 'smoke'. heater_duty is the previous
    tick's duty, used by the stuck-sensor watch. Faults are states, not
    exceptions: the returned bank is already safe.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    for key in ("cook", "smoke"):
        if key not in readings:
            raise ConfigError(f"readings missing {key!r} sensor")

    if state.phase in TERMINAL_PHASES:
        return state, _PHASE_BANKS[state.phase], ControlSelection.NONE

    cook = readings["cook"]
    smoke = readings["smoke"]
    elapsed = state.phase_elapsed + dt
    total = state.total_elapsed + dt

    # stuck-sensor bookkeeping runs every tick so the window spans ticks
    if state.last_cook_value is not None and cook.value == state.last_cook_value:
        unchanged = state.unchanged_s + dt
    else:
        unchanged = 0.0

    def fault(cause: FaultCause) -> tuple[SequencerState, ActuatorBank, ControlSelection]:
        new = SequencerState(
            phase=Phase.Fault,
            phase_elapsed=0.0,
            total_elapsed=total,
            fault_cause=cause,
            tray_target="hold",
            last_cook_value=cook.value,
            unchanged_s=unchanged,
        )
        return new, ActuatorBank.fault_safe(), ControlSelection.NONE

    if not cook.valid or not smoke.valid:
        return fault(FaultCause.SensorInvalid)
    if cook.value > plan.overtemp_limit or smoke.value > plan.overtemp_limit:
        return fault(FaultCause.Overtemp)
    if (
        unchanged > plan.stuck_window_s
        and heater_duty > 0.5
        and abs(cook.value - _active_target(state.phase, plan)) > plan.stuck_margin_c
    ):
        return fault(FaultCause.SensorStuck)

    phase = state.phase
    if phase == Phase.Idle:
        phase = Phase.LowerTray
    elif phase == Phase.LowerTray:
        if tray.position >= 1.0:
            phase = Phase.BoilWater
    elif phase == Phase.BoilWater:
        if cook.value >= plan.boil_target or elapsed >= plan.boil_max:
            phase = Phase.Cook
    elif phase == Phase.Cook:
        if elapsed >= plan.cook:
            phase = Phase.RaiseTray
    elif phase == Phase.RaiseTray:
        if tray.position <= 0.0:
            phase = Phase.Ignite
    elif phase == Phase.Ignite:
        if elapsed >= plan.ignite_s:
            phase = Phase.Smoke
    elif phase == Phase.Smoke:
        if elapsed >= plan.smoke:
            phase = Phase.Dry
    elif phase == Phase.Dry:
        if elapsed >= plan.dry:
            phase = Phase.Done

    if phase is not state.phase:
        elapsed = 0.0
        unchanged = 0.0

    bank = _PHASE_BANKS[phase]
    new_state = SequencerState(
        phase=phase,
        phase_elapsed=elapsed,
        total_elapsed=total,
        fault_cause=None,
        tray_target=bank.tray_command,
        last_cook_value=cook.value,
        unchanged_s=unchanged,
    )
    return new_state, bank, _PHASE_SELECTIONS.get(phase, ControlSelection.NONE)
