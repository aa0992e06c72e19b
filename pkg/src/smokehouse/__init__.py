"""Deterministic software twin of a boiler/smoker fish-processing machine.

The package simulates the whole appliance: a four-node thermal plant, the
temperature sensors and actuators hanging off the controller, the phase
sequencer that walks a batch from water boil to final drying, and the PID
and hysteresis loops that hold the cook and smoke temperatures. A small
mechanics module sizes the tray lift and its belt drive. Everything is
fixed-step and seeded, so identical configs produce identical telemetry.
"""

from .control import (
    PidConfig,
    PidGains,
    PidState,
    RelayWindow,
    fan_hysteresis,
    pid_step,
    relay_modulate,
    tune_gains,
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
from .engine import (
    ControlConfig,
    DeviceConfig,
    RunSummary,
    ScenarioConfig,
    StepConfig,
    TelemetryRecord,
    default_scenario,
    evaluate_gains,
    preset_scenario,
    read_telemetry_csv,
    run_scenario,
    scenario_from_dict,
    scenario_from_file,
    scenario_to_dict,
    summarize,
    verify_determinism,
    write_telemetry_csv,
)
from .errors import (
    ConfigError,
    ControllerFault,
    NoEquilibrium,
    PlantDiverged,
    SmokehouseError,
)
from .mechanics import (
    BeltDrive,
    LoadSpec,
    PulleySpec,
    belt_length,
    belt_power,
    belt_tension,
    belt_velocity,
    design_report,
    driven_speed,
    lifting_forces,
    reference_design,
    required_torque,
)
from .plant import (
    Conductance,
    HeatSource,
    PlantConfig,
    PlantState,
    ThermalNode,
    default_plant_config,
    equilibrium_temps,
    initial_state,
    plant_step,
)
from .sequencer import (
    ControlSelection,
    FaultCause,
    Phase,
    PhasePlan,
    SequencerState,
    plan_total_duration,
    sequencer_fault,
    sequencer_start,
    sequencer_step,
)

__version__ = "1.0.0"

__all__ = [
    "ActuatorBank",
    "BeltDrive",
    "CombustionState",
    "Conductance",
    "ConfigError",
    "ControlConfig",
    "ControlSelection",
    "ControllerFault",
    "DeviceConfig",
    "FaultCause",
    "HeatSource",
    "LoadSpec",
    "NoEquilibrium",
    "Phase",
    "PhasePlan",
    "PidConfig",
    "PidGains",
    "PidState",
    "PlantConfig",
    "PlantDiverged",
    "PlantState",
    "PulleySpec",
    "RelayWindow",
    "RunSummary",
    "ScenarioConfig",
    "SensorModel",
    "SensorReading",
    "SequencerState",
    "SmokehouseError",
    "StepConfig",
    "TelemetryRecord",
    "ThermalNode",
    "TrayActuator",
    "apply_actuators",
    "belt_length",
    "belt_power",
    "belt_tension",
    "belt_velocity",
    "default_plant_config",
    "default_scenario",
    "design_report",
    "driven_speed",
    "equilibrium_temps",
    "evaluate_gains",
    "fan_hysteresis",
    "initial_state",
    "lifting_forces",
    "pid_step",
    "plan_total_duration",
    "plant_step",
    "preset_scenario",
    "read_telemetry_csv",
    "reference_design",
    "relay_modulate",
    "required_torque",
    "run_scenario",
    "scenario_from_dict",
    "scenario_from_file",
    "scenario_to_dict",
    "sensor_sample",
    "sequencer_fault",
    "sequencer_start",
    "sequencer_step",
    "summarize",
    "tray_update",
    "tune_gains",
    "verify_determinism",
    "write_telemetry_csv",
]
