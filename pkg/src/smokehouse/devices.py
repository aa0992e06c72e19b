"""Sensor and actuator hardware models.

The temperature sensor quantizes to 1/16 degC steps and holds its last
conversion for 0.75 s, matching the behavior of the real probe. The tray
lift moves at the belt speed derived from the drive design. The actuator
bank translates sequencer commands into the on/off input map the plant
integrates under, including the sawdust combustion latch (one igniter
pulse lights a burn that outlives the pulse).
"""

import math
from dataclasses import dataclass, replace

from .errors import ConfigError
from .mechanics import belt_velocity


@dataclass(frozen=True)
class SensorModel:
    resolution: float = 0.0625  # degC per count; 2**-4 is exactly representable
    conversion_period: float = 0.75  # seconds per conversion
    noise_sigma: float = 0.0  # optional seeded Gaussian, degC
    range_low: float = -55.0
    range_high: float = 125.0

    def validate(self, path: str = "sensor"):
        if not (self.resolution > 0):
            raise ConfigError(f"resolution must be positive, got {self.resolution}", path)
        if not (self.conversion_period > 0):
            raise ConfigError(
                f"conversion_period must be positive, got {self.conversion_period}", path
            )
        if self.noise_sigma < 0:
            raise ConfigError(f"noise_sigma must be >= 0, got {self.noise_sigma}", path)
        if not (self.range_low < self.range_high):
            raise ConfigError("range_low must be < range_high", path)


@dataclass(frozen=True)
class SensorReading:
    value: float  # quantized degC
    sample_time: float
    valid: bool


def sensor_sample(
    true_temp: float,
    model: SensorModel,
    t: float,
    last: SensorReading | None,
    noise: float = 0.0,
) -> SensorReading:
    """Quantized sample-and-hold conversion.

    Returns the previous reading unchanged until conversion_period has
    passed; out-of-range conversions are flagged invalid, not raised.
    noise is injected by the caller so the random stream stays owned by
    one place.
    """
    if last is not None:
        if t < last.sample_time:
            raise ValueError(f"time went backwards: {t} < {last.sample_time}")
        if t - last.sample_time < model.conversion_period:
            return last
    counts = round((true_temp + noise) / model.resolution)
    value = counts * model.resolution
    valid = model.range_low <= value <= model.range_high and math.isfinite(value)
    return SensorReading(value=value, sample_time=t, valid=valid)


@dataclass(frozen=True)
class TrayActuator:
    """Tray lift state. position runs 0 (raised) to 1 (lowered)."""

    steps_per_rev: int = 200
    driver_pulley_diameter: float = 0.03
    belt_speed: float = belt_velocity(0.06, 25.0)  # m/s, from the drive design
    travel: float = 0.30  # meters of tray motion end to end
    position: float = 0.0
    moving: bool = False

    def validate(self, path: str = "tray"):
        if self.steps_per_rev < 1:
            raise ConfigError(f"steps_per_rev must be >= 1, got {self.steps_per_rev}", path)
        if not (self.driver_pulley_diameter > 0):
            raise ConfigError("driver_pulley_diameter must be positive", path)
        if not (self.belt_speed > 0):
            raise ConfigError(f"belt_speed must be positive, got {self.belt_speed}", path)
        if not (self.travel > 0):
            raise ConfigError(f"travel must be positive, got {self.travel}", path)
        if not (0.0 <= self.position <= 1.0):
            raise ConfigError(f"position {self.position} outside [0, 1]", path)

    @property
    def traverse_time(self) -> float:
        """Seconds for a full raise or lower."""
        return self.travel / self.belt_speed

    @property
    def motor_steps(self) -> int:
        """Cumulative stepper steps to reach the current position (telemetry
        convenience; the motor itself is modeled kinematically)."""
        revs = (self.position * self.travel) / (math.pi * self.driver_pulley_diameter)
        return round(revs * self.steps_per_rev)


def tray_update(actuator: TrayActuator, command: str, dt: float) -> TrayActuator:
    """Move the tray toward the commanded endpoint at constant speed."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if command == "hold":
        return replace(actuator, moving=False)
    if command == "lower":
        target = 1.0
    elif command == "raise":
        target = 0.0
    else:
        raise ValueError(f"unknown tray command {command!r}")
    rate = actuator.belt_speed / actuator.travel  # position fraction per second
    if target > actuator.position:
        position = min(target, actuator.position + rate * dt)
    else:
        position = max(target, actuator.position - rate * dt)
    return replace(actuator, position=position, moving=position != target)


@dataclass(frozen=True)
class ActuatorBank:
    """One tick's worth of actuator commands from the sequencer."""

    heater: bool = False
    igniter: bool = False
    boiler_fans: tuple[bool, bool, bool, bool] = (False, False, False, False)
    smoke_fan: bool = False
    tray_command: str = "hold"

    @classmethod
    def all_off(cls) -> "ActuatorBank":
        return cls()

    @classmethod
    def fault_safe(cls) -> "ActuatorBank":
        # heater and igniter locked out, every fan venting
        return cls(boiler_fans=(True, True, True, True), smoke_fan=True)


@dataclass(frozen=True)
class CombustionState:
    """Latched sawdust burn: one igniter pulse lights it, and it keeps
    burning for burn_duration seconds regardless of the igniter."""

    burn_duration: float = 3600.0
    burning: bool = False
    lit_at: float = 0.0

    def validate(self, path: str = "combustion"):
        if not (self.burn_duration > 0):
            raise ConfigError(
                f"burn_duration must be positive, got {self.burn_duration}", path
            )


def apply_actuators(
    bank: ActuatorBank,
    config,
    combustion: CombustionState,
    t: float,
) -> tuple[dict, CombustionState]:
    """Translate an ActuatorBank into the plant's actuator input map and
    advance the combustion latch. Raises ConfigError if the plant declares
    an actuator this bank cannot drive."""
    if combustion.burning and t - combustion.lit_at >= combustion.burn_duration:
        combustion = replace(combustion, burning=False)
    if bank.igniter and not combustion.burning:
        combustion = replace(combustion, burning=True, lit_at=t)
    inputs = {
        "heater": bank.heater,
        "igniter": combustion.burning or bank.igniter,
        "boiler_fans": any(bank.boiler_fans),
        "smoke_fan": bank.smoke_fan,
    }
    unknown = [a for a in config.actuator_names() if a not in inputs]
    if unknown:
        raise ConfigError(f"plant references undeclared actuators: {', '.join(unknown)}")
    return inputs, combustion
