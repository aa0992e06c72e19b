"""Temperature control primitives.

A discrete positional PID drives the heater through a time-proportioning
relay window; the smoke-chamber exhaust fan runs on plain hysteresis by
default (a config switch can put it under PID instead). A derivative-free
simplex search tunes gains against simulated runs.
"""

import math
from dataclasses import dataclass, replace

from .errors import ControllerFault

__all__ = [
    "PidGains",
    "PidState",
    "PidConfig",
    "RelayWindow",
    "pid_step",
    "relay_modulate",
    "fan_hysteresis",
    "tune_gains",
]


@dataclass(frozen=True)
class PidGains:
    """kp in duty/degC, ki in duty/(degC*s), kd in duty*s/degC."""

    kp: float
    ki: float
    kd: float

    def validate(self):
        if self.kp < 0 or self.ki < 0 or self.kd < 0:
            raise ValueError(f"gains must be >= 0, got {self}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.kp, self.ki, self.kd)


@dataclass(frozen=True)
class PidState:
    """Controller memory between steps.

    integral is stored pre-scaled in duty units (ki folded in at update
    time) so the windup clamp bounds actuator authority directly.
    """

    integral: float = 0.0
    prev_measurement: float = 0.0
    last_output: float = 0.0
    initialized: bool = False


@dataclass(frozen=True)
class PidConfig:
    setpoint: float
    output_min: float = 0.0
    output_max: float = 1.0
    sample_time: float = 1.0
    windup_limit: float = 1.0

    def validate(self):
        if not (self.output_min < self.output_max):
            raise ValueError("output_min must be < output_max")
        if not (self.sample_time > 0):
            raise ValueError("sample_time must be positive")
        if not (self.windup_limit > 0):
            raise ValueError("windup_limit must be positive")


@dataclass(frozen=True)
class RelayWindow:
    """Time-proportioning window for the heater relay."""

    window_length: float = 10.0
    window_start: float = 0.0

    def validate(self):
        if not (self.window_length > 0):
            raise ValueError("window_length must be positive")


def _clamp(value: float, lo: float, hi: float) -> float:
    return lo if value < lo else hi if value > hi else value


def pid_step(
    state: PidState,
    gains: PidGains,
    cfg: PidConfig,
    measurement: float,
    dt: float,
) -> tuple[PidState, float]:
    """One controller update; returns (new state, duty in [min, max]).

    Derivative acts on the measurement, not the error, so setpoint steps
    between phases do not kick the output. The integral only accumulates
    while the output is unsaturated or the new error pulls it back off
    the limit (conditional anti-windup).
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if not math.isfinite(measurement):
        raise ControllerFault(f"non-finite measurement {measurement!r}")

    error = cfg.setpoint - measurement
    if state.initialized:
        derivative = (measurement - state.prev_measurement) / dt
    else:
        derivative = 0.0  # no history yet; avoid a spike on the first sample

    provisional = gains.kp * error + state.integral - gains.kd * derivative
    sat_high = provisional > cfg.output_max
    sat_low = provisional < cfg.output_min
    if (not sat_high and not sat_low) or (sat_high and error < 0) or (sat_low and error > 0):
        integral = _clamp(
            state.integral + gains.ki * error * dt,
            -cfg.windup_limit,
            cfg.windup_limit,
        )
    else:
        integral = state.integral

    output = _clamp(
        gains.kp * error + integral - gains.kd * derivative,
        cfg.output_min,
        cfg.output_max,
    )
    new_state = PidState(
        integral=integral,
        prev_measurement=measurement,
        last_output=output,
        initialized=True,
    )
    return new_state, output


def relay_modulate(duty: float, window: RelayWindow, t: float) -> bool:
    """Map a duty fraction onto an on/off relay inside a repeating window."""
    duty = _clamp(duty, 0.0, 1.0)
    elapsed = (t - window.window_start) % window.window_length
    return elapsed < duty * window.window_length


def fan_hysteresis(
    measurement: float,
    setpoint: float,
    hysteresis: float,
    currently_on: bool,
) -> bool:
    """Deadband on/off fan rule: on above setpoint, off below setpoint
    minus hysteresis, hold in between."""
    if hysteresis <= 0:
        raise ValueError(f"hysteresis must be positive, got {hysteresis}")
    if measurement > setpoint:
        return True
    if measurement < setpoint - hysteresis:
        return False
    return currently_on


# Nelder-Mead coefficients (standard values).
_ALPHA = 1.0  # reflection
_GAMMA = 2.0  # expansion
_RHO = 0.5  # contraction
_SIGMA = 0.5  # shrink


def tune_gains(scenario, phase, initial: PidGains, budget: int):
    """Derivative-free gain search over (kp, ki, kd) >= 0.

    The objective is the integral of |setpoint - reading| over the tuned
    phase plus a weighted max-overshoot penalty; evaluations that fault
    score +inf and the search moves on. budget bounds the exact number of
    simulated runs; the best point ever evaluated is returned, so the
    result can never be worse than the initial gains.
    """
    from . import engine  # deferred: engine imports this module

    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    initial.validate()
    phase_name = getattr(phase, "name", str(phase)).lower()
    if phase_name not in ("cook", "smoke"):
        raise ValueError(f"tunable phases are cook and smoke, not {phase_name!r}")

    evals_left = budget
    best: list = [None, math.inf]  # [gains tuple, objective]

    def objective(point: tuple[float, float, float]) -> float:
        nonlocal evals_left
        if evals_left <= 0:
            return math.inf
        evals_left -= 1
        clipped = tuple(max(0.0, v) for v in point)
        try:
            score = engine.evaluate_gains(scenario, phase_name, PidGains(*clipped))
        except Exception:
            score = math.inf
        if score < best[1]:
            best[0], best[1] = clipped, score
        return score

    x0 = tuple(max(0.0, v) for v in initial.as_tuple())
    simplex = [x0]
    # one vertex per coordinate, nudged enough to matter at any scale
    for i in range(3):
        step = max(0.25 * x0[i], 0.05)
        vertex = list(x0)
        vertex[i] += step
        simplex.append(tuple(vertex))
    scores = [objective(v) for v in simplex]

    while evals_left > 0:
        order = sorted(range(4), key=lambda k: scores[k])
        simplex = [simplex[k] for k in order]
        scores = [scores[k] for k in order]
        centroid = tuple(
            sum(simplex[k][i] for k in range(3)) / 3.0 for i in range(3)
        )
        worst = simplex[3]
        reflected = tuple(
            centroid[i] + _ALPHA * (centroid[i] - worst[i]) for i in range(3)
        )
        r_score = objective(reflected)
        if r_score < scores[0] and evals_left > 0:
            expanded = tuple(
                centroid[i] + _GAMMA * (reflected[i] - centroid[i]) for i in range(3)
            )
            e_score = objective(expanded)
            if e_score < r_score:
                simplex[3], scores[3] = expanded, e_score
            else:
                simplex[3], scores[3] = reflected, r_score
        elif r_score < scores[2]:
            simplex[3], scores[3] = reflected, r_score
        else:
            if evals_left <= 0:
                break
            contracted = tuple(
                centroid[i] + _RHO * (worst[i] - centroid[i]) for i in range(3)
            )
            c_score = objective(contracted)
            if c_score < scores[3]:
                simplex[3], scores[3] = contracted, c_score
            else:
                # shrink toward the best vertex
                for k in range(1, 4):
                    if evals_left <= 0:
                        break
                    simplex[k] = tuple(
                        simplex[0][i] + _SIGMA * (simplex[k][i] - simplex[0][i])
                        for i in range(3)
                    )
                    scores[k] = objective(simplex[k])

    if best[0] is None:
        # every evaluation failed; fall back to the clipped initial point
        return PidGains(*x0), math.inf
    return PidGains(*best[0]), best[1]
