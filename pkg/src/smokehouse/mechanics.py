"""Belt/pulley drive sizing for the tray lift.

All calculations are in SI units (meters, newtons, watts, N*m); pulley
speeds are in rpm because that is how drive components are specified.
The text report renders a few values in cm / N*m presentation units.
"""

import math
from dataclasses import dataclass, field


@dataclass
class LoadSpec:
    """Mass hung from the lifting tackle."""

    mass_kg: float
    gravity: float = 9.81
    pulley_count: int = 1

    def __post_init__(self):
        if not (self.mass_kg > 0):
            raise ValueError(f"mass must be positive, got {self.mass_kg}")
        if not (self.gravity > 0):
            raise ValueError(f"gravity must be positive, got {self.gravity}")
        if self.pulley_count < 1:
            raise ValueError(f"pulley_count must be >= 1, got {self.pulley_count}")


@dataclass
class PulleySpec:
    """One pulley of the belt drive. Teeth are informational only:

    the quoted teeth counts are inconsistent with a common belt pitch,
    so all speed ratios are computed from diameters.
    """

    diameter_m: float
    speed_rpm: float = 0.0
    teeth: int | None = None

    def __post_init__(self):
        if not (self.diameter_m > 0):
            raise ValueError(f"pulley diameter must be positive, got {self.diameter_m}")
        if self.speed_rpm < 0:
            raise ValueError(f"pulley speed must be >= 0, got {self.speed_rpm}")


@dataclass
class BeltDrive:
    """Two-pulley open belt drive with a known working tension."""

    driver: PulleySpec
    driven: PulleySpec
    center_distance_m: float
    tension_n: float
    power_w: float | None = None  # derived from tension * belt velocity when None

    def __post_init__(self):
        min_center = (self.driver.diameter_m + self.driven.diameter_m) / 2.0
        if not (self.center_distance_m > min_center):
            raise ValueError(
                "center distance must exceed the mean pulley diameter "
                f"({self.center_distance_m} <= {min_center})"
            )
        if self.tension_n < 0:
            raise ValueError(f"belt tension must be >= 0, got {self.tension_n}")


@dataclass
class DesignReport:
    """All derived drive quantities for one load/drive pairing."""

    weight_n: float
    effort_n: float
    driver_speed_rpm: float
    driven_speed_rpm: float
    belt_velocity_mps: float
    transmitted_power_w: float
    belt_length_m: float
    torque_driver_nm: float
    torque_driven_nm: float
    notes: list[str] = field(default_factory=list)


def lifting_forces(load: LoadSpec) -> tuple[float, float]:
    """Weight of the load and the effort force to hold it.

    weight = m*g; for an ideal tackle the effort is weight / pulley count,
    so a single fixed pulley only redirects the pull (effort == weight).
    """
    weight = load.mass_kg * load.gravity
    effort = weight / load.pulley_count
    return weight, effort


def driven_speed(d1_m: float, n1_rpm: float, d2_m: float) -> float:
    """Speed of the second pulley from the diameter ratio (d1*n1 = d2*n2)."""
    if d1_m <= 0 or d2_m <= 0:
        raise ValueError("pulley diameters must be positive")
    if n1_rpm <= 0:
        raise ValueError("driving speed must be positive")
    return d1_m * n1_rpm / d2_m


def belt_velocity(d_m: float, n_rpm: float) -> float:
    """Linear belt speed off a pulley of diameter d at n rpm: pi*d*n/60."""
    if d_m <= 0:
        raise ValueError("pulley diameter must be positive")
    if n_rpm < 0:
        raise ValueError("speed must be >= 0")
    return math.pi * d_m * n_rpm / 60.0


def belt_power(tension_n: float, velocity_mps: float) -> float:
    """Power carried by the belt: P = F*v."""
    if tension_n < 0:
        raise ValueError("tension must be >= 0")
    if velocity_mps < 0:
        raise ValueError("velocity must be >= 0")
    return tension_n * velocity_mps


def belt_tension(power_w: float, velocity_mps: float) -> float:
    """Working tension needed to carry power_w at the given belt speed."""
    if velocity_mps <= 0:
        raise ValueError("velocity must be positive to invert P = F*v")
    return power_w / velocity_mps


def belt_length(d1_m: float, d2_m: float, center_m: float) -> float:
    """Open-belt length: pi*(d1+d2)/2 + 2D + (d1-d2)^2/(4D).

    The wrap term uses the /(4D) divisor of the standard open-belt
    formula; see DesignReport.notes for why that form is used.
    """
    if d1_m <= 0 or d2_m <= 0:
        raise ValueError("pulley diameters must be positive")
    if center_m <= 0:
        raise ValueError("center distance must be positive")
    return (
        math.pi * (d1_m + d2_m) / 2.0
        + 2.0 * center_m
        + (d1_m - d2_m) ** 2 / (4.0 * center_m)
    )


def required_torque(power_w: float, n_rpm: float) -> float:
    """Shaft torque that carries power_w at n rpm: T = P / (2*pi*n/60)."""
    if n_rpm <= 0:
        raise ValueError("speed must be positive")
    return power_w / (2.0 * math.pi * n_rpm / 60.0)


_STANDARD_NOTES = [
    "belt length uses the open-belt wrap term (d1-d2)^2/(4D); the /(4D) "
    "divisor is required for the quoted 34.4 cm length to come out",
    "effort force follows S = W/P literally; the separately quoted "
    "0.51 figure matches F*v in watts, not a force",
    "teeth counts are inconsistent with a shared belt pitch and are "
    "carried as metadata; speed ratios use diameters",
]


def design_report(load: LoadSpec, drive: BeltDrive) -> DesignReport:
    """Compose the full drive design: forces, speeds, power, length, torques."""
    weight, effort = lifting_forces(load)
    n1 = drive.driver.speed_rpm
    if n1 <= 0:
        raise ValueError("driver pulley speed must be positive")
    n2 = driven_speed(drive.driver.diameter_m, n1, drive.driven.diameter_m)
    velocity = belt_velocity(drive.driver.diameter_m, n1)
    power = drive.power_w if drive.power_w is not None else belt_power(drive.tension_n, velocity)
    length = belt_length(
        drive.driver.diameter_m, drive.driven.diameter_m, drive.center_distance_m
    )
    return DesignReport(
        weight_n=weight,
        effort_n=effort,
        driver_speed_rpm=n1,
        driven_speed_rpm=n2,
        belt_velocity_mps=velocity,
        transmitted_power_w=power,
        belt_length_m=length,
        torque_driver_nm=required_torque(power, n1),
        torque_driven_nm=required_torque(power, n2),
        notes=list(_STANDARD_NOTES),
    )


def reference_design() -> tuple[LoadSpec, BeltDrive]:
    """The shipped machine's drive: 5 kg batch, 6 cm @ 25 rpm to 3 cm,
    10 cm center distance, 6.5 N working tension."""
    load = LoadSpec(mass_kg=5.0, gravity=9.81, pulley_count=1)
    drive = BeltDrive(
        driver=PulleySpec(diameter_m=0.06, speed_rpm=25.0, teeth=11),
        driven=PulleySpec(diameter_m=0.03, teeth=18),
        center_distance_m=0.10,
        tension_n=6.5,
    )
    return load, drive


def _sig3(value: float) -> str:
    if value == 0:
        return "0.00"
    return f"{value:.3g}"


def render_report_text(report: DesignReport) -> str:
    """Aligned human-readable report, presentation units matching drive specs."""
    rows = [
        ("load weight", f"{_sig3(report.weight_n)} N"),
        ("lifting effort", f"{_sig3(report.effort_n)} N"),
        ("driver pulley speed", f"{_sig3(report.driver_speed_rpm)} rpm"),
        ("driven pulley speed", f"{_sig3(report.driven_speed_rpm)} rpm"),
        ("belt velocity", f"{_sig3(report.belt_velocity_mps)} m/s"),
        ("transmitted power", f"{_sig3(report.transmitted_power_w)} W"),
        ("belt length", f"{_sig3(report.belt_length_m * 100.0)} cm"),
        ("torque at driver", f"{_sig3(report.torque_driver_nm)} N*m"),
        ("torque at driven", f"{_sig3(report.torque_driven_nm)} N*m"),
    ]
    width = max(len(name) for name, _ in rows)
    lines = ["Tray drive design report", "-" * 34]
    lines += [f"{name:<{width}}  {value}" for name, value in rows]
    if report.notes:
        lines.append("")
        lines.append("notes:")
        lines += [f"  - {note}" for note in report.notes]
    return "\n".join(lines)


def render_report_keyvalues(report: DesignReport) -> str:
    """Machine-readable key=value block (SI units, full precision)."""
    fields = [
        ("weight_N", report.weight_n),
        ("effort_N", report.effort_n),
        ("driver_speed_rpm", report.driver_speed_rpm),
        ("driven_speed_rpm", report.driven_speed_rpm),
        ("belt_velocity_mps", report.belt_velocity_mps),
        ("transmitted_power_W", report.transmitted_power_w),
        ("belt_length_m", report.belt_length_m),
        ("torque_driver_Nm", report.torque_driver_nm),
        ("torque_driven_Nm", report.torque_driven_nm),
    ]
    return "\n".join(f"{key}={value:.10g}" for key, value in fields)
