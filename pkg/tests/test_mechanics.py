import math

import pytest
from hypothesis import given, strategies as st

from smokehouse.mechanics import (
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
    render_report_keyvalues,
    render_report_text,
    required_torque,
)

# Frozen oracle values for the shipped drive, worked out independently
# from the defining formulas with g = 9.81:
#   W = 5 * 9.81                         = 49.05 N
#   n2 = 0.06 * 25 / 0.03                = 50 rpm (exact in floats too)
#   v = pi * 0.06 * 25 / 60              = 0.07853981633974483 m/s
#   P = 6.5 * v                          = 0.5105088062083414 W
#   L = pi*0.045 + 0.2 + 0.0009/0.4      = 0.3436216694115407 m
#   T1 = P / (2*pi*25/60) = 6.5*0.06/2   = 0.195 N*m (exact)
#   T2 = P / (2*pi*50/60) = 6.5*0.03/2   = 0.0975 N*m (exact)
WEIGHT_N = 49.05
DRIVEN_RPM = 50.0
BELT_V = 0.07853981633974483
BELT_P = 0.5105088062083414
BELT_L = 0.3436216694115407
TORQUE_DRIVER = 0.195
TORQUE_DRIVEN = 0.0975


class TestReferenceDesign:
    def test_weight(self):
        load, _ = reference_design()
        weight, effort = lifting_forces(load)
        assert weight == pytest.approx(WEIGHT_N, abs=1e-12)
        assert effort == weight  # single fixed pulley redirects only

    def test_driven_speed_exact(self):
        assert driven_speed(0.06, 25.0, 0.03) == DRIVEN_RPM

    def test_belt_velocity(self):
        assert belt_velocity(0.06, 25.0) == pytest.approx(BELT_V, abs=1e-12)

    def test_power(self):
        assert belt_power(6.5, BELT_V) == pytest.approx(BELT_P, abs=1e-12)

    def test_belt_length(self):
        assert belt_length(0.06, 0.03, 0.10) == pytest.approx(BELT_L, abs=1e-12)

    def test_torques_exact(self):
        assert required_torque(BELT_P, 25.0) == pytest.approx(TORQUE_DRIVER, abs=1e-12)
        assert required_torque(BELT_P, 50.0) == pytest.approx(TORQUE_DRIVEN, abs=1e-12)

    def test_full_report(self):
        load, drive = reference_design()
        rep = design_report(load, drive)
        assert rep.weight_n == pytest.approx(WEIGHT_N, abs=1e-12)
        assert rep.driven_speed_rpm == DRIVEN_RPM
        assert rep.belt_velocity_mps == pytest.approx(BELT_V, abs=1e-12)
        assert rep.transmitted_power_w == pytest.approx(BELT_P, abs=1e-12)
        assert rep.belt_length_m == pytest.approx(BELT_L, abs=1e-12)
        assert rep.torque_driver_nm == pytest.approx(TORQUE_DRIVER, abs=1e-9)
        assert rep.torque_driven_nm == pytest.approx(TORQUE_DRIVEN, abs=1e-9)
        assert rep.notes  # oddities in the source figures are called out


class TestTackle:
    def test_two_pulley_tackle_halves_effort(self):
        load = LoadSpec(mass_kg=5.0, pulley_count=2)
        weight, effort = lifting_forces(load)
        assert weight == pytest.approx(WEIGHT_N, abs=1e-12)
        assert effort == pytest.approx(24.525)

    @given(st.floats(0.1, 500.0), st.integers(1, 8))
    def test_effort_never_exceeds_weight(self, mass, count):
        weight, effort = lifting_forces(LoadSpec(mass_kg=mass, pulley_count=count))
        assert effort <= weight + 1e-12
        assert effort * count == pytest.approx(weight)


class TestRatios:
    @given(
        st.floats(0.005, 0.5),
        st.floats(1.0, 3000.0),
        st.floats(0.005, 0.5),
    )
    def test_speed_ratio_conserves_surface_speed(self, d1, n1, d2):
        n2 = driven_speed(d1, n1, d2)
        assert d1 * n1 == pytest.approx(d2 * n2, rel=1e-9)

    @given(st.floats(0.005, 0.5), st.floats(1.0, 3000.0))
    def test_equal_diameters_give_equal_speed(self, d, n):
        assert driven_speed(d, n, d) == pytest.approx(n, rel=1e-12)

    def test_torque_power_consistency(self):
        # same power through both shafts, so T1*n1 == T2*n2
        t1 = required_torque(BELT_P, 25.0)
        t2 = required_torque(BELT_P, 50.0)
        assert t1 * 25.0 == pytest.approx(t2 * 50.0, rel=1e-12)

    def test_tension_inverts_power(self):
        assert belt_tension(BELT_P, BELT_V) == pytest.approx(6.5, rel=1e-12)


class TestBeltLength:
    @given(
        st.floats(0.01, 0.2),
        st.floats(0.01, 0.2),
        st.floats(0.25, 2.0),
    )
    def test_symmetric_in_diameters(self, d1, d2, center):
        assert belt_length(d1, d2, center) == pytest.approx(
            belt_length(d2, d1, center), rel=1e-12
        )

    @given(st.floats(0.01, 0.2), st.floats(0.25, 2.0))
    def test_equal_pulleys_reduce_to_circumference_plus_spans(self, d, center):
        # wrap correction vanishes when d1 == d2
        assert belt_length(d, d, center) == pytest.approx(
            math.pi * d + 2 * center, rel=1e-12
        )

    @given(
        st.floats(0.01, 0.2),
        st.floats(0.01, 0.2),
        st.floats(0.25, 2.0),
        st.floats(0.001, 0.5),
    )
    def test_monotone_in_center_distance(self, d1, d2, center, extra):
        # for centers well beyond the pulley radii the length grows with D
        assert belt_length(d1, d2, center + extra) > belt_length(d1, d2, center)


class TestValidation:
    def test_rejects_nonpositive_mass(self):
        with pytest.raises(ValueError):
            LoadSpec(mass_kg=0.0)

    def test_rejects_nonpositive_diameter(self):
        with pytest.raises(ValueError):
            PulleySpec(diameter_m=-0.03)

    def test_rejects_touching_pulleys(self):
        with pytest.raises(ValueError):
            BeltDrive(
                driver=PulleySpec(diameter_m=0.06, speed_rpm=25.0),
                driven=PulleySpec(diameter_m=0.03),
                center_distance_m=0.04,
                tension_n=6.5,
            )

    def test_rejects_zero_speed_in_ratio(self):
        with pytest.raises(ValueError):
            driven_speed(0.06, 0.0, 0.03)

    def test_torque_requires_positive_speed(self):
        with pytest.raises(ValueError):
            required_torque(1.0, 0.0)


class TestRendering:
    def test_text_report_contains_presentation_values(self):
        load, drive = reference_design()
        text = render_report_text(design_report(load, drive))
        assert "49.1 N" in text  # 3 sig figs of 49.05
        assert "50 rpm" in text
        assert "0.0785 m/s" in text
        assert "0.511 W" in text
        assert "34.4 cm" in text
        assert "0.195 N*m" in text
        assert "0.0975 N*m" in text

    def test_keyvalue_block_round_trips(self):
        load, drive = reference_design()
        block = render_report_keyvalues(design_report(load, drive))
        parsed = dict(line.split("=", 1) for line in block.splitlines())
        assert float(parsed["weight_N"]) == WEIGHT_N
        assert float(parsed["driven_speed_rpm"]) == DRIVEN_RPM
        assert float(parsed["belt_length_m"]) == pytest.approx(BELT_L, abs=1e-9)
        assert float(parsed["torque_driver_Nm"]) == pytest.approx(0.195, abs=1e-9)
