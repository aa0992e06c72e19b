import math
import random

import numpy as np
import pytest

from smokehouse.errors import ConfigError, NoEquilibrium, PlantDiverged
from smokehouse.plant import (
    AMBIENT,
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

ALL_OFF = {"heater": False, "igniter": False, "boiler_fans": False, "smoke_fan": False}
HEATER_ON = dict(ALL_OFF, heater=True)
HEATER_FANS = dict(ALL_OFF, heater=True, boiler_fans=True)
BURNER_ON = dict(ALL_OFF, igniter=True)


def single_node(capacity=1000.0, g=2.0, ambient=25.0, power=100.0):
    return PlantConfig(
        nodes=(ThermalNode("cook_zone", capacity, ambient),),
        conductances=(Conductance("cook_zone", AMBIENT, g),),
        sources=(HeatSource("cook_zone", power, driven_by="heater"),),
        ambient=ambient,
    )


def step_n(config, state, inputs, dt, n):
    for _ in range(n):
        state = plant_step(state, config, inputs, dt)
    return state


class TestSingleNodeOracle:
    # C=1000, G=2, ambient 25, Q=100: closed form T(t) = 75 - 50*exp(-t/500)

    def test_equilibrium_is_75(self):
        eq = equilibrium_temps(single_node(), {"heater": True})
        assert eq["cook_zone"] == pytest.approx(75.0, abs=1e-9)

    def test_matches_closed_form(self):
        config = single_node()
        state = initial_state(config)
        for k in range(1, 1501):
            state = plant_step(state, config, {"heater": True}, 1.0)
            expected = 75.0 - 50.0 * math.exp(-k / 500.0)
            assert state.temperatures["cook_zone"] == pytest.approx(expected, abs=1e-6)

    def test_rise_is_monotone(self):
        config = single_node()
        state = initial_state(config)
        prev = state.temperatures["cook_zone"]
        for _ in range(300):
            state = plant_step(state, config, {"heater": True}, 1.0)
            cur = state.temperatures["cook_zone"]
            assert cur > prev
            assert cur < 75.0
            prev = cur

    def test_source_off_stays_at_ambient(self):
        config = single_node()
        state = step_n(config, initial_state(config), {"heater": False}, 1.0, 50)
        assert state.temperatures["cook_zone"] == pytest.approx(25.0, abs=1e-12)

    def test_cooling_decays_toward_ambient(self):
        config = single_node()
        state = PlantState({"cook_zone": 80.0})
        prev = 80.0
        for _ in range(5000):  # ten time constants
            state = plant_step(state, config, {"heater": False}, 1.0)
            assert state.temperatures["cook_zone"] < prev
            prev = state.temperatures["cook_zone"]
        assert prev == pytest.approx(25.0, abs=0.01)


class TestConservation:
    def build_insulated_pair(self):
        # no ambient path at all: the pair can only trade heat internally
        return PlantConfig(
            nodes=(ThermalNode("a", 100.0, 40.0), ThermalNode("b", 100.0, 20.0)),
            conductances=(Conductance("a", "b", 5.0),),
            sources=(),
            ambient=25.0,
        )

    def test_equal_nodes_meet_in_the_middle(self):
        config = self.build_insulated_pair()
        state = step_n(config, initial_state(config), {}, 1.0, 300)
        assert state.temperatures["a"] == pytest.approx(30.0, abs=1e-6)
        assert state.temperatures["b"] == pytest.approx(30.0, abs=1e-6)

    def test_total_heat_is_conserved_every_step(self):
        config = self.build_insulated_pair()
        state = initial_state(config)
        for _ in range(300):
            state = plant_step(state, config, {}, 1.0)
            total = 100.0 * state.temperatures["a"] + 100.0 * state.temperatures["b"]
            assert total == pytest.approx(6000.0, abs=1e-8)

    def test_insulated_network_has_no_equilibrium(self):
        with pytest.raises(NoEquilibrium):
            equilibrium_temps(self.build_insulated_pair(), {})


def random_network(rng: random.Random) -> PlantConfig:
    n = rng.randint(2, 5)
    names = [f"n{i}" for i in range(n)]
    nodes = tuple(
        ThermalNode(name, rng.uniform(200.0, 5000.0), rng.uniform(-10.0, 150.0))
        for name in names
    )
    conductances = [
        Conductance(name, AMBIENT, rng.uniform(0.5, 30.0)) for name in names
    ]
    for _ in range(rng.randint(0, n)):
        a, b = rng.sample(names, 2)
        conductances.append(Conductance(a, b, rng.uniform(0.5, 30.0)))
    return PlantConfig(
        nodes=nodes,
        conductances=tuple(conductances),
        sources=(),
        ambient=rng.uniform(0.0, 40.0),
    )


class TestNetworkInvariants:
    def test_max_principle_and_lyapunov_decay(self):
        # with sources off the temperatures stay inside the initial hull and
        # the energy-like distance to ambient never grows
        rng = random.Random(1234)
        for _ in range(150):
            config = random_network(rng)
            caps = {node.name: node.heat_capacity for node in config.nodes}
            state = initial_state(config)
            lo = min(min(state.temperatures.values()), config.ambient)
            hi = max(max(state.temperatures.values()), config.ambient)
            v_prev = math.inf
            for _ in range(30):
                state = plant_step(state, config, {}, 0.1)
                temps = state.temperatures
                assert min(temps.values()) >= lo - 1e-9
                assert max(temps.values()) <= hi + 1e-9
                v = sum(
                    caps[name] * (temp - config.ambient) ** 2
                    for name, temp in temps.items()
                )
                assert v <= v_prev + 1e-9
                v_prev = v

    def test_long_run_converges_to_solver_equilibrium(self):
        # integrate far past the slowest mode and compare against the
        # linear-solve steady state
        config = default_plant_config("milkfish")
        model_names = config.node_names()
        caps = np.array(
            [
                node.heat_capacity
                + (config.fish_thermal_load if node.name == "cook_zone" else 0.0)
                for node in config.nodes
            ]
        )
        # build the heater-on system matrix independently of the integrator
        index = {name: i for i, name in enumerate(model_names)}
        lap = np.zeros((len(model_names), len(model_names)))
        for c in config.conductances:
            if AMBIENT in (c.node_a, c.node_b):
                i = index[c.node_b if c.node_a == AMBIENT else c.node_a]
                lap[i, i] -= c.base_value
            else:
                i, j = index[c.node_a], index[c.node_b]
                lap[i, i] -= c.base_value
                lap[j, j] -= c.base_value
                lap[i, j] += c.base_value
                lap[j, i] += c.base_value
        slowest = 1.0 / min(abs(np.linalg.eigvals(lap / caps[:, None]).real))
        horizon = 50.0 * slowest

        eq = equilibrium_temps(config, HEATER_ON)
        state = initial_state(config)
        steps = int(horizon / 0.5) + 1
        state = step_n(config, state, HEATER_ON, 0.5, steps)
        for name in model_names:
            assert state.temperatures[name] == pytest.approx(eq[name], abs=0.05)

    def test_half_step_agreement(self):
        config = default_plant_config("milkfish")
        coarse = step_n(config, initial_state(config), HEATER_ON, 0.1, 2000)
        fine = step_n(config, initial_state(config), HEATER_ON, 0.05, 4000)
        for name in config.node_names():
            drift = abs(coarse.temperatures[name] - fine.temperatures[name])
            assert drift < 0.01


class TestFans:
    def test_boiler_fans_cool_the_zone(self):
        config = default_plant_config("milkfish")
        off = equilibrium_temps(config, HEATER_ON)
        on = equilibrium_temps(config, HEATER_FANS)
        assert on["cook_zone"] < off["cook_zone"]
        assert on["boiler_water"] < off["boiler_water"]

    def test_smoke_fan_cools_the_firebox(self):
        config = default_plant_config("milkfish")
        off = equilibrium_temps(config, BURNER_ON)
        on = equilibrium_temps(config, dict(BURNER_ON, smoke_fan=True))
        assert on["smoke_firebox"] < off["smoke_firebox"]
        assert on["smoke_firebox"] == pytest.approx(63.5, abs=1e-6)

    def test_boiler_equilibrium_with_fans(self):
        eq = equilibrium_temps(default_plant_config("milkfish"), HEATER_FANS)
        assert eq["boiler_water"] == pytest.approx(99.7, abs=1e-6)
        assert eq["cook_zone"] == pytest.approx(94.4, abs=1e-6)

    def test_smoker_equilibrium_fan_off(self):
        eq = equilibrium_temps(default_plant_config("milkfish"), BURNER_ON)
        assert eq["smoke_firebox"] == pytest.approx(75.0, abs=1e-6)
        assert eq["smoke_path"] == pytest.approx(69.7, abs=1e-6)


class TestFishLoad:
    def test_load_slows_heating_but_not_equilibrium(self):
        heavy = default_plant_config("milkfish")
        light = PlantConfig(
            nodes=heavy.nodes,
            conductances=heavy.conductances,
            sources=heavy.sources,
            ambient=heavy.ambient,
            fish_thermal_load=0.0,
        )
        eq_heavy = equilibrium_temps(heavy, HEATER_ON)
        eq_light = equilibrium_temps(light, HEATER_ON)
        for name in heavy.node_names():
            assert eq_heavy[name] == pytest.approx(eq_light[name], rel=1e-9)
        s_heavy = step_n(heavy, initial_state(heavy), HEATER_ON, 1.0, 100)
        s_light = step_n(light, initial_state(light), HEATER_ON, 1.0, 100)
        assert s_heavy.temperatures["cook_zone"] < s_light.temperatures["cook_zone"]


class TestPresets:
    def test_node_set_is_fixed(self):
        assert default_plant_config("milkfish").node_names() == (
            "boiler_water",
            "cook_zone",
            "smoke_firebox",
            "smoke_path",
        )

    def test_initial_temperatures_match_recorded_ambients(self):
        assert all(
            t == 28.17
            for t in initial_state(default_plant_config("scad_large")).temperatures.values()
        )
        assert all(
            t == 28.92
            for t in initial_state(default_plant_config("tilapia")).temperatures.values()
        )

    def test_unknown_preset_rejected(self):
        with pytest.raises(ConfigError):
            default_plant_config("salmon")

    def test_all_presets_validate(self):
        for name in ("milkfish", "scad_large", "scad_medium", "tilapia"):
            default_plant_config(name).validate()


class TestGuards:
    def test_runaway_heating_raises(self):
        config = single_node(capacity=10.0, g=0.1, power=10000.0)
        with pytest.raises(PlantDiverged):
            step_n(config, initial_state(config), {"heater": True}, 1.0, 50)

    def test_runaway_cooling_raises(self):
        config = PlantConfig(
            nodes=(ThermalNode("cook_zone", 10.0, 25.0),),
            conductances=(Conductance("cook_zone", AMBIENT, 5.0),),
            sources=(),
            ambient=-200.0,
        )
        with pytest.raises(PlantDiverged):
            step_n(config, initial_state(config), {}, 1.0, 50)

    def test_step_does_not_mutate_input_state(self):
        config = single_node()
        state = initial_state(config)
        before = dict(state.temperatures)
        plant_step(state, config, {"heater": True}, 1.0)
        assert state.temperatures == before
        assert state.time == 0.0

    def test_dt_bounds(self):
        config = single_node()
        state = initial_state(config)
        with pytest.raises(ValueError):
            plant_step(state, config, {"heater": False}, 0.0)
        with pytest.raises(ValueError):
            plant_step(state, config, {"heater": False}, 1.5)

    def test_missing_actuator_input(self):
        config = default_plant_config("milkfish")
        with pytest.raises(ConfigError):
            plant_step(initial_state(config), config, {"heater": True}, 0.1)


class TestValidation:
    def test_negative_heat_capacity(self):
        config = PlantConfig(
            nodes=(ThermalNode("cook_zone", -5.0, 25.0),),
            conductances=(Conductance("cook_zone", AMBIENT, 1.0),),
            sources=(),
            ambient=25.0,
        )
        with pytest.raises(ConfigError) as err:
            config.validate("plant")
        assert "nodes[0]" in str(err.value)

    def test_unknown_conductance_endpoint(self):
        config = PlantConfig(
            nodes=(ThermalNode("cook_zone", 100.0, 25.0),),
            conductances=(Conductance("cook_zone", "nowhere", 1.0),),
            sources=(),
            ambient=25.0,
        )
        with pytest.raises(ConfigError):
            config.validate()

    def test_duplicate_node_names(self):
        config = PlantConfig(
            nodes=(
                ThermalNode("cook_zone", 100.0, 25.0),
                ThermalNode("cook_zone", 50.0, 25.0),
            ),
            conductances=(Conductance("cook_zone", AMBIENT, 1.0),),
            sources=(),
            ambient=25.0,
        )
        with pytest.raises(ConfigError):
            config.validate()

    def test_stranded_node_rejected(self):
        config = PlantConfig(
            nodes=(
                ThermalNode("cook_zone", 100.0, 25.0),
                ThermalNode("island", 100.0, 25.0),
            ),
            conductances=(Conductance("cook_zone", AMBIENT, 1.0),),
            sources=(),
            ambient=25.0,
        )
        with pytest.raises(ConfigError) as err:
            config.validate()
        assert "island" in str(err.value)

    def test_fan_without_effect_rejected(self):
        with pytest.raises(ConfigError):
            Conductance("a", AMBIENT, 1.0, fan_multiplier=1.0, fan="smoke_fan").validate()

    def test_source_on_unknown_node(self):
        config = PlantConfig(
            nodes=(ThermalNode("cook_zone", 100.0, 25.0),),
            conductances=(Conductance("cook_zone", AMBIENT, 1.0),),
            sources=(HeatSource("boiler_water", 100.0, driven_by="heater"),),
            ambient=25.0,
        )
        with pytest.raises(ConfigError):
            config.validate()
