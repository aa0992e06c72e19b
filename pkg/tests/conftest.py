import pytest

from smokehouse import engine


@pytest.fixture
def default_scenario_config():
    return engine.default_scenario()


@pytest.fixture(scope="session")
def default_run():
    """One full run of the stock scenario, shared across the session."""
    config = engine.default_scenario()
    records, summary = engine.run_scenario(config)
    return config, records, summary


@pytest.fixture(scope="session")
def preset_runs():
    """name -> (config, records, summary) for every shipped preset."""
    runs = {}
    for name in engine.preset_names():
        config = engine.preset_scenario(name)
        records, summary = engine.run_scenario(config)
        runs[name] = (config, records, summary)
    return runs
