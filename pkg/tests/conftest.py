import os

import pytest

from evosim.environment import load_world
from evosim.kernel import RunConfig, Simulation, read_log, run_simulation
from evosim.lmclient import LmClient, ScriptedBackend

SEED = 7


@pytest.fixture
def client():
    return LmClient(backend=ScriptedBackend(SEED))


@pytest.fixture
def world():
    return load_world(RunConfig().world_text())


def _run(tmp_path, name, **overrides):
    config = RunConfig(**overrides)
    path = os.path.join(tmp_path, name)
    sim = run_simulation(config, path)
    return sim, read_log(path)


@pytest.fixture(scope="session")
def full_run_7(tmp_path_factory):
    """7-day, 3-agent scripted run with the full architecture."""
    tmp = tmp_path_factory.mktemp("full7")
    config = RunConfig(days=7)
    path = os.path.join(tmp, "events.jsonl")
    sim = run_simulation(config, path)
    return sim, read_log(path)


@pytest.fixture(scope="session")
def ablated_run_7(tmp_path_factory):
    """Same run with growth, insight and cognitive feelings disabled."""
    tmp = tmp_path_factory.mktemp("abl7")
    config = RunConfig(days=7, disable_growth=True, disable_insight=True,
                       disable_cognitive_feelings=True)
    path = os.path.join(tmp, "events.jsonl")
    sim = run_simulation(config, path)
    return sim, read_log(path)


@pytest.fixture(scope="session")
def short_run(tmp_path_factory):
    """2-day run for cheap log-shape assertions."""
    tmp = tmp_path_factory.mktemp("short")
    path = os.path.join(tmp, "events.jsonl")
    sim = run_simulation(RunConfig(days=2), path)
    return sim, read_log(path)


@pytest.fixture
def fresh_sim():
    return Simulation(RunConfig(days=1))
