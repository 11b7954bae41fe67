import pytest

from opinion_ladder import ModelParams, build_sequences
from opinion_ladder.solver import reference_config, run


@pytest.fixture(scope="session")
def unit_params():
    """lambda = 1, S*_0 = 2, d = 1: the running example with N* = 3."""
    return ModelParams.constant(2.0, 1.0, 1.0, 1.0, 10)


@pytest.fixture(scope="session")
def unit_ladder(unit_params):
    return build_sequences(unit_params)


@pytest.fixture(scope="session")
def reference_run(unit_params):
    """L = 150, dx = 0.1, t_end = 60, n_sim = 4, a snapshot every time unit."""
    cfg = reference_config(unit_params, n_sim=4, half_length=150.0, dx=0.1, t_end=60.0)
    return run(cfg, unit_params)
