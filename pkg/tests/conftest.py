import pytest

import swarmdoppler as sd
from helpers import mavic_params

MAVIC_SEED = 424242
MAVIC_N = 10_000


@pytest.fixture(scope="session")
def mavic():
    return mavic_params()


@pytest.fixture(scope="session")
def mavic_grid(mavic):
    return sd.default_grid(mavic)


@pytest.fixture(scope="session")
def mavic_ensemble(mavic, mavic_grid):
    """Reference-scale Monte Carlo ensemble, generated once per session."""
    return sd.simulate_ensemble(mavic, mavic_grid, MAVIC_N, MAVIC_SEED)
