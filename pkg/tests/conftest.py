import warnings

import numpy as np
import pytest

from eostomo.constants import thz_to_omega
from eostomo.field import FrequencyGrid
from eostomo.metrics import ChainConfig


@pytest.fixture(autouse=True)
def _quiet_overlap_warnings():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        yield


@pytest.fixture(scope="session")
def chain():
    """Production chain on the default 500 THz / 5120-bin grid."""
    return ChainConfig()


@pytest.fixture(scope="session")
def small_grid():
    return FrequencyGrid.from_thz(40.0, 64)


@pytest.fixture(scope="session")
def coarse_chain():
    """Chain on a 2 THz grid for tests that only need qualitative behaviour."""
    return ChainConfig(grid=FrequencyGrid.from_thz(500.0, 250))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def thz(x):
    return thz_to_omega(x)
