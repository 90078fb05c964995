import numpy as np
import pytest

from capwhitham import BondParams, Grid, ScalingParams, sigma_beta
from capwhitham.verify import random_even_field


@pytest.fixture(scope="session")
def weak_params():
    return BondParams(0.2)


@pytest.fixture(scope="session")
def strong_params():
    return BondParams(0.5)


@pytest.fixture(scope="session")
def grid():
    return Grid(80.0, 1024)


@pytest.fixture(scope="session")
def core(weak_params, grid):
    return sigma_beta(weak_params, grid)


@pytest.fixture(scope="session")
def scaling(weak_params):
    return ScalingParams.from_epsilon(weak_params, 0.25)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def even_field_factory(rng):
    def make(grid, spectral_width=3.0):
        return random_even_field(grid, rng, spectral_width=spectral_width)

    return make
