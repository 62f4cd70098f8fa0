import numpy as np
import pytest

from attnmech import make_grid, uniform_prior


@pytest.fixture
def grid2000():
    return make_grid(2000)


@pytest.fixture
def uniform2000(grid2000):
    return uniform_prior(grid2000)


@pytest.fixture
def rng():
    return np.random.default_rng(712)
