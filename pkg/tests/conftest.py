import numpy as np
import pytest

from msq.field import SampledField, make_grid
from msq.spectral import riesz_potential

SEED = 20240811


@pytest.fixture
def grid1d():
    return make_grid(1, 256, 1.0)


@pytest.fixture
def grid2d():
    return make_grid(2, 32, 1.0)


@pytest.fixture
def rough_field_1d(grid1d):
    """Mildly rough deterministic field: smoothed seeded noise."""
    rng = np.random.default_rng(SEED)
    base = SampledField(grid=grid1d, values=rng.standard_normal(grid1d.n_points))
    return riesz_potential(base, 0.8)


@pytest.fixture
def rough_field_2d(grid2d):
    rng = np.random.default_rng(SEED + 1)
    base = SampledField(grid=grid2d, values=rng.standard_normal(grid2d.n_points))
    return riesz_potential(base, 1.2)
