import numpy as np
import pytest

from rotgpe import PhysParams, make_grid
from rotgpe.selfcheck import gaussian_field, random_envelope_field


@pytest.fixture(scope="session")
def grid128():
    return make_grid(2, 128, 8.0)


@pytest.fixture(scope="session")
def grid64():
    return make_grid(2, 64, 8.0)


@pytest.fixture(scope="session")
def grid3d():
    # L = 8 keeps box-truncation error below quadrature round-off; 64 points
    # per axis then resolve the Gaussian spectrum fully
    return make_grid(3, 64, 8.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def p_free():
    """Isotropic trap, no rotation, no interaction."""
    return PhysParams(omega=(1.0, 1.0), Omega=0.0, g=0.0, sigma=1.0, gamma=1.0)


@pytest.fixture
def p_rot():
    return PhysParams(omega=(1.0, 1.0), Omega=0.5, g=0.0, sigma=1.0, gamma=1.0)


@pytest.fixture
def gauss128(grid128):
    return gaussian_field(grid128)


@pytest.fixture
def random_field(grid128, rng):
    return random_envelope_field(grid128, rng)
