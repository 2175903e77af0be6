import numpy as np
import pytest

from heatlab.geometry.manifolds import flat_torus, hyperbolic_patch, sphere2
from heatlab.spectral.sphere import sphere_basis
from heatlab.spectral.torus import torus_basis


@pytest.fixture
def torus():
    return flat_torus()


@pytest.fixture
def circle():
    return flat_torus(dimension=1)


@pytest.fixture
def sphere():
    return sphere2()


@pytest.fixture
def hyperbolic():
    return hyperbolic_patch()


@pytest.fixture(params=["torus", "sphere", "hyperbolic"])
def catalog(request):
    return request.getfixturevalue(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def torus_forms():
    """Degree 0, 1, 2 torus bases with a small band."""
    return [torus_basis(2, band_limit=4, degree=j) for j in range(3)]


@pytest.fixture
def sphere_forms():
    return [sphere_basis(band_limit=6, degree=j) for j in range(3)]
