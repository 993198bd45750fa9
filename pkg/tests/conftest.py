import numpy as np
import pytest

from src.core.domain import Domain2D
from src.core.fields import GridFunction
from src.monge_ampere.eigen import eigen_solve
from src.monge_ampere.newton import newton_solve


@pytest.fixture
def disc():
    return Domain2D()


@pytest.fixture
def paraboloid(disc):
    """u = (|x|^2 - 1) / 2, the q = 0 solution on the unit disc."""
    return GridFunction.from_function(disc, 32, 32, lambda x, y: (x ** 2 + y ** 2 - 1.0) / 2.0)


@pytest.fixture(scope="session")
def q1_solution():
    return newton_solve(Domain2D(), 1.0, 1.0, n_r=48, n_theta=32)


@pytest.fixture(scope="session")
def eigen_pair():
    return eigen_solve(Domain2D(), n_r=48, n_theta=32)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
