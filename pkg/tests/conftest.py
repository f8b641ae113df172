import numpy as np
import pytest

from hypharm import operators, transform


class Workspace:
    def __init__(self, n, lambda_max):
        self.n = n
        self.rgrid = transform.radial_grid(n, lambda_resolve=lambda_max)
        self.sgrid = transform.spectral_grid(n, lambda_max=lambda_max)
        self.family = operators.build_default_family(self.rgrid)


@pytest.fixture(scope="session")
def ws2():
    """Mid-resolution n=2 workspace shared across unit tests."""
    return Workspace(2, 32.0)


@pytest.fixture(scope="session")
def ws3():
    return Workspace(3, 32.0)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260808)
