import numpy as np
import pytest

from heisentrace.quad import QuadratureSpec


@pytest.fixture(scope="session")
def spec():
    return QuadratureSpec()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
