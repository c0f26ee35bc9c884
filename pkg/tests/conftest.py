import numpy as np
import pytest

from onofri_lab.core.utils import init_utils
from onofri_lab.sphere.quadrature import build_gauss_grid


@pytest.fixture(autouse=True)
def ascii_logs():
    init_utils(ascii_logs=True, debug=False)


@pytest.fixture(scope="session")
def grid32():
    return build_gauss_grid(32)


@pytest.fixture(scope="session")
def grid16():
    return build_gauss_grid(16)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
