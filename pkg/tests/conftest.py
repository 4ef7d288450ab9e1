import numpy as np
import pytest

from abring import RingConfig


@pytest.fixture
def ring():
    return RingConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
