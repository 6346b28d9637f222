import numpy as np
import pytest

from leocoop.experiment import synthetic_instance


@pytest.fixture(scope="session")
def small_instance():
    """Three satellites, six GUs; shared read-only channel set."""
    ch, gus = synthetic_instance(3, 3, 6)
    return ch, gus


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
