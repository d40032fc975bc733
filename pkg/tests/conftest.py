import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "chunkselect",
    max_examples=50,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("chunkselect")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
