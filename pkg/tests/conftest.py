import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from gtstokes.sampling import random_herm0

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def herm0(n, seed, **kw):
    return random_herm0(n, np.random.default_rng(seed), **kw)


seeds = st.integers(min_value=0, max_value=2**32 - 1)

# a fixed 2x2 and 3x3 input used for frozen reference values
A2 = np.array([[0.3, 0.4 - 0.2j], [0.4 + 0.2j, -0.5]])
A3 = np.array([[0.5, 0.3 + 0.2j, -0.4],
               [0.3 - 0.2j, -0.2, 0.1 - 0.5j],
               [-0.4, 0.1 + 0.5j, 0.9]])
