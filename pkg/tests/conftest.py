import numpy as np
import pytest

from outerlab.boundary import make_modulus
from outerlab.sphere import SeededSampler


@pytest.fixture
def sampler():
    return SeededSampler(1234)


@pytest.fixture
def rng():
    return np.random.default_rng(99)


@pytest.fixture
def power_disc():
    """psi = |1 - e^{i theta}|^0.5, whose outer function is (1 - z)^0.5."""
    return make_modulus("power", {"beta": 0.5}, n=1)


@pytest.fixture
def power_ball():
    return make_modulus("power", {"beta": 0.5}, n=2)


@pytest.fixture
def interior_points(rng):
    """``make(count, n, radius)``: points of C^n with norm ``radius`` in random directions."""
    def make(count, n, radius):
        z = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
        return radius * z / np.linalg.norm(z, axis=1, keepdims=True)
    return make
