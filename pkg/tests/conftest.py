import numpy as np
import pytest

from oodgen import RandomStream, gen_moons


@pytest.fixture(scope="session")
def moons1000():
    """The reference two-moons set used by the sampler tests."""
    return gen_moons(1000, 0.05, RandomStream(0))


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
