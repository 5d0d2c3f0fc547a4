import numpy as np
import pytest

from nsk1d.energy import DoubleWell, bitangent, quartic_model


@pytest.fixture(scope="session")
def model():
    return quartic_model()


@pytest.fixture(scope="session")
def bit(model):
    return bitangent(model)


@pytest.fixture(scope="session")
def well(model, bit):
    return DoubleWell(model, bit)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
