import numpy as np
import pytest

from qvf_eos import GaussianAutocorrelation, GeometryConfig, Lorentz, MultiLorentz


@pytest.fixture
def lorentz():
    return Lorentz(1.0, 1.0, 0.5)


@pytest.fixture
def multi():
    return MultiLorentz(1.5, ((1.0, 0.3), (2.5, 0.4)))


@pytest.fixture
def geometry():
    return GeometryConfig()


@pytest.fixture
def gaussian():
    return GaussianAutocorrelation(1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
