import numpy as np
import pytest

from dirlab.composition import QuadratureConfig


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def coarse():
    """Cheap quadrature for smooth (polynomial) Psi."""
    return QuadratureConfig(96, 512, 256)
