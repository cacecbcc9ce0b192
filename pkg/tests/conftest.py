import numpy as np
import pytest

from models.phase_space import DensityMatrix
from services.verification import random_density_matrix


@pytest.fixture
def rng():
    """Deterministic generator for property checks."""
    return np.random.default_rng(12345)


@pytest.fixture
def random_state(rng):
    """Factory for random full-rank density matrices of a given dimension."""
    def make(n: int = 3) -> DensityMatrix:
        return random_density_matrix(n, rng)
    return make


@pytest.fixture
def ground_state():
    return DensityMatrix.pure(np.array([1.0, 0.0, 0.0]))
