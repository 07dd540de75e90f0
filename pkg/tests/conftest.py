import numpy as np
import pytest

from leggett_lab import Direction


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_direction(rng) -> Direction:
    """Uniform direction on the sphere."""
    z = rng.uniform(-1.0, 1.0)
    phi = rng.uniform(-np.pi, np.pi)
    return Direction(float(np.arccos(z)), float(phi))
