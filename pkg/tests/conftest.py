import numpy as np
import pytest

from maxzonoid import (
    MaxStableModel,
    normalize_dependency,
    spectral_from_points,
    zonoid_from_spectral,
)
from maxzonoid.geometry import _ne_chain


def random_dependency(rng, d=2, m=5):
    """Random discrete dependency set: positive atoms, normalized."""
    pts = rng.random((m, d)) * 0.9 + 0.1
    w = rng.random(m) + 0.2
    return normalize_dependency(zonoid_from_spectral(spectral_from_points(pts, w)))


def random_model(rng, d=2, m=5):
    return MaxStableModel(random_dependency(rng, d, m))


def random_dependency_polygon(rng, k=6):
    """Random planar dependency polygon containing e1 and e2."""
    pts = np.vstack([rng.random((k, 2)), [1.0, 0.0], [0.0, 1.0]])
    return _ne_chain(pts)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
