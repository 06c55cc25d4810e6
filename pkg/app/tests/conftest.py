import math

import numpy as np
import pytest

from app.geometry import validate_polygon


def random_convex_polygon(rng, n):
    """n points on a random rotated ellipse, angular gaps kept apart."""
    gaps = rng.uniform(0.3, 1.0, n)
    t = rng.uniform(0, 2 * math.pi) + np.cumsum(gaps / gaps.sum() * 2 * math.pi)
    a, b = rng.uniform(0.5, 2.0, 2)
    pts = np.column_stack((a * np.cos(t), b * np.sin(t)))
    phi = rng.uniform(0, 2 * math.pi)
    rot = np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])
    return validate_polygon(pts @ rot.T + rng.uniform(-3, 3, 2))


def interior_samples(rng, p, k):
    """Random convex combinations of the vertices, pulled towards the centroid."""
    w = rng.dirichlet(np.ones(p.n), size=k)
    c = p.coords.mean(axis=0)
    return 0.9 * (w @ p.coords) + 0.1 * c


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def random_polygons(rng):
    return [random_convex_polygon(rng, 3 + k % 6) for k in range(54)]


@pytest.fixture
def unit_square():
    return validate_polygon([(0, 0), (1, 0), (1, 1), (0, 1)])


@pytest.fixture
def interior(rng):
    return lambda p, k: interior_samples(rng, p, k)
