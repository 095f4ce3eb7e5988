import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from inkwash.geometry import Camera
from inkwash.fixtures import make_cube, make_icosphere, make_quad, make_tetrahedron


@pytest.fixture
def cube():
    return make_cube()


@pytest.fixture
def tetrahedron():
    return make_tetrahedron()


@pytest.fixture
def icosphere():
    return make_icosphere(2)


@pytest.fixture
def quad():
    return make_quad()


def small_camera(position=(1.3, 1.0, 2.2), look_at=(0.0, 0.0, 0.0),
                 viewport=(64, 64), fov=35.0, near=0.5, far=10.0):
    return Camera(
        position=np.asarray(position, dtype=np.float64),
        look_at=np.asarray(look_at, dtype=np.float64),
        up=np.array([0.0, 1.0, 0.0]),
        viewport=viewport,
        fov_y_deg=fov,
        near=near,
        far=far,
    )


@pytest.fixture
def camera64():
    return small_camera()


def random_pose(rng: np.random.Generator, radius_lo=2.0, radius_hi=5.0,
                viewport=(64, 64)):
    direction = rng.normal(size=3)
    direction /= np.linalg.norm(direction)
    distance = rng.uniform(radius_lo, radius_hi)
    up = np.array([0.0, 1.0, 0.0])
    if abs(direction @ up) > 0.98:
        up = np.array([1.0, 0.0, 0.0])
    return Camera(
        position=direction * distance,
        look_at=np.zeros(3),
        up=up,
        viewport=viewport,
        fov_y_deg=40.0,
        near=0.3,
        far=distance + 6.0,
    )
