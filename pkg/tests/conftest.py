import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from coneiso import cones

settings.register_profile(
    "ci", max_examples=40, derandomize=True, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much])
settings.load_profile("ci")


@pytest.fixture(scope="session")
def quadrant():
    return cones.quadrant()


@pytest.fixture(scope="session")
def wedge():
    return cones.wedge2d()


@pytest.fixture(scope="session")
def orthant3():
    return cones.orthant(3)


@pytest.fixture(scope="session")
def circular45():
    return cones.circular_cone(math.pi / 4)


@pytest.fixture(scope="session")
def halfplane():
    return cones.halfplane()


@pytest.fixture(scope="session")
def plane2():
    return cones.full_space(2)


def random_polytope_region(cone, rng, max_points=12):
    """Random convex polytope clipped to the cone (test helper)."""
    from coneiso import families
    return families.random_region(cone, rng, kind="polytope")
