import numpy as np
import pytest

from chordgeo.geometry import Ball, HPolytope


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def ball3():
    return Ball(np.zeros(3), 1.0)


@pytest.fixture
def cube3():
    return HPolytope(np.vstack([np.eye(3), -np.eye(3)]), np.ones(6))


@pytest.fixture
def cube2():
    return HPolytope(np.vstack([np.eye(2), -np.eye(2)]), np.ones(4))
