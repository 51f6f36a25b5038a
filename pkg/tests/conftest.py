import numpy as np
import pytest

from rieffelkit.algebra_actions import ActionSpec
from rieffelkit.phase_space import PhaseGrid, SymplecticSpace


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def space():
    return SymplecticSpace(1)


@pytest.fixture(scope="session")
def grid16(space):
    return PhaseGrid(space, 16)


@pytest.fixture(scope="session")
def grid32(space):
    return PhaseGrid(space, 32)


@pytest.fixture
def matrix_spec(rng):
    return ActionSpec.inner_spectral(rng.uniform(-0.25, 0.25, size=(2, 3)))


@pytest.fixture(scope="session")
def torus_spec():
    return ActionSpec.torus_modes(1, 4)


def gaussian(grid, width=0.5, centre=0.0):
    return np.exp(-width * np.sum((grid.points - centre) ** 2, axis=-1))
