import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rieffelkit.phase_space import (
    PhaseFunction,
    PhaseGrid,
    SymplecticSpace,
    TailWarning,
    check_tails,
    cocycle,
    fourier_matrix,
    make_selfdual_grid,
    symplectic_form,
    symplectic_fourier,
)

from conftest import gaussian

coords = st.floats(min_value=-10, max_value=10, allow_nan=False)
vectors = st.lists(coords, min_size=2, max_size=2).map(np.array)


def test_form_on_basis_vectors(space):
    assert symplectic_form(space, [1, 0], [0, 1]) == -1.0


@given(vectors, vectors)
def test_form_is_antisymmetric(X, Y):
    s = SymplecticSpace(1)
    assert symplectic_form(s, X, X) == 0.0
    assert symplectic_form(s, X, Y) == pytest.approx(-symplectic_form(s, Y, X), abs=1e-12)


@given(vectors, vectors, vectors, coords)
def test_form_is_bilinear(X, Y, Z, c):
    s = SymplecticSpace(1)
    lhs = symplectic_form(s, c * X + Y, Z)
    rhs = c * symplectic_form(s, X, Z) + symplectic_form(s, Y, Z)
    assert lhs == pytest.approx(rhs, abs=1e-9)


def test_form_matches_matrix(rng):
    s = SymplecticSpace(2)
    X, Y = rng.normal(size=(2, 4))
    assert symplectic_form(s, X, Y) == pytest.approx(X @ s.J @ Y)


def test_form_rejects_wrong_length(space):
    with pytest.raises(ValueError):
        symplectic_form(space, [1, 2, 3], [0, 1])


@given(vectors)
def test_cocycle_normalized(X):
    s = SymplecticSpace(1)
    assert cocycle(s, X, np.zeros(2)) == 1
    assert cocycle(s, np.zeros(2), X) == 1


def test_cocycle_identity_bulk(rng, space):
    X, Y, Z = rng.uniform(-5, 5, size=(3, 1000, 2))
    lhs = cocycle(space, X, Y) * cocycle(space, X + Y, Z)
    rhs = cocycle(space, Y, Z) * cocycle(space, X, Y + Z)
    assert np.max(np.abs(lhs - rhs)) <= 1e-13
    assert np.max(np.abs(cocycle(space, X, Y) * cocycle(space, Y, X) - 1)) <= 1e-14
    assert np.allclose(np.abs(cocycle(space, X, Y)), 1.0)


def test_selfdual_spacing(space):
    grid = make_selfdual_grid(space, 8)
    assert grid.h == pytest.approx(0.886226925, abs=1e-9)
    assert grid.N * grid.h**2 == pytest.approx(2 * math.pi)


@pytest.mark.parametrize("N", [3, 7, 2, 0])
def test_bad_grid_sizes(space, N):
    with pytest.raises(ValueError):
        make_selfdual_grid(space, N)


def test_space_dimension_limits():
    with pytest.raises(ValueError):
        SymplecticSpace(0)
    with pytest.raises(ValueError):
        SymplecticSpace(4)


def test_nodes_closed_under_negation(grid16):
    pts = grid16.points
    neg = pts[grid16.negated_index()]
    inside = np.all(np.abs(pts) < grid16.half_width - 1e-9, axis=-1)
    # away from the wrapped edge row the reflected node is exactly -X
    assert np.allclose(neg[inside], -pts[inside])


def test_index_of(grid16):
    X = grid16.points[3, 11]
    assert grid16.index_of(X) == (3, 11)
    with pytest.raises(ValueError):
        grid16.index_of(X + 0.1)


def test_fourier_matrix_involutive_and_unitary(grid16):
    F = fourier_matrix(grid16)
    size = F.shape[0]
    # node values carry the same weight on both sides, so plain unitarity is the right test
    assert np.max(np.abs(F @ F - np.eye(size))) <= 1e-12
    assert np.max(np.abs(F.conj().T @ F - np.eye(size))) <= 1e-12


def test_fft_route_matches_dense_matrix(grid16, rng):
    a = PhaseFunction(grid16, rng.normal(size=grid16.shape) + 1j * rng.normal(size=grid16.shape))
    dense = (fourier_matrix(grid16) @ a.values.reshape(-1)).reshape(grid16.shape)
    assert np.max(np.abs(dense - symplectic_fourier(a).values)) <= 1e-12


@pytest.mark.parametrize("N", [16, 32, 64])
def test_fourier_unitary_involutive(space, rng, N):
    grid = PhaseGrid(space, N)
    a = PhaseFunction(grid, rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape))
    Fa = symplectic_fourier(a)
    assert abs(Fa.l2_norm() - a.l2_norm()) / a.l2_norm() <= 1e-12
    assert np.max(np.abs(symplectic_fourier(Fa).values - a.values)) <= 1e-12


def test_gaussian_is_fixed(grid32):
    a = PhaseFunction(grid32, gaussian(grid32, 0.5))
    assert np.max(np.abs(symplectic_fourier(a).values - a.values)) <= 1e-10


def test_fourier_of_shifted_gaussian_is_modulated(grid32):
    # F[a(. - Z)](X) = exp(-i [[X, Z]]) F[a](X) for node shifts Z
    Z = grid32.points[18, 15]
    a = PhaseFunction(grid32, gaussian(grid32, 1.0))
    moved = PhaseFunction(grid32, gaussian(grid32, 1.0, Z))
    phase = np.exp(-1j * symplectic_form(grid32.space, grid32.points, Z))
    assert np.max(np.abs(symplectic_fourier(moved).values - phase * symplectic_fourier(a).values)) <= 1e-10


def test_l2_norm_and_inner(grid16, rng):
    v = rng.normal(size=grid16.shape)
    a = PhaseFunction(grid16, v)
    assert a.l2_norm() ** 2 == pytest.approx(a.inner(a).real)
    assert a.inner(1j * a) == pytest.approx(1j * a.l2_norm() ** 2)


def test_phase_function_validation(grid16):
    with pytest.raises(ValueError):
        PhaseFunction(grid16, np.zeros((4, 4)))
    bad = np.zeros(grid16.shape)
    bad[0, 0] = np.nan
    with pytest.raises(ValueError):
        PhaseFunction(grid16, bad)


def test_tail_check(grid32):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert check_tails(gaussian(grid32, 1.0), (0, 1))
    with pytest.warns(TailWarning):
        assert not check_tails(np.ones(grid32.shape), (0, 1))


def test_reversed_orientation_negates_form_and_conjugates_cocycle(rng):
    standard, flipped = SymplecticSpace(1), SymplecticSpace(1, orientation=-1)
    X, Y = rng.normal(size=(2, 2))
    assert symplectic_form(flipped, X, Y) == -symplectic_form(standard, X, Y)
    assert cocycle(flipped, X, Y) == pytest.approx(np.conj(cocycle(standard, X, Y)), abs=1e-15)
    assert np.array_equal(flipped.J, -standard.J)
    with pytest.raises(ValueError):
        SymplecticSpace(1, orientation=0)


def test_reversed_fourier_matches_dense_matrix(rng):
    grid = PhaseGrid(SymplecticSpace(1, orientation=-1), 16)
    a = PhaseFunction(grid, rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape))
    dense = (fourier_matrix(grid) @ a.values.reshape(-1)).reshape(grid.shape)
    fast = symplectic_fourier(a)
    assert np.max(np.abs(dense - fast.values)) <= 1e-12
    assert np.max(np.abs(symplectic_fourier(fast).values - a.values)) <= 1e-12
