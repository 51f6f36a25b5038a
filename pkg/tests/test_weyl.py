import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import gaussian
from rieffelkit.checks import gaussian_pair
from rieffelkit.phase_space import PhaseFunction, PhaseGrid, SymplecticSpace, cocycle
from rieffelkit.rieffel import moyal
from rieffelkit.weyl import (
    ConfigGrid,
    heisenberg_inv,
    heisenberg_mul,
    hermite_functions,
    hs_norm,
    matrix_coefficient,
    op_norm,
    proj_rep,
    rieffel_norm_estimate,
    schrodinger,
    weyl_op,
    weyl_symbol,
    wigner,
)

triples = st.lists(st.floats(-5, 5, allow_nan=False), min_size=3, max_size=3).map(np.array)


@pytest.fixture(scope="module")
def cfg32():
    return ConfigGrid(1, 32)


@pytest.fixture(scope="module")
def states(cfg32):
    hs = hermite_functions(cfg32, 3)
    return hs[0] + 0.5 * hs[1], hs[2] - 0.3j * hs[0]


@settings(max_examples=60, deadline=None)
@given(triples, triples, triples)
def test_heisenberg_group_is_associative(X, Y, Z):
    lhs = heisenberg_mul(heisenberg_mul(X, Y), Z)
    rhs = heisenberg_mul(X, heisenberg_mul(Y, Z))
    assert np.allclose(lhs, rhs, atol=1e-11)


@settings(max_examples=30, deadline=None)
@given(triples)
def test_heisenberg_unit_and_inverse(X):
    zero = np.zeros(3)
    assert np.array_equal(heisenberg_mul(X, zero), X)
    assert np.allclose(heisenberg_mul(X, heisenberg_inv(X)), zero)


def test_heisenberg_commutator_sits_in_the_centre():
    X, Y = np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])
    XY, YX = heisenberg_mul(X, Y), heisenberg_mul(Y, X)
    assert np.allclose(XY[:2], YX[:2])
    # [[X, Y]] = y.xi - x.eta = -1 for this pair
    assert XY[2] - YX[2] == pytest.approx(-1.0)
    with pytest.raises(ValueError):
        heisenberg_mul(np.zeros(2), np.zeros(2))


def test_projective_representation_on_nodes(cfg32):
    assert np.allclose(proj_rep(cfg32, np.zeros(2)), np.eye(32))
    space = SymplecticSpace(1)
    rng = np.random.default_rng(3)
    for _ in range(5):
        X, Y = rng.integers(-8, 8, size=(2, 2)) * cfg32.h
        P = proj_rep(cfg32, X)
        assert np.max(np.abs(P.conj().T @ P - np.eye(32))) <= 1e-12
        lhs = P @ proj_rep(cfg32, Y)
        rhs = cocycle(space, X, Y) * proj_rep(cfg32, X + Y)
        assert np.max(np.abs(lhs - rhs)) <= 1e-12


def test_schrodinger_is_a_representation_on_nodes(cfg32):
    rng = np.random.default_rng(5)
    for _ in range(5):
        X, Y = rng.integers(-8, 8, size=(2, 3)) * cfg32.h
        lhs = schrodinger(cfg32, heisenberg_mul(X, Y))
        rhs = schrodinger(cfg32, X) @ schrodinger(cfg32, Y)
        assert np.max(np.abs(lhs - rhs)) <= 1e-12
    t = 0.4
    assert np.allclose(schrodinger(cfg32, [0, 0, t]), np.exp(-1j * t) * np.eye(32))


def test_off_grid_points_on_doubled_grid():
    cfg = ConfigGrid(1, 64)
    u = hermite_functions(cfg, 1)[0]
    X, Y = np.array([0.31, -0.77, 0.2]), np.array([-0.45, 0.62, -0.9])
    lhs = schrodinger(cfg, heisenberg_mul(X, Y)) @ u
    rhs = schrodinger(cfg, X) @ (schrodinger(cfg, Y) @ u)
    assert cfg.norm(lhs - rhs) <= 1e-10


def test_hermite_functions_are_orthonormal(cfg32):
    hs = hermite_functions(cfg32, 5)
    gram = np.array([[cfg32.inner(a, b) for b in hs] for a in hs])
    assert np.max(np.abs(gram - np.eye(5))) <= 1e-12
    with pytest.raises(ValueError):
        hermite_functions(ConfigGrid(2, 8), 2)


def test_matrix_coefficient_at_origin(cfg32, states):
    u, v = states
    coeff = matrix_coefficient(cfg32, u, v)
    assert coeff.values[16, 16] == pytest.approx(cfg32.inner(u, v), abs=1e-14)


def test_wigner_isometry(cfg32, states):
    u, v = states
    assert abs(wigner(cfg32, u, v).l2_norm() - cfg32.norm(u) * cfg32.norm(v)) <= 1e-10
    w = hermite_functions(cfg32, 4)[3]
    # orthogonality relation <W(u,v), W(u',v')> = <u', u> <v, v'>
    lhs = wigner(cfg32, u, v).inner(wigner(cfg32, w, v))
    rhs = cfg32.inner(w, u) * cfg32.inner(v, v)
    assert abs(lhs - rhs) <= 1e-10


def test_gaussian_wigner_function():
    # the matrix coefficient decays like exp(-|X|^2/4), so it needs the larger box
    cfg = ConfigGrid(1, 64)
    h0 = hermite_functions(cfg, 1)[0]
    grid = PhaseGrid(SymplecticSpace(1), 64)
    assert np.max(np.abs(wigner(cfg, h0, h0).values - 2 * gaussian(grid, 1.0))) <= 1e-10


def test_rank_one_operators(cfg32, states):
    u, v = states
    T = weyl_op(wigner(cfg32, u, v))
    assert np.max(np.abs(T - np.outer(u, np.conj(v)) * cfg32.h)) <= 1e-9


def test_constant_symbol_is_identity(grid32):
    one = PhaseFunction(grid32, np.ones(grid32.shape))
    assert np.max(np.abs(weyl_op(one) - np.eye(32))) <= 1e-12
    assert rieffel_norm_estimate(one * (3 - 4j)) == pytest.approx(5.0, abs=1e-12)


def test_hilbert_schmidt_unitarity_and_inverse(grid32, rng):
    a = PhaseFunction(grid32, rng.normal(size=grid32.shape) + 1j * rng.normal(size=grid32.shape))
    T = weyl_op(a)
    assert abs(hs_norm(T) - a.l2_norm()) <= 1e-12 * a.l2_norm()
    assert np.max(np.abs(weyl_symbol(T, grid32).values - a.values)) <= 1e-11
    S = rng.normal(size=(32, 32)) + 1j * rng.normal(size=(32, 32))
    assert np.max(np.abs(weyl_op(weyl_symbol(S, grid32)) - S)) <= 1e-11
    with pytest.raises(ValueError):
        weyl_symbol(np.eye(3), grid32)


def test_adjoint_on_band_limited_symbols(grid32):
    for s in gaussian_pair(grid32, 0.5):
        A = weyl_op(s)
        assert np.max(np.abs(weyl_op(s.conj()) - A.conj().T)) <= 1e-10 * np.max(np.abs(A))


def test_gaussian_symbol_spectrum(grid32):
    # Op(exp(-a|X|^2)) = sum_k (1 - a)^k / (1 + a)^(k + 1) |h_k><h_k|
    a = 0.5
    T = weyl_op(PhaseFunction(grid32, gaussian(grid32, a)))
    singular = np.linalg.svd(T, compute_uv=False)
    expected = (1 - a) ** np.arange(6) / (1 + a) ** (np.arange(6) + 1)
    assert np.max(np.abs(singular[:6] - expected)) <= 1e-10
    # a rapidly decaying symbol gives a numerically compact operator
    assert singular[-1] <= 1e-10


def test_reversed_orientation_is_refused(cfg32):
    grid = PhaseGrid(SymplecticSpace(1, orientation=-1), 32)
    with pytest.raises(ValueError):
        weyl_op(PhaseFunction(grid, gaussian(grid)))
    with pytest.raises(ValueError):
        weyl_symbol(np.eye(32), grid)


def test_projection_has_norm_one(cfg32, states):
    u = states[0] / cfg32.norm(states[0])
    P = weyl_op(wigner(cfg32, u, u))
    assert abs(op_norm(P) - 1) <= 1e-8
    assert np.max(np.abs(P @ P - P)) <= 1e-8


def test_op_is_multiplicative(grid32):
    a, b = gaussian_pair(grid32, 0.35)
    A, B = weyl_op(a), weyl_op(b)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        AB = weyl_op(moyal(a, b))
    assert op_norm(AB - A @ B) <= 1e-8 * op_norm(A) * op_norm(B)


def test_symbol_calculus_acts_on_wigner_functions():
    grid = PhaseGrid(SymplecticSpace(1), 64)
    cfg = ConfigGrid(1, 64)
    hs = hermite_functions(cfg, 3)
    u, v = hs[0] + 0.5 * hs[1], hs[2] - 0.3j * hs[0]
    a, _ = gaussian_pair(grid, 0.35)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lhs = moyal(a, wigner(cfg, u, v))
    rhs = wigner(cfg, weyl_op(a) @ u, v)
    assert np.max(np.abs(lhs.values - rhs.values)) <= 1e-8


def test_norm_estimate_matches_left_multiplication(grid32, cfg32):
    # L_a(b) = a # b on the orthonormal family W(h_j, h_k) of L2(Xi)
    hs = hermite_functions(cfg32, 4)
    u = hs[0] + 0.5 * hs[1]
    u = u / cfg32.norm(u)
    a = wigner(cfg32, u, u)
    basis = [wigner(cfg32, hj, hk) for hj in hs for hk in hs]
    gram = np.array([[b.inner(c) for c in basis] for b in basis])
    assert np.max(np.abs(gram - np.eye(len(basis)))) <= 1e-12
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        L = np.array([[b.inner(moyal(a, c)) for c in basis] for b in basis])
    assert abs(op_norm(L) - rieffel_norm_estimate(a)) <= 1e-6
