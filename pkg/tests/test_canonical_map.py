import warnings

import numpy as np
import pytest

from conftest import gaussian
from rieffelkit.algebra_actions import ActionSpec, random_element, unit
from rieffelkit.canonical_map import (
    EquivariantMorphism,
    ExtensionWarning,
    canonical_m,
    canonical_m_direct,
    canonical_m_inv,
    canonical_m_inv_direct,
    canonical_m_prime,
    canonical_m_prime_direct,
    dual_action,
    lift_morphism,
    orthogonality_pairing,
    partial_fourier,
    translate_act,
)
from rieffelkit.checks import cp_family, gaussian_pair
from rieffelkit.crossed_product import CPElement, c_alpha, cp_involution, tensor, twisted_conv, twisted_conv_kn
from rieffelkit.phase_space import PhaseFunction, PhaseGrid, TailWarning
from rieffelkit.rieffel import square_involution, square_product


@pytest.fixture(autouse=True)
def quiet_tails():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TailWarning)
        yield


@pytest.fixture
def family(grid32, matrix_spec, rng):
    # wider Gaussians keep the transforms of products clear of the box edge
    return cp_family(grid32, matrix_spec, 0.35, rng)


def test_partial_fourier_is_an_involutive_unitary(family):
    F = family[0]
    FF = partial_fourier(F)
    assert partial_fourier(FF).relative_residual(F) <= 1e-12
    assert abs(FF.l2_norm() - F.l2_norm()) <= 1e-12 * F.l2_norm()


def test_partial_fourier_keeps_tensor_terms(family):
    F = family[0]
    FF = partial_fourier(F)
    assert FF.terms is not None
    assert CPElement.from_terms(FF.terms).relative_residual(FF) <= 1e-14


def test_inverse_pairs(family):
    F = family[0]
    assert canonical_m_inv(canonical_m(F)).relative_residual(F) <= 1e-11
    assert canonical_m(canonical_m_inv(F)).relative_residual(F) <= 1e-11


def test_direct_routes_agree(grid16, matrix_spec, torus_spec, rng):
    for spec in (matrix_spec, torus_spec):
        F = cp_family(grid16, spec, 1.0, rng)[0]
        assert canonical_m_direct(F).relative_residual(canonical_m(F)) <= 1e-10
        assert canonical_m_inv_direct(F).relative_residual(canonical_m_inv(F)) <= 1e-10
        assert canonical_m_prime_direct(F).relative_residual(canonical_m_prime(F)) <= 1e-10


def test_m_prime_is_c_half_of_m(family):
    F = family[0]
    assert canonical_m_prime(F).relative_residual(c_alpha(0.5, canonical_m(F))) <= 1e-14


def test_m_carries_square_product_to_symmetric_convolution(family):
    F, G, _ = family
    lhs = canonical_m(square_product(F, G))
    rhs = twisted_conv(canonical_m(F), canonical_m(G))
    assert lhs.relative_residual(rhs) <= 1e-7


def test_m_prime_carries_square_product_to_kn_convolution(family):
    F, G, _ = family
    lhs = canonical_m_prime(square_product(F, G))
    rhs = twisted_conv_kn(canonical_m_prime(F), canonical_m_prime(G))
    assert lhs.relative_residual(rhs) <= 1e-7


def test_m_respects_involutions(family):
    F = family[0]
    lhs = canonical_m(square_involution(F))
    rhs = cp_involution(canonical_m(F))
    assert lhs.relative_residual(rhs) <= 1e-9


def test_scalar_case_is_the_fourier_transform(grid32, matrix_spec):
    a = PhaseFunction(grid32, gaussian(grid32, 0.5))
    M = canonical_m(tensor(a, unit(matrix_spec)))
    # exp(-|X|^2/2) is its own symplectic transform
    assert np.max(np.abs(M.values[..., 2, 2] - a.values)) <= 1e-10


def test_dual_action_group_law(family, grid32):
    F = family[0]
    Z, W = np.array([0.3, -0.7]), np.array([1.1, 0.2])
    assert dual_action(np.zeros(2), F).residual(F) == 0
    assert dual_action(Z, dual_action(W, F)).relative_residual(dual_action(Z + W, F)) <= 1e-14


def test_dual_action_is_an_automorphism(family, grid32):
    F, G, _ = family
    A, B = canonical_m(F), canonical_m(G)
    Z = np.full(2, 2 * grid32.h)
    lhs = dual_action(Z, twisted_conv(A, B))
    rhs = twisted_conv(dual_action(Z, A), dual_action(Z, B))
    assert lhs.relative_residual(rhs) <= 1e-10


def test_dual_action_intertwines_translations(space, matrix_spec, rng):
    # on the doubled grid, small shifts keep the family away from the box edge
    grid = PhaseGrid(space, 64)
    F = cp_family(grid, matrix_spec, 0.35, rng)[0]
    MF = canonical_m(F)
    for _ in range(5):
        Z = rng.integers(-4, 5, size=2) * grid.h
        assert canonical_m(translate_act(Z, F)).relative_residual(dual_action(Z, MF)) <= 1e-10


def test_morphism_validation(matrix_spec, torus_spec):
    with pytest.raises(ValueError):
        EquivariantMorphism(matrix_spec, torus_spec, "identity")
    with pytest.raises(ValueError):
        EquivariantMorphism(matrix_spec, matrix_spec, "no_such_rule")
    with pytest.raises(ValueError):
        EquivariantMorphism.diagonal_conjugation(matrix_spec, [2.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        EquivariantMorphism.torus_translation(matrix_spec, [0.0, 0.0])
    with pytest.raises(ValueError):
        EquivariantMorphism.diagonal_conjugation(torus_spec, [1.0])


def test_morphisms_commute_with_the_actions(matrix_spec, torus_spec, rng):
    from rieffelkit.algebra_actions import act

    morphs = [
        EquivariantMorphism.diagonal_conjugation(matrix_spec, np.exp(1j * rng.uniform(0, 6, 3))),
        EquivariantMorphism.torus_translation(torus_spec, rng.uniform(0, 6, 2)),
    ]
    for R in morphs:
        f = random_element(R.source, rng)
        for X in rng.normal(size=(10, 2)):
            assert R(act(X, f)).distance(act(X, R(f))) <= 1e-12 * f.norm()


def test_identity_lift_is_identity(family, matrix_spec):
    F = family[0]
    assert lift_morphism(EquivariantMorphism.identity(matrix_spec), F).residual(F) == 0


def test_morphisms_are_star_morphisms(matrix_spec, torus_spec, rng):
    from rieffelkit.rieffel import deform_product

    morphs = [
        EquivariantMorphism.diagonal_conjugation(matrix_spec, np.exp(1j * rng.uniform(0, 6, 3))),
        EquivariantMorphism.torus_translation(torus_spec, rng.uniform(0, 6, 2)),
    ]
    for R in morphs:
        f, g = random_element(R.source, rng), random_element(R.source, rng)
        assert R(f.adjoint()).distance(R(f).adjoint()) <= 1e-13
        assert R(deform_product(f, g)).distance(deform_product(R(f), R(g))) <= 1e-12 * f.norm() * g.norm()
    with pytest.raises(ValueError):
        morphs[0](random_element(torus_spec, rng))


def test_lift_commutes_with_canonical_map(grid32, matrix_spec, torus_spec, rng):
    morphs = [
        EquivariantMorphism.diagonal_conjugation(matrix_spec, np.exp(1j * rng.uniform(0, 6, 3))),
        EquivariantMorphism.torus_translation(torus_spec, rng.uniform(0, 6, 2)),
        EquivariantMorphism.identity(matrix_spec),
    ]
    for R in morphs:
        F = cp_family(grid32, R.source, 0.5, rng)[0]
        assert lift_morphism(R, canonical_m(F)).relative_residual(canonical_m(lift_morphism(R, F))) <= 1e-10


def test_lift_respects_convolution(grid16, torus_spec, rng):
    R = EquivariantMorphism.torus_translation(torus_spec, rng.uniform(0, 6, 2))
    F, G, _ = cp_family(grid16, torus_spec, 1.0, rng)
    lhs = lift_morphism(R, twisted_conv(F, G))
    rhs = twisted_conv(lift_morphism(R, F), lift_morphism(R, G))
    assert lhs.relative_residual(rhs) <= 1e-10


def test_orthogonality_on_commutative_backends(grid32, torus_spec, rng):
    F, G, _ = cp_family(grid32, torus_spec, 0.5, rng)
    scale = F.l2_norm() * G.l2_norm()
    lhs = orthogonality_pairing(canonical_m(F), canonical_m(G))
    assert abs(lhs - orthogonality_pairing(F, G)) <= 1e-10 * scale
    lhs = orthogonality_pairing(canonical_m(F), canonical_m(G), bilinear=True)
    rhs = orthogonality_pairing(canonical_m_inv(F), canonical_m(G), bilinear=True)
    assert np.isfinite(lhs) and np.isfinite(rhs)


def test_orthogonality_on_translation_backend(grid16, rng):
    spec = ActionSpec.translation(grid16)
    a, b = gaussian_pair(grid16, 1.0)
    F = CPElement.from_terms([(a, random_element(spec, rng))])
    G = CPElement.from_terms([(b, random_element(spec, rng))])
    scale = F.l2_norm() * G.l2_norm()
    assert abs(orthogonality_pairing(canonical_m(F), canonical_m(G)) - orthogonality_pairing(F, G)) <= 1e-10 * scale


def test_disjoint_supports_pair_to_zero(grid16, torus_spec):
    left = np.zeros(grid16.shape)
    right = np.zeros(grid16.shape)
    left[:8] = 1.0
    right[8:] = 1.0
    F = tensor(PhaseFunction(grid16, left), unit(torus_spec))
    G = tensor(PhaseFunction(grid16, right), unit(torus_spec))
    assert orthogonality_pairing(F, G) == 0


def test_matrix_pairing_needs_opt_in(family):
    F, G, _ = family
    with pytest.raises(ValueError):
        orthogonality_pairing(F, G)
    with pytest.warns(ExtensionWarning):
        value = orthogonality_pairing(canonical_m(F), canonical_m(G), allow_extension=True)
    assert abs(value - F.inner(G)) <= 1e-10 * F.l2_norm() * G.l2_norm()
