"""The canonical maps between the product ``[]`` and the twisted convolutions.

``M = F o C_1`` carries ``[]`` to the symmetrized convolution and
``M' = C_{1/2} o F o C_1`` carries it to the Kohn-Nirenberg one, where ``F``
is the symplectic Fourier transform in the Xi slot.  Every map also has a
direct route that evaluates its integral node by node, so the two code
paths can be compared.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _fourier
from .algebra_actions import ActionSpec, AlgebraElement, Backend, act_batch
from .crossed_product import CHUNK_BUDGET, CPElement, c_alpha
from .phase_space import fourier_leading, symplectic_form, symplectic_fourier


def partial_fourier(F: CPElement) -> CPElement:
    """``(F F)(X) = int dY exp(-i [[X, Y]]) F(Y)``, slot-wise in Xi."""
    terms = None
    if F.terms:
        terms = tuple((symplectic_fourier(a), f) for a, f in F.terms)
    return CPElement(F.grid, F.spec, fourier_leading(F.values, F.grid.n, F.grid.space.orientation), terms)


def canonical_m(F: CPElement) -> CPElement:
    return partial_fourier(c_alpha(1.0, F))


def canonical_m_inv(G: CPElement) -> CPElement:
    return c_alpha(-1.0, partial_fourier(G))


def canonical_m_prime(F: CPElement) -> CPElement:
    return c_alpha(0.5, canonical_m(F))


def _direct(F: CPElement, displacement) -> CPElement:
    """``X -> w sum_Y exp(-i [[X, Y]]) Theta_{displacement(X, Y)}[F(Y)]``."""
    grid, spec = F.grid, F.spec
    nodes = F.node_count
    k = len(spec.payload_shape)
    P = grid.points.reshape(nodes, grid.dim)
    vals = F.flat()
    out = np.empty_like(vals)
    chunk = max(1, CHUNK_BUDGET // (nodes * math.prod(spec.payload_shape)))
    for c0 in range(0, nodes, chunk):
        rows = slice(c0, min(c0 + chunk, nodes))
        X = P[rows, None, :]
        Y = P[None, :, :]
        moved = act_batch(spec, vals[None], np.broadcast_to(displacement(X, Y), (X.shape[0], nodes, grid.dim)))
        kernel = np.exp(-1j * symplectic_form(grid.space, X, Y))
        out[rows] = grid.w * np.sum(kernel.reshape(kernel.shape + (1,) * k) * moved, axis=1)
    return CPElement(grid, spec, out.reshape(F.values.shape))


def canonical_m_direct(F: CPElement) -> CPElement:
    return _direct(F, lambda X, Y: Y + 0 * X)


def canonical_m_inv_direct(G: CPElement) -> CPElement:
    return _direct(G, lambda X, Y: -X + 0 * Y)


def canonical_m_prime_direct(F: CPElement) -> CPElement:
    return _direct(F, lambda X, Y: Y + X / 2)


def dual_action(Z, G: CPElement) -> CPElement:
    """``[beta_Z G](X) = exp(i [[X, Z]]) G(X)``."""
    Z = G.grid.space.check(Z)
    phase = np.exp(1j * symplectic_form(G.grid.space, G.grid.points, Z))
    k = len(G.spec.payload_shape)
    return CPElement(G.grid, G.spec, G.values * phase.reshape(phase.shape + (1,) * k))


def translate_act(Z, F: CPElement) -> CPElement:
    """``X -> Theta_Z[F(X + Z)]``, i.e. translation by ``-Z`` in Xi together with ``Theta_Z``."""
    Z = F.grid.space.check(Z)
    moved = _fourier.shift(F.values, -Z, tuple(range(F.grid.dim)), F.grid.h)
    return CPElement(F.grid, F.spec, act_batch(F.spec, moved, Z))


# ---------------------------------------------------------------- equivariant morphisms


class MorphismRule(str, Enum):
    IDENTITY = "identity"
    TORUS_TRANSLATION_PHASE = "torus_translation_phase"
    DIAGONAL_CONJUGATION = "diagonal_conjugation"


@dataclass(frozen=True, eq=False)
class EquivariantMorphism:
    """A *-morphism commuting with the actions, applied entrywise to payloads."""

    source: ActionSpec
    target: ActionSpec
    rule: MorphismRule
    parameter: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "rule", MorphismRule(self.rule))
        if self.rule is MorphismRule.IDENTITY:
            if self.source != self.target:
                raise ValueError("identity morphism needs equal source and target")
        elif self.rule is MorphismRule.TORUS_TRANSLATION_PHASE:
            if self.source.variant is not Backend.TORUS_MODES or self.source != self.target:
                raise ValueError("torus translation acts on one torus backend")
            object.__setattr__(self, "parameter", self.source.space.check(self.parameter))
        elif self.rule is MorphismRule.DIAGONAL_CONJUGATION:
            if self.source.variant is not Backend.INNER_SPECTRAL or self.source != self.target:
                raise ValueError("diagonal conjugation acts on one matrix backend")
            u = np.asarray(self.parameter, dtype=complex)
            if u.shape != (self.source.d,) or np.max(np.abs(np.abs(u) - 1.0)) > 1e-12:
                raise ValueError("diagonal conjugation needs a vector of unimodular entries")
            object.__setattr__(self, "parameter", u)

    @classmethod
    def identity(cls, spec: ActionSpec) -> "EquivariantMorphism":
        return cls(spec, spec, MorphismRule.IDENTITY)

    @classmethod
    def torus_translation(cls, spec: ActionSpec, sigma0) -> "EquivariantMorphism":
        """``f -> f(. + sigma0)`` on the torus: ``e_k -> exp(i k.sigma0) e_k``."""
        return cls(spec, spec, MorphismRule.TORUS_TRANSLATION_PHASE, sigma0)

    @classmethod
    def diagonal_conjugation(cls, spec: ActionSpec, u) -> "EquivariantMorphism":
        """``f -> u f u^*`` with ``u`` diagonal unitary (given by its diagonal)."""
        return cls(spec, spec, MorphismRule.DIAGONAL_CONJUGATION, u)

    def apply_batch(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=complex)
        if self.rule is MorphismRule.IDENTITY:
            return values
        if self.rule is MorphismRule.TORUS_TRANSLATION_PHASE:
            return values * np.exp(1j * self.source.frequencies @ self.parameter)
        u = self.parameter
        return values * (u[:, None] * np.conj(u)[None, :])

    def __call__(self, f: AlgebraElement) -> AlgebraElement:
        if f.spec != self.source:
            raise ValueError("element is not in the source algebra")
        return AlgebraElement(self.target, self.apply_batch(f.payload))


def lift_morphism(R: EquivariantMorphism, F: CPElement) -> CPElement:
    """``[R F](X) = R[F(X)]``."""
    if F.spec != R.source:
        raise ValueError("element is not over the morphism's source algebra")
    terms = tuple((a, R(f)) for a, f in F.terms) if F.terms else None
    return CPElement(F.grid, R.target, R.apply_batch(F.values), terms)


# ---------------------------------------------------------------- orthogonality


class ExtensionWarning(UserWarning):
    """A result outside the commutative setting, using the normalized trace."""


def orthogonality_pairing(F: CPElement, G: CPElement, bilinear: bool = False, allow_extension: bool = False) -> complex:
    """L2 pairing over Xi x Sigma.

    The sesquilinear form ``<F, G>`` is antilinear in ``F``; ``bilinear=True``
    gives ``<conj(F), G>``.  Matrix backends are refused unless
    ``allow_extension`` is set, in which case the normalized trace plays the
    role of the invariant measure.
    """
    if F.spec.variant is Backend.INNER_SPECTRAL:
        if not allow_extension:
            raise ValueError("orthogonality relations need a commutative backend (allow_extension for the trace variant)")
        warnings.warn("pairing on a matrix backend uses the normalized trace", ExtensionWarning, stacklevel=2)
    if bilinear:
        F = CPElement(F.grid, F.spec, np.conj(F.values))
    return F.inner(G)


__all__ = [
    "EquivariantMorphism",
    "ExtensionWarning",
    "MorphismRule",
    "canonical_m",
    "canonical_m_direct",
    "canonical_m_inv",
    "canonical_m_inv_direct",
    "canonical_m_prime",
    "canonical_m_prime_direct",
    "dual_action",
    "lift_morphism",
    "orthogonality_pairing",
    "partial_fourier",
    "translate_act",
]
