"""Functions from the phase grid into the acted algebra, and their twisted convolutions.

A :class:`CPElement` stores one payload of the algebra per grid node, as an
array of shape ``grid.shape + spec.payload_shape``.  Integrals over Xi are
node sums with the normalized weight ``grid.w``; a function is taken to vanish
outside the box, so ``G(X - Y)`` is zero whenever ``X - Y`` leaves it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _fourier
from .algebra_actions import (
    ActionSpec,
    AlgebraElement,
    Backend,
    act_batch,
    mul_batch,
    norm_batch,
    seminorm_batch,
    star_batch,
)
from .phase_space import DEFAULT_TAIL_TOL, PhaseFunction, PhaseGrid, check_tails, cocycle

# complex entries materialized per chunk of output nodes
CHUNK_BUDGET = 1 << 21


@dataclass(frozen=True, eq=False)
class CPElement:
    grid: PhaseGrid
    spec: ActionSpec
    values: np.ndarray = field(repr=False)
    terms: tuple[tuple[PhaseFunction, AlgebraElement], ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.grid.space != self.spec.space:
            raise ValueError("grid and algebra act on different phase spaces")
        vals = np.asarray(self.values, dtype=complex)
        want = self.grid.shape + self.spec.payload_shape
        if vals.shape != want:
            raise ValueError(f"values of shape {vals.shape}, expected {want}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_terms(cls, terms) -> "CPElement":
        """Sum of elementary tensors ``a (x) f`` given as ``(PhaseFunction, AlgebraElement)`` pairs."""
        terms = tuple(terms)
        if not terms:
            raise ValueError("need at least one term")
        grid, spec = terms[0][0].grid, terms[0][1].spec
        dense = np.zeros(grid.shape + spec.payload_shape, dtype=complex)
        k = len(spec.payload_shape)
        for a, f in terms:
            if a.grid != grid or f.spec != spec:
                raise ValueError("terms live on different grids or backends")
            dense += a.values.reshape(grid.shape + (1,) * k) * f.payload
        return cls(grid, spec, dense, terms)

    @property
    def node_count(self) -> int:
        return math.prod(self.grid.shape)

    def flat(self) -> np.ndarray:
        """Values with the grid axes flattened to one."""
        return self.values.reshape((self.node_count,) + self.spec.payload_shape)

    def _check(self, other: "CPElement"):
        if not isinstance(other, CPElement) or other.grid != self.grid or other.spec != self.spec:
            raise ValueError("crossed-product elements over different grids or backends")

    def __add__(self, other):
        self._check(other)
        terms = self.terms + other.terms if self.terms and other.terms else None
        return CPElement(self.grid, self.spec, self.values + other.values, terms)

    def __sub__(self, other):
        self._check(other)
        return CPElement(self.grid, self.spec, self.values - other.values)

    def __mul__(self, c):
        terms = tuple((a * c, f) for a, f in self.terms) if self.terms else None
        return CPElement(self.grid, self.spec, self.values * c, terms)

    __rmul__ = __mul__

    def residual(self, other: "CPElement") -> float:
        self._check(other)
        return float(np.max(np.abs(self.values - other.values)))

    def relative_residual(self, other: "CPElement") -> float:
        scale = float(np.max(np.abs(other.values))) or 1.0
        return self.residual(other) / scale

    def sigma_weights(self) -> float:
        """Weight of one payload entry in the L2 pairing over Xi x Sigma."""
        if self.spec.variant is Backend.TRANSLATION:
            return self.spec.grid.w
        if self.spec.variant is Backend.INNER_SPECTRAL:
            return 1.0 / self.spec.d  # normalized trace
        return 1.0  # Parseval on the torus with normalized Haar measure

    def inner(self, other: "CPElement") -> complex:
        """L2 inner product over Xi x Sigma, antilinear in ``self``."""
        self._check(other)
        return complex(self.grid.w * self.sigma_weights() * np.vdot(self.values, other.values))

    def l2_norm(self) -> float:
        return math.sqrt(max(self.inner(self).real, 0.0))

    def tail_ok(self, tol: float = DEFAULT_TAIL_TOL) -> bool:
        mags = norm_batch(self.spec, self.values) if self.spec.is_spectral else np.max(
            np.abs(self.values), axis=tuple(range(self.grid.dim, self.values.ndim))
        )
        return check_tails(mags, tuple(range(self.grid.dim)), tol, what="crossed-product element")


def tensor(a: PhaseFunction, f: AlgebraElement) -> CPElement:
    return CPElement.from_terms([(a, f)])


def point_mass(grid: PhaseGrid, f: AlgebraElement) -> CPElement:
    """The element equal to ``f`` at the origin node and zero elsewhere."""
    vals = np.zeros(grid.shape + f.spec.payload_shape, dtype=complex)
    vals[(grid.N // 2,) * grid.dim] = f.payload
    return CPElement(grid, f.spec, vals)


def _difference_index(grid: PhaseGrid, rows: slice) -> tuple[np.ndarray, np.ndarray]:
    """Flat node index of ``X - Y`` for X in ``rows`` and every Y, and a mask
    of the pairs where ``X - Y`` stays inside the box (functions vanish outside)."""
    idx = np.indices(grid.shape).reshape(grid.dim, -1)
    diff = idx[:, rows, None] - idx[:, None, :] + grid.N // 2
    inside = np.all((diff >= 0) & (diff < grid.N), axis=0)
    return np.ravel_multi_index(tuple(diff % grid.N), grid.shape), inside


def _twisted_sum(G1: CPElement, G2: CPElement, symmetric: bool) -> CPElement:
    G1._check(G2)
    grid, spec = G1.grid, G1.spec
    G1.tail_ok()
    G2.tail_ok()
    nodes = G1.node_count
    payload = math.prod(spec.payload_shape)
    k = len(spec.payload_shape)
    A, B = G1.flat(), G2.flat()
    P = grid.points.reshape(nodes, grid.dim)
    out = np.empty_like(A)
    chunk = max(1, CHUNK_BUDGET // (nodes * payload))
    for c0 in range(0, nodes, chunk):
        rows = slice(c0, min(c0 + chunk, nodes))
        X = P[rows]
        index, inside = _difference_index(grid, rows)
        shifted = B[index] * inside.reshape(inside.shape + (1,) * k)  # G2(X - Y)
        if symmetric:
            left = act_batch(spec, A[None], (P[None] - X[:, None]) / 2)
            right = act_batch(spec, shifted, P[None] / 2)
        else:
            left = A[None]
            right = act_batch(spec, shifted, P[None])
        prod = mul_batch(spec, np.broadcast_to(left, right.shape), right)
        phase = cocycle(grid.space, X[:, None, :], P[None, :, :])
        out[rows] = grid.w * np.sum(phase.reshape(phase.shape + (1,) * k) * prod, axis=1)
    return CPElement(grid, spec, out.reshape(G1.values.shape))


def twisted_conv(G1: CPElement, G2: CPElement) -> CPElement:
    """Symmetrized twisted convolution.

    ``(G1 <> G2)(X) = int dY kappa(X, Y) Theta_{(Y-X)/2}[G1(Y)] Theta_{Y/2}[G2(X-Y)]``
    """
    return _twisted_sum(G1, G2, symmetric=True)


def twisted_conv_kn(G1: CPElement, G2: CPElement) -> CPElement:
    """Kohn-Nirenberg ordered twisted convolution.

    ``(G1 <>' G2)(X) = int dY kappa(X, Y) G1(Y) Theta_Y[G2(X-Y)]``
    """
    return _twisted_sum(G1, G2, symmetric=False)


def cp_involution(G: CPElement) -> CPElement:
    """``X -> G(-X)^*``."""
    vals = star_batch(G.spec, G.values[G.grid.negated_index()])
    terms = None
    if G.terms:
        terms = tuple((a.reflect().conj(), f.adjoint()) for a, f in G.terms)
    return CPElement(G.grid, G.spec, vals, terms)


def cp_involution_kn(G: CPElement) -> CPElement:
    """``X -> Theta_X[G(-X)^*]``, the involution matching the Kohn-Nirenberg ordering."""
    return c_alpha(1.0, cp_involution(G))


def c_alpha(alpha: float, G: CPElement) -> CPElement:
    """``[C_alpha G](X) = Theta_{alpha X}[G(X)]``."""
    if alpha == 0:
        return G
    return CPElement(G.grid, G.spec, act_batch(G.spec, G.values, alpha * G.grid.points))


def l1_norm(G: CPElement) -> float:
    return float(G.grid.w * np.sum(norm_batch(G.spec, G.flat())))


def xi_derivative(G: CPElement, beta) -> np.ndarray:
    """Spectral partial derivative in the Xi slot."""
    beta = tuple(int(b) for b in beta)
    if len(beta) != G.grid.dim:
        raise ValueError(f"multi-index must have {G.grid.dim} entries")
    return _fourier.derivative(G.values, beta, tuple(range(G.grid.dim)), G.grid.h)


def schwartz_seminorm(G: CPElement, k: int, beta, weight_order: int) -> float:
    """``sup_X (1 + |X|)^weight_order |(d^beta G)(X)|^k``."""
    if k < 0 or weight_order < 0:
        raise ValueError("orders must be non-negative")
    deriv = xi_derivative(G, beta)
    flat = deriv.reshape((G.node_count,) + G.spec.payload_shape)
    semi = seminorm_batch(G.spec, flat, k)
    radius = np.linalg.norm(G.grid.points.reshape(G.node_count, G.grid.dim), axis=-1)
    return float(np.max((1.0 + radius) ** weight_order * semi))


__all__ = [
    "CPElement",
    "c_alpha",
    "cp_involution",
    "cp_involution_kn",
    "l1_norm",
    "point_mass",
    "schwartz_seminorm",
    "tensor",
    "twisted_conv",
    "twisted_conv_kn",
    "xi_derivative",
]
