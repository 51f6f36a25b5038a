"""Phase space Xi = X x X*, its symplectic form, cocycle and Fourier transform.

Points of Xi are real vectors ``(x_1..x_n, xi_1..xi_n)``.  Functions on Xi
are sampled on a self-dual grid: ``N`` nodes per axis with spacing
``h = sqrt(2 pi / N)``, so the symplectic Fourier transform maps grid nodes
onto grid nodes.  The measure on Xi is Lebesgue divided by ``(2 pi)^n``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _fourier

MAX_HALF_DIMENSION = 3
DEFAULT_TAIL_TOL = 1e-10


class TailWarning(UserWarning):
    """Raised (as a warning) when grid data is not negligible at the box edge."""


@dataclass(frozen=True)
class SymplecticSpace:
    """The space Xi of dimension ``2n`` with pairing ``[[X, Y]] = y.xi - x.eta``.

    ``orientation=-1`` flips the pairing, which conjugates the cocycle and
    reverses the direction of the symplectic Fourier transform.
    """

    n: int = 1
    orientation: int = 1

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValueError(f"half-dimension must be a positive integer, got {self.n!r}")
        if self.n > MAX_HALF_DIMENSION:
            raise ValueError(f"half-dimension {self.n} exceeds supported maximum {MAX_HALF_DIMENSION}")
        if self.orientation not in (1, -1):
            raise ValueError(f"orientation must be 1 or -1, got {self.orientation!r}")

    @property
    def reversed(self) -> bool:
        return self.orientation == -1

    @property
    def dim(self) -> int:
        return 2 * self.n

    @cached_property
    def J(self) -> np.ndarray:
        """Matrix with ``X @ J @ Y == [[X, Y]]``."""
        n = self.n
        J = np.zeros((2 * n, 2 * n))
        J[:n, n:] = -np.eye(n)
        J[n:, :n] = np.eye(n)
        return self.orientation * J

    def check(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != self.dim:
            raise ValueError(f"expected vectors of length {self.dim}, got shape {X.shape}")
        return X


def symplectic_form(s: SymplecticSpace, X, Y) -> np.ndarray | float:
    """``[[X, Y]] = y.xi - x.eta`` (negated for the reversed orientation); broadcasts over leading axes."""
    X = s.check(X)
    Y = s.check(Y)
    n = s.n
    val = np.sum(Y[..., :n] * X[..., n:], axis=-1) - np.sum(X[..., :n] * Y[..., n:], axis=-1)
    if s.reversed:
        val = -val
    return float(val) if np.ndim(val) == 0 else val


def cocycle(s: SymplecticSpace, X, Y):
    """``kappa(X, Y) = exp(-i/2 [[X, Y]])``."""
    val = np.exp(-0.5j * np.asarray(symplectic_form(s, X, Y)))
    return complex(val) if np.ndim(val) == 0 else val


@dataclass(frozen=True)
class PhaseGrid:
    space: SymplecticSpace
    N: int

    def __post_init__(self):
        if not isinstance(self.N, (int, np.integer)) or self.N < 4 or self.N % 2:
            raise ValueError(f"points per axis must be an even integer >= 4, got {self.N!r}")

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def h(self) -> float:
        return math.sqrt(2.0 * math.pi / self.N)

    @property
    def w(self) -> float:
        """Quadrature weight per node for the normalized measure."""
        return self.h ** (2 * self.n) / (2.0 * math.pi) ** self.n

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.dim

    @property
    def half_width(self) -> float:
        return self.N * self.h / 2.0

    @cached_property
    def axis_nodes(self) -> np.ndarray:
        return _fourier.centered_nodes(self.N, self.h)

    @cached_property
    def points(self) -> np.ndarray:
        """All nodes, shape ``grid.shape + (2n,)``."""
        mesh = np.meshgrid(*([self.axis_nodes] * self.dim), indexing="ij")
        return np.stack(mesh, axis=-1)

    def sample(self, func) -> "PhaseFunction":
        """Evaluate ``func`` on the stacked node array and wrap it."""
        return PhaseFunction(self, np.asarray(func(self.points), dtype=complex))

    def index_of(self, X) -> tuple[int, ...]:
        """Grid index of a node (raises if ``X`` is not a node)."""
        X = self.space.check(X)
        steps = X / self.h
        if np.max(np.abs(steps - np.round(steps))) > 1e-9:
            raise ValueError(f"{X} is not a grid node")
        return tuple(int(round(t)) % self.N for t in (steps + self.N // 2))

    def negated_index(self) -> tuple[np.ndarray, ...]:
        """Fancy index realizing ``X -> -X`` (nodes wrap periodically)."""
        idx = (-np.arange(self.N)) % self.N
        return tuple(
            idx.reshape([-1 if a == ax else 1 for a in range(self.dim)]) for ax in range(self.dim)
        )


@dataclass(frozen=True, eq=False)
class PhaseFunction:
    grid: PhaseGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != self.grid.shape:
            raise ValueError(f"values of shape {vals.shape} do not match grid {self.grid.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("phase function has non-finite values")
        object.__setattr__(self, "values", vals)

    def l2_norm(self) -> float:
        return math.sqrt(self.grid.w * float(np.sum(np.abs(self.values) ** 2)))

    def inner(self, other: "PhaseFunction") -> complex:
        """``<self, other>``, antilinear in ``self``."""
        return complex(self.grid.w * np.vdot(self.values, other.values))

    def conj(self) -> "PhaseFunction":
        return PhaseFunction(self.grid, np.conj(self.values))

    def reflect(self) -> "PhaseFunction":
        """``X -> a(-X)``."""
        return PhaseFunction(self.grid, self.values[self.grid.negated_index()])

    def __add__(self, other):
        return PhaseFunction(self.grid, self.values + other.values)

    def __sub__(self, other):
        return PhaseFunction(self.grid, self.values - other.values)

    def __mul__(self, c):
        if isinstance(c, PhaseFunction):
            return PhaseFunction(self.grid, self.values * c.values)
        return PhaseFunction(self.grid, self.values * c)

    __rmul__ = __mul__


def boundary_mass(values: np.ndarray, grid_axes) -> float:
    """Largest modulus on the outermost layer of nodes, relative to the peak."""
    values = np.abs(np.asarray(values))
    peak = float(values.max()) if values.size else 0.0
    if peak == 0.0:
        return 0.0
    edge = 0.0
    for ax in grid_axes:
        edge = max(edge, float(np.take(values, 0, axis=ax).max()))
    return edge / peak


def check_tails(values: np.ndarray, grid_axes, tol: float = DEFAULT_TAIL_TOL, what: str = "input") -> bool:
    """Warn with :class:`TailWarning` if ``values`` is not small at the box edge."""
    mass = boundary_mass(values, grid_axes)
    if mass > tol:
        warnings.warn(f"{what}: boundary mass {mass:.2e} exceeds {tol:.0e}; wraparound may alias", TailWarning, stacklevel=3)
        return False
    return True


def make_selfdual_grid(s: SymplecticSpace, N: int) -> PhaseGrid:
    return PhaseGrid(s, N)


def _fourier_array(values: np.ndarray, n: int) -> np.ndarray:
    x_axes = tuple(range(n))
    xi_axes = tuple(range(n, 2 * n))
    b = np.fft.ifftshift(values, axes=x_axes + xi_axes)
    b = np.fft.fftn(b, axes=x_axes, norm="ortho")
    b = np.fft.ifftn(b, axes=xi_axes, norm="ortho")
    b = np.fft.fftshift(b, axes=x_axes + xi_axes)
    # output x comes from the input eta slot and output xi from the input y slot
    return np.transpose(b, xi_axes + x_axes + tuple(range(2 * n, b.ndim)))


def _reflect_leading(values: np.ndarray, dim: int) -> np.ndarray:
    """``X -> values(-X)`` over the first ``dim`` axes (nodes wrap periodically)."""
    for ax in range(dim):
        N = values.shape[ax]
        values = np.take(values, (-np.arange(N)) % N, axis=ax)
    return values


def fourier_leading(values: np.ndarray, n: int, orientation: int = 1) -> np.ndarray:
    """Symplectic Fourier transform over the first ``2n`` axes of an array.

    Trailing axes are carried along untouched (used for functions valued in
    an algebra).  For the reversed orientation the kernel is conjugated,
    which on the grid is exactly the standard transform read at ``-X``.
    """
    values = np.asarray(values, dtype=complex)
    out = _fourier_array(values, n)
    return _reflect_leading(out, 2 * n) if orientation == -1 else out


def symplectic_fourier(a: PhaseFunction) -> PhaseFunction:
    """``(F a)(X) = int dY exp(-i [[X, Y]]) a(Y)`` on the self-dual grid."""
    if not isinstance(a.grid, PhaseGrid):
        raise TypeError("symplectic_fourier needs a PhaseFunction on a PhaseGrid")
    return PhaseFunction(a.grid, fourier_leading(a.values, a.grid.n, a.grid.space.orientation))


def fourier_matrix(grid: PhaseGrid) -> np.ndarray:
    """Dense matrix of the discrete transform (small grids only)."""
    X = grid.points.reshape(-1, grid.dim)
    phase = symplectic_form(grid.space, X[:, None, :], X[None, :, :])
    return grid.w * np.exp(-1j * phase)


__all__ = [
    "DEFAULT_TAIL_TOL",
    "PhaseFunction",
    "PhaseGrid",
    "SymplecticSpace",
    "TailWarning",
    "boundary_mass",
    "check_tails",
    "cocycle",
    "fourier_leading",
    "fourier_matrix",
    "make_selfdual_grid",
    "symplectic_fourier",
    "symplectic_form",
]
