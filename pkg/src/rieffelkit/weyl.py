"""Schrodinger representation, Wigner transform and Weyl quantization.

Configuration space is sampled on ``N`` points per axis with the same
spacing ``h`` as the phase grid, so the phase grid is exactly the product
of a configuration grid with its Fourier-dual grid.  State vectors carry
the inner product ``<u, v> = h^n sum u conj(v)`` (linear in the first slot);
an operator is stored as the matrix acting on samples, whose Hilbert-Schmidt
and spectral norms are the norms of the operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _fourier
from .phase_space import PhaseFunction, PhaseGrid, SymplecticSpace, fourier_leading, symplectic_form


@dataclass(frozen=True)
class ConfigGrid:
    n: int
    N: int

    @classmethod
    def for_phase_grid(cls, grid: PhaseGrid) -> "ConfigGrid":
        return cls(grid.n, grid.N)

    @property
    def h(self) -> float:
        return math.sqrt(2.0 * math.pi / self.N)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.n

    @property
    def size(self) -> int:
        return self.N**self.n

    @cached_property
    def phase_grid(self) -> PhaseGrid:
        return PhaseGrid(SymplecticSpace(self.n), self.N)

    @cached_property
    def points(self) -> np.ndarray:
        """Nodes as an array of shape ``shape + (n,)``."""
        nodes = _fourier.centered_nodes(self.N, self.h)
        return np.stack(np.meshgrid(*([nodes] * self.n), indexing="ij"), axis=-1)

    def sample(self, func) -> np.ndarray:
        return np.asarray(func(self.points), dtype=complex)

    def inner(self, u, v) -> complex:
        return complex(self.h**self.n * np.vdot(v, u))

    def norm(self, u) -> float:
        return math.sqrt(self.h**self.n * float(np.sum(np.abs(u) ** 2)))


# ---------------------------------------------------------------- Heisenberg group


def heisenberg_mul(Xb, Yb) -> np.ndarray:
    """Group law ``X*Y = X + Y + [X, Y]/2`` on ``(x, xi, t)`` triples."""
    Xb = np.asarray(Xb, dtype=float)
    Yb = np.asarray(Yb, dtype=float)
    if Xb.shape != Yb.shape or Xb.shape[-1] % 2 != 1:
        raise ValueError("Heisenberg elements must be (2n+1)-vectors of equal shape")
    n = (Xb.shape[-1] - 1) // 2
    bracket = symplectic_form(SymplecticSpace(n), Xb[..., :-1], Yb[..., :-1])
    out = Xb + Yb
    out[..., -1] = out[..., -1] + 0.5 * bracket
    return out


def heisenberg_inv(Xb) -> np.ndarray:
    return -np.asarray(Xb, dtype=float)


def _shift_matrix(cfg: ConfigGrid, x) -> np.ndarray:
    """Matrix of ``u -> u(. + x)`` for the band-limited interpolant."""
    eye = np.eye(cfg.size, dtype=complex).reshape(cfg.shape + (cfg.size,))
    moved = _fourier.shift(eye, -np.asarray(x, dtype=float), axes=tuple(range(cfg.n)), h=cfg.h)
    return moved.reshape(cfg.size, cfg.size)


def proj_rep(cfg: ConfigGrid, X) -> np.ndarray:
    """``[pi(x, xi) u](y) = exp(i (y.xi + x.xi/2)) u(y + x)``."""
    X = np.asarray(X, dtype=float)
    n = cfg.n
    x, xi = X[:n], X[n:]
    y = cfg.points.reshape(-1, n)
    phase = np.exp(1j * (y @ xi + 0.5 * x @ xi))
    return phase[:, None] * _shift_matrix(cfg, x)


def schrodinger(cfg: ConfigGrid, Xb) -> np.ndarray:
    """Unitary ``Pi(x, xi, t)``; the centre acts by the character ``exp(-i t)``.

    With this character ``Pi(X*Y) = Pi(X) Pi(Y)`` holds for the group law of
    :func:`heisenberg_mul` together with ``pi(X) pi(Y) = kappa(X, Y) pi(X+Y)``.
    """
    Xb = np.asarray(Xb, dtype=float)
    return np.exp(-1j * Xb[-1]) * proj_rep(cfg, Xb[:-1])


# ---------------------------------------------------------------- Wigner / Weyl


def matrix_coefficient(cfg: ConfigGrid, u, v) -> PhaseFunction:
    """``X -> <u, pi(X) v>`` on the phase grid (grid shifts are exact rolls)."""
    n, N, h = cfg.n, cfg.N, cfg.h
    grid = cfg.phase_grid
    u = np.asarray(u, dtype=complex).reshape(cfg.shape)
    v = np.asarray(v, dtype=complex).reshape(cfg.shape)
    x_axes = tuple(range(n))
    # corr[x] = sum_y u(y) conj(v(y + x)) exp(-i y.xi) as a function of (x, xi):
    # for fixed x it is a centred DFT over y evaluated at xi.
    out = np.empty(grid.shape, dtype=complex)
    for idx in np.ndindex(*cfg.shape):
        v_shift = np.roll(v, [N // 2 - i for i in idx], axis=x_axes)  # v(y + x)
        prod = u * np.conj(v_shift)
        out[idx] = np.fft.fftshift(np.fft.fftn(np.fft.ifftshift(prod)))
    xi_pts = grid.points[..., n:]
    x_pts = grid.points[..., :n]
    out = out * np.exp(-0.5j * np.sum(x_pts * xi_pts, axis=-1)) * h**n
    return PhaseFunction(grid, out)


def wigner(cfg: ConfigGrid, u, v) -> PhaseFunction:
    """Wigner distribution ``W(u, v)``: the symplectic Fourier transform of ``X -> <u, pi(X) v>``."""
    coeff = matrix_coefficient(cfg, u, v)
    return PhaseFunction(coeff.grid, fourier_leading(coeff.values, cfg.n))


def _diagonals(cfg: ConfigGrid):
    """Index arrays ``(rows, cols)`` of shape ``(N^n [shift x], N^n [row y])``.

    ``cols`` is the row index of ``y + x`` (periodic), i.e. the support of
    the Weyl operator ``pi(x, .)``.
    """
    n, N = cfg.n, cfg.N
    j = np.indices(cfg.shape).reshape(n, -1)
    steps = j - N // 2
    cols = (j[:, None, :] + steps[:, :, None]) % N
    flat = np.ravel_multi_index(tuple(cols), cfg.shape)
    rows = np.broadcast_to(np.arange(cfg.size)[None, :], flat.shape)
    return rows, flat


def _half_phases(cfg: ConfigGrid) -> np.ndarray:
    """``exp(i x.xi / 2)`` over (x node, xi node), shape ``(N^n, N^n)``."""
    pts = cfg.points.reshape(-1, cfg.n)
    return np.exp(0.5j * pts @ pts.T)


def _centered_dft(values: np.ndarray, cfg: ConfigGrid, inverse: bool) -> np.ndarray:
    """Unnormalized centred DFT over the trailing configuration axes of ``(N^n, N^n)`` data."""
    axes = tuple(range(1, cfg.n + 1))
    b = values.reshape((values.shape[0],) + cfg.shape)
    b = np.fft.ifftshift(b, axes=axes)
    b = np.fft.ifftn(b, axes=axes, norm="forward") if inverse else np.fft.fftn(b, axes=axes)
    return np.fft.fftshift(b, axes=axes).reshape(values.shape)


def _standard(grid: PhaseGrid) -> None:
    if grid.space.reversed:
        raise ValueError("the Schrodinger representation is built for the standard orientation")


def weyl_op(a: PhaseFunction) -> np.ndarray:
    """Weyl quantization ``Op(a) = int dX (F a)(X) pi(X)``.

    The kernel is ``(2 pi)^-n int dxi exp(i (y - x).xi) a((x + y)/2, xi)``;
    the midpoints are reached by a double-resolution partial Fourier
    transform.  On the grid the map is exactly unitary from L2 onto
    Hilbert-Schmidt matrices, and ``Op(a # b) = Op(a) Op(b)`` for the
    translation-backend product.
    """
    grid = a.grid
    _standard(grid)
    cfg = ConfigGrid.for_phase_grid(grid)
    coeff = grid.w * fourier_leading(a.values, grid.n)
    # G[x, y] = sum_xi coeff[x, xi] exp(i (y + x/2).xi): the points y + x/2
    # lie on the doubled grid, a double-resolution partial Fourier transform
    coeff = coeff.reshape(cfg.size, cfg.size) * _half_phases(cfg)
    G = _centered_dft(coeff, cfg, inverse=True)
    rows, cols = _diagonals(cfg)
    T = np.zeros((cfg.size, cfg.size), dtype=complex)
    T[rows, cols] = G
    return T


def weyl_symbol(T: np.ndarray, grid: PhaseGrid) -> PhaseFunction:
    """Inverse of :func:`weyl_op`, via ``tr(pi(X)^* T)``."""
    _standard(grid)
    cfg = ConfigGrid.for_phase_grid(grid)
    T = np.asarray(T, dtype=complex)
    if T.shape != (cfg.size, cfg.size):
        raise ValueError(f"operator shape {T.shape} does not match grid ({cfg.size}, {cfg.size})")
    rows, cols = _diagonals(cfg)
    D = T[rows, cols]
    n = cfg.n
    # tr(pi(X)^* T) recovers the coefficient (F a)(X) exactly
    coeff = _centered_dft(D, cfg, inverse=False) * np.conj(_half_phases(cfg))
    coeff = coeff.reshape(grid.shape)
    return PhaseFunction(grid, fourier_leading(coeff, n))


def hs_norm(T: np.ndarray) -> float:
    return float(np.linalg.norm(T))


def op_norm(T: np.ndarray) -> float:
    return float(np.linalg.norm(T, 2))


def rieffel_norm_estimate(a: PhaseFunction) -> float:
    """Operator norm of ``Op(a)``, the deformed C*-norm of the symbol."""
    return op_norm(weyl_op(a))


def hermite_functions(cfg: ConfigGrid, count: int) -> list[np.ndarray]:
    """Orthonormal Hermite functions ``h_0 .. h_{count-1}`` sampled in 1D configuration space."""
    if cfg.n != 1:
        raise ValueError("hermite_functions is one-dimensional")
    x = cfg.points[..., 0]
    out = []
    prev = np.zeros_like(x)
    cur = np.pi**-0.25 * np.exp(-(x**2) / 2)
    for k in range(count):
        out.append(cur.astype(complex))
        nxt = math.sqrt(2.0 / (k + 1)) * x * cur - math.sqrt(k / (k + 1)) * prev
        prev, cur = cur, nxt
    return out


__all__ = [
    "ConfigGrid",
    "heisenberg_inv",
    "heisenberg_mul",
    "hermite_functions",
    "hs_norm",
    "matrix_coefficient",
    "op_norm",
    "proj_rep",
    "rieffel_norm_estimate",
    "schrodinger",
    "weyl_op",
    "weyl_symbol",
    "wigner",
]
