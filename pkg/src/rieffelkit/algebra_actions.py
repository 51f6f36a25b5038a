"""The acted algebra (A, Theta): elements, the action of Xi, derivations, seminorms.

Three concrete backends are provided:

``translation``
    A = functions on a periodic phase grid Sigma with Theta_X f(s) = f(s - X).
    Non-node shifts use trigonometric interpolation.  The norm is the sup
    over nodes.
``inner_spectral``
    A = d x d matrices with Theta_X f = exp(i X.H) f exp(-i X.H) for diagonal
    H_1..H_{2n}.  Entry (a, b) is homogeneous of frequency h_a - h_b.
``torus_modes``
    A = trigonometric polynomials on the torus R^{2n} / (2 pi Z)^{2n}, stored
    as a dense box of Fourier coefficients of radius R; Theta_X e_k =
    exp(i k.X) e_k.

Everything that operates on whole arrays of A-values (the crossed product
and the canonical maps) goes through the ``*_batch`` primitives here, which
broadcast over leading axes.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import numpy as np

from . import _fourier
from .phase_space import PhaseGrid, SymplecticSpace

DEFAULT_MAX_ORDER = 4
SPECTRAL_TOL = 1e-12


class BandLimitWarning(UserWarning):
    """Grid data carries spectral mass close to the Nyquist band."""


class Backend(str, Enum):
    TRANSLATION = "translation"
    INNER_SPECTRAL = "inner_spectral"
    TORUS_MODES = "torus_modes"


@dataclass(frozen=True, eq=False)
class ActionSpec:
    variant: Backend
    space: SymplecticSpace
    grid: PhaseGrid | None = None
    eigenvalues: np.ndarray | None = field(default=None, repr=False)
    radius: int | None = None

    def __post_init__(self):
        if self.variant is Backend.TRANSLATION:
            if self.grid is None or self.grid.space != self.space:
                raise ValueError("translation backend needs a phase grid over the same space")
        elif self.variant is Backend.INNER_SPECTRAL:
            ev = np.asarray(self.eigenvalues, dtype=float)
            if ev.ndim != 2 or ev.shape[0] != self.space.dim or ev.shape[1] < 1:
                raise ValueError(f"eigenvalues must have shape ({self.space.dim}, d)")
            if not np.all(np.isfinite(ev)):
                raise ValueError("eigenvalues must be finite")
            object.__setattr__(self, "eigenvalues", ev)
        elif self.variant is Backend.TORUS_MODES:
            if not isinstance(self.radius, (int, np.integer)) or self.radius < 0:
                raise ValueError("torus backend needs a non-negative integer mode radius")
        else:
            raise ValueError(f"unknown backend {self.variant!r}")

    @classmethod
    def translation(cls, grid: PhaseGrid) -> "ActionSpec":
        return cls(Backend.TRANSLATION, grid.space, grid=grid)

    @classmethod
    def inner_spectral(cls, eigenvalues, space: SymplecticSpace | None = None) -> "ActionSpec":
        """``eigenvalues[j]`` lists the diagonal of ``H_{j+1}``."""
        ev = np.atleast_2d(np.asarray(eigenvalues, dtype=float))
        if space is None:
            if ev.shape[0] % 2:
                raise ValueError("need an even number of generators")
            space = SymplecticSpace(ev.shape[0] // 2)
        return cls(Backend.INNER_SPECTRAL, space, eigenvalues=ev)

    @classmethod
    def torus_modes(cls, n: int, radius: int, space: SymplecticSpace | None = None) -> "ActionSpec":
        space = SymplecticSpace(n) if space is None else space
        if space.n != n:
            raise ValueError("space and torus dimension disagree")
        return cls(Backend.TORUS_MODES, space, radius=int(radius))

    def __eq__(self, other):
        if not isinstance(other, ActionSpec) or self.variant is not other.variant or self.space != other.space:
            return False
        if self.variant is Backend.TRANSLATION:
            return self.grid == other.grid
        if self.variant is Backend.INNER_SPECTRAL:
            return self.eigenvalues.shape == other.eigenvalues.shape and np.array_equal(self.eigenvalues, other.eigenvalues)
        return self.radius == other.radius

    def __hash__(self):
        return hash((self.variant, self.space))

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def d(self) -> int:
        if self.variant is not Backend.INNER_SPECTRAL:
            raise AttributeError("matrix size is only defined for the inner spectral backend")
        return self.eigenvalues.shape[1]

    @property
    def is_spectral(self) -> bool:
        return self.variant is not Backend.TRANSLATION

    @property
    def payload_shape(self) -> tuple[int, ...]:
        if self.variant is Backend.TRANSLATION:
            return self.grid.shape
        if self.variant is Backend.INNER_SPECTRAL:
            return (self.d, self.d)
        return (2 * self.radius + 1,) * self.dim

    @cached_property
    def frequencies(self) -> np.ndarray:
        """Frequency of every payload entry, shape ``payload_shape + (2n,)``.

        Spectral backends only: ``act(X)`` multiplies entry ``e`` by
        ``exp(i frequencies[e].X)``.
        """
        if self.variant is Backend.INNER_SPECTRAL:
            h = self.eigenvalues.T
            return h[:, None, :] - h[None, :, :]
        if self.variant is Backend.TORUS_MODES:
            r = np.arange(-self.radius, self.radius + 1)
            return np.stack(np.meshgrid(*([r] * self.dim), indexing="ij"), axis=-1).astype(float)
        raise ValueError("the translation backend has a continuum of frequencies")


# ---------------------------------------------------------------- batch primitives


def _payload_axes(spec: ActionSpec, arr: np.ndarray) -> tuple[int, ...]:
    k = len(spec.payload_shape)
    return tuple(range(arr.ndim - k, arr.ndim))


def act_batch(spec: ActionSpec, values: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Apply ``Theta_X`` to an array of payloads.

    ``values`` has shape ``batch + payload_shape`` and ``X`` has shape
    ``batch' + (2n,)`` with ``batch'`` broadcastable against ``batch``.
    """
    values = np.asarray(values, dtype=complex)
    X = np.asarray(X, dtype=float)
    k = len(spec.payload_shape)
    if spec.is_spectral:
        freqs = spec.frequencies
        Xb = X.reshape(X.shape[:-1] + (1,) * k + (spec.dim,))
        return values * np.exp(1j * np.sum(freqs * Xb, axis=-1))
    # translation: Theta_X f = f(. - X), i.e. a shift of the interpolant by X
    grid = spec.grid
    batch = np.broadcast_shapes(values.shape[:-k], X.shape[:-1])
    values = np.broadcast_to(values, batch + values.shape[-k:])
    X = np.broadcast_to(X, batch + (spec.dim,))
    return _fourier.shift_batch(values, X, batch_axes=len(batch), h=grid.h)


def mul_batch(spec: ActionSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Undeformed product in A, broadcast over leading axes."""
    if spec.variant is Backend.TRANSLATION:
        return a * b
    if spec.variant is Backend.INNER_SPECTRAL:
        return np.matmul(a, b)
    return _torus_convolve(spec, a, b)


def star_batch(spec: ActionSpec, a: np.ndarray) -> np.ndarray:
    if spec.variant is Backend.TRANSLATION:
        return np.conj(a)
    if spec.variant is Backend.INNER_SPECTRAL:
        return np.conj(np.swapaxes(a, -1, -2))
    # (f^*)_k = conj(f_{-k}): reverse every mode axis
    axes = _payload_axes(spec, a)
    return np.conj(np.flip(a, axis=axes))


def norm_batch(spec: ActionSpec, a: np.ndarray) -> np.ndarray:
    """The A-norm of every payload in a batch."""
    a = np.asarray(a, dtype=complex)
    if spec.variant is Backend.TRANSLATION:
        axes = _payload_axes(spec, a)
        return np.max(np.abs(a), axis=axes)
    if spec.variant is Backend.INNER_SPECTRAL:
        return np.linalg.norm(a, ord=2, axis=(-2, -1))
    return _torus_sup(spec, a)


def _fast_length(n: int) -> int:
    """Smallest integer >= n with no prime factor above 5."""
    while True:
        m = n
        for p in (2, 3, 5):
            while m % p == 0:
                m //= p
        if m == 1:
            return n
        n += 1


def _occupied_radius(spec: ActionSpec, a: np.ndarray) -> int:
    """Smallest r such that every nonzero coefficient in the batch has |k|_inf <= r."""
    axes = tuple(range(a.ndim - spec.dim))
    used = np.any(a != 0, axis=axes)
    if not used.any():
        return 0
    return int(np.max(np.abs(np.argwhere(used) - spec.radius)))


def _torus_convolve(spec: ActionSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    R = spec.radius
    side = 2 * R + 1
    # work on the occupied sub-boxes; phases never turn a zero coefficient nonzero
    ra, rb = _occupied_radius(spec, a), _occupied_radius(spec, b)
    a = a[(Ellipsis,) + (slice(R - ra, R + ra + 1),) * spec.dim]
    b = b[(Ellipsis,) + (slice(R - rb, R + rb + 1),) * spec.dim]
    reach = ra + rb  # the product lives on |k| <= ra + rb
    full = _fast_length(2 * reach + 1)  # linear convolution fits, padding is zero
    fa = np.fft.fftn(a, s=(full,) * spec.dim, axes=_payload_axes(spec, a))
    fb = np.fft.fftn(b, s=(full,) * spec.dim, axes=_payload_axes(spec, b))
    prod = fa * fb
    prod = np.fft.ifftn(prod, axes=_payload_axes(spec, prod))
    # index m of the linear convolution is mode m - reach
    lo = max(reach - R, 0)
    hi = reach + min(R, reach) + 1
    keep = (Ellipsis,) + (slice(lo, hi),) * spec.dim
    # norm of the entries outside the box, summed directly (no cancellation)
    outside = np.abs(prod) ** 2
    outside[keep] = 0.0
    lost = math.sqrt(float(np.sum(outside)))
    scale = float(np.sqrt(np.sum(np.abs(prod) ** 2))) or 1.0
    if lost > 1e-12 * scale:
        raise ValueError(f"torus product leaves the mode box of radius {R} (lost mass {lost:.2e}); enlarge the radius")
    r = min(R, reach)
    out = np.zeros(prod.shape[: prod.ndim - spec.dim] + (side,) * spec.dim, dtype=complex)
    out[(Ellipsis,) + (slice(R - r, R + r + 1),) * spec.dim] = prod[keep]
    return out


def _torus_sup(spec: ActionSpec, a: np.ndarray, candidates: int = 6, newton_steps: int = 5) -> np.ndarray:
    # lattice samples of |f|; Newton ascent on |f|^2 from the best few lattice
    # peaks, since the highest sample need not sit next to the highest peak
    side = 2 * spec.radius + 1
    L = max(8 * side, 32)
    axes = _payload_axes(spec, a)
    batch = a.shape[: a.ndim - spec.dim]
    spread = np.zeros(batch + (L,) * spec.dim, dtype=complex)
    slots = (np.arange(side) - spec.radius) % L
    spread[(Ellipsis,) + np.ix_(*([slots] * spec.dim))] = a
    grid_vals = np.abs(np.fft.ifftn(spread, axes=axes, norm="forward"))
    peak = np.ones(grid_vals.shape, dtype=bool)
    for ax in axes:
        for step in (1, -1):
            peak &= grid_vals >= np.roll(grid_vals, step, axis=ax)
    vals = grid_vals.reshape(batch + (-1,))
    ranked = np.where(peak.reshape(vals.shape), vals, -1.0)
    K = min(candidates, ranked.shape[-1])
    starts = np.argpartition(-ranked, K - 1, axis=-1)[..., :K]
    top = np.max(vals, axis=-1)

    coeffs = a.reshape(batch + (1, -1))
    k = spec.frequencies.reshape(-1, spec.dim)
    sigma = np.stack(np.unravel_index(starts, (L,) * spec.dim), axis=-1) * (2 * np.pi / L)
    for _ in range(newton_steps):
        wave = coeffs * np.exp(1j * sigma @ k.T)
        f = wave.sum(-1)
        grad_f = 1j * wave @ k
        hess_f = -np.einsum("...m,mi,mj->...ij", wave, k, k)
        grad = 2 * np.real(np.conj(f)[..., None] * grad_f)
        hess = 2 * np.real(np.conj(grad_f)[..., :, None] * grad_f[..., None, :] + np.conj(f)[..., None, None] * hess_f)
        # step along directions of negative curvature only; flat directions
        # (f may not depend on some angles) are left alone
        curv, vecs = np.linalg.eigh(hess)
        scale = np.max(np.abs(curv), axis=-1, keepdims=True) + 1e-300
        inv = np.where(curv < -1e-10 * scale, 1.0 / np.where(curv < 0, curv, -1.0), 0.0)
        coef = np.einsum("...ji,...j->...i", vecs, grad) * inv
        sigma = sigma - np.einsum("...ij,...j->...i", vecs, coef)
        value = np.abs(np.sum(coeffs * np.exp(1j * sigma @ k.T), axis=-1))
        top = np.maximum(top, np.max(value, axis=-1))
    return top


# ---------------------------------------------------------------- elements


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    spec: ActionSpec
    payload: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.asarray(self.payload, dtype=complex)
        if p.shape != self.spec.payload_shape:
            raise ValueError(f"payload shape {p.shape} does not match backend shape {self.spec.payload_shape}")
        object.__setattr__(self, "payload", p)

    def _check(self, other: "AlgebraElement"):
        if not isinstance(other, AlgebraElement) or other.spec != self.spec:
            raise ValueError("elements belong to different backends")

    def __add__(self, other):
        self._check(other)
        return AlgebraElement(self.spec, self.payload + other.payload)

    def __sub__(self, other):
        self._check(other)
        return AlgebraElement(self.spec, self.payload - other.payload)

    def __neg__(self):
        return AlgebraElement(self.spec, -self.payload)

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            self._check(other)
            return AlgebraElement(self.spec, mul_batch(self.spec, self.payload, other.payload))
        return AlgebraElement(self.spec, self.payload * other)

    def __rmul__(self, c):
        return AlgebraElement(self.spec, self.payload * c)

    def adjoint(self) -> "AlgebraElement":
        return AlgebraElement(self.spec, star_batch(self.spec, self.payload))

    def norm(self) -> float:
        return float(norm_batch(self.spec, self.payload))

    def distance(self, other: "AlgebraElement") -> float:
        """Largest entrywise deviation (a backend-independent residual)."""
        self._check(other)
        return float(np.max(np.abs(self.payload - other.payload)))


def unit(spec: ActionSpec) -> AlgebraElement:
    if spec.variant is Backend.TRANSLATION:
        return AlgebraElement(spec, np.ones(spec.payload_shape))
    if spec.variant is Backend.INNER_SPECTRAL:
        return AlgebraElement(spec, np.eye(spec.d))
    p = np.zeros(spec.payload_shape)
    p[(spec.radius,) * spec.dim] = 1.0
    return AlgebraElement(spec, p)


def matrix_unit(spec: ActionSpec, j: int, k: int) -> AlgebraElement:
    p = np.zeros(spec.payload_shape)
    p[j, k] = 1.0
    return AlgebraElement(spec, p)


def torus_mode(spec: ActionSpec, k) -> AlgebraElement:
    """The character ``e_k``."""
    k = tuple(int(v) for v in k)
    if len(k) != spec.dim or max(abs(v) for v in k) > spec.radius:
        raise ValueError(f"mode {k} outside the box of radius {spec.radius}")
    p = np.zeros(spec.payload_shape)
    p[tuple(v + spec.radius for v in k)] = 1.0
    return AlgebraElement(spec, p)


def act(X, f: AlgebraElement) -> AlgebraElement:
    """``Theta_X(f)`` for an arbitrary real ``X``."""
    X = f.spec.space.check(X)
    if X.ndim != 1:
        raise ValueError("act takes a single point; use act_batch for arrays")
    return AlgebraElement(f.spec, act_batch(f.spec, f.payload, X))


def derivation_batch(spec: ActionSpec, values: np.ndarray, alpha) -> np.ndarray:
    """``delta^alpha`` applied to every payload of a batch."""
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != spec.dim or min(alpha) < 0:
        raise ValueError(f"multi-index must have {spec.dim} non-negative entries")
    values = np.asarray(values, dtype=complex)
    if spec.is_spectral:
        factor = np.prod((1j * spec.frequencies) ** np.array(alpha), axis=-1)
        return values * factor
    axes = _payload_axes(spec, values)
    if sum(alpha) and _fourier.nyquist_fraction(values, axes) > 1e-8:
        warnings.warn("derivative of data that is not band-limited on the grid", BandLimitWarning, stacklevel=3)
    # Theta_X f = f(. - X) so each derivative in X is minus the spatial one
    return (-1) ** sum(alpha) * _fourier.derivative(values, alpha, axes, spec.grid.h)


def derivation(alpha, f: AlgebraElement) -> AlgebraElement:
    """``delta^alpha f``, the mixed derivative of ``X -> Theta_X f`` at 0."""
    return AlgebraElement(f.spec, derivation_batch(f.spec, f.payload, alpha))


def seminorm_batch(spec: ActionSpec, values: np.ndarray, k: int) -> np.ndarray:
    """Undeformed ``|.|^k`` of every payload of a batch."""
    total = 0.0
    for alpha in multi_indices(spec.dim, k):
        total = total + norm_batch(spec, derivation_batch(spec, values, alpha)) / multi_factorial(alpha)
    return np.asarray(total, dtype=float)


def multi_indices(dim: int, order: int):
    """All multi-indices of total degree exactly ``order``."""
    for combo in itertools.combinations_with_replacement(range(dim), order):
        alpha = [0] * dim
        for j in combo:
            alpha[j] += 1
        yield tuple(alpha)


def multi_factorial(alpha) -> int:
    return math.prod(math.factorial(a) for a in alpha)


def deformed_norm(f: AlgebraElement) -> float:
    """Norm in the deformed algebra; see :mod:`rieffelkit.rieffel`."""
    from .rieffel import deformed_norm as _impl

    return _impl(f)


def seminorm(k: int, f: AlgebraElement, deformed: bool = False, max_order: int = DEFAULT_MAX_ORDER) -> float:
    """``|f|^k = sum_{|alpha| = k} ||delta^alpha f|| / alpha!``.

    With ``deformed=True`` the norm of the deformed algebra replaces the
    original one; the derivations are the same.
    """
    if k < 0 or k > max_order:
        raise ValueError(f"order {k} outside 0..{max_order}")
    norm = deformed_norm if deformed else AlgebraElement.norm
    total = 0.0
    for alpha in multi_indices(f.spec.dim, k):
        total += norm(derivation(alpha, f)) / multi_factorial(alpha)
    return total


@dataclass(frozen=True)
class HomogeneousComponent:
    p: np.ndarray
    part: AlgebraElement


def homogeneous_decompose(f: AlgebraElement, tol: float = SPECTRAL_TOL) -> list[HomogeneousComponent]:
    """Split ``f`` into pieces on which the action is a pure phase.

    Entries sharing a frequency (up to ``tol``) are grouped into one part;
    zero entries are dropped.  The parts sum to ``f`` exactly.
    """
    spec = f.spec
    if not spec.is_spectral:
        raise ValueError("the translation backend has no discrete spectral decomposition")
    freqs = spec.frequencies.reshape(-1, spec.dim)
    flat = f.payload.reshape(-1)
    groups: dict[tuple, list[int]] = {}
    keys: list[np.ndarray] = []
    for idx in np.flatnonzero(flat):
        p = freqs[idx]
        for key_idx, ref in enumerate(keys):
            if np.max(np.abs(ref - p)) <= tol:
                groups[key_idx].append(idx)
                break
        else:
            keys.append(p)
            groups[len(keys) - 1] = [idx]
    out = []
    for key_idx, members in groups.items():
        part = np.zeros_like(flat)
        part[members] = flat[members]
        out.append(HomogeneousComponent(keys[key_idx].copy(), AlgebraElement(spec, part.reshape(spec.payload_shape))))
    return out


def random_element(spec: ActionSpec, rng: np.random.Generator, support_radius: int | None = None) -> AlgebraElement:
    """A seeded test element (Gaussian-weighted for the grid backend)."""
    if spec.variant is Backend.INNER_SPECTRAL:
        d = spec.d
        return AlgebraElement(spec, rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    if spec.variant is Backend.TORUS_MODES:
        r = spec.radius // 2 if support_radius is None else support_radius
        p = np.zeros(spec.payload_shape, dtype=complex)
        inner = tuple(slice(spec.radius - r, spec.radius + r + 1) for _ in range(spec.dim))
        p[inner] = rng.normal(size=(2 * r + 1,) * spec.dim) + 1j * rng.normal(size=(2 * r + 1,) * spec.dim)
        return AlgebraElement(spec, p)
    pts = spec.grid.points
    centre = rng.uniform(-0.5, 0.5, size=spec.dim)
    coeffs = rng.normal(size=spec.dim + 1) + 1j * rng.normal(size=spec.dim + 1)
    poly = coeffs[0] + pts @ coeffs[1:]
    return AlgebraElement(spec, poly * np.exp(-np.sum((pts - centre) ** 2, axis=-1) / 2))


__all__ = [
    "ActionSpec",
    "AlgebraElement",
    "Backend",
    "BandLimitWarning",
    "HomogeneousComponent",
    "act",
    "act_batch",
    "derivation",
    "derivation_batch",
    "homogeneous_decompose",
    "matrix_unit",
    "mul_batch",
    "norm_batch",
    "random_element",
    "seminorm",
    "seminorm_batch",
    "star_batch",
    "torus_mode",
    "unit",
]
