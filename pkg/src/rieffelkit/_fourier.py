"""Band-limited helpers on centered periodic grids.

Every grid here has an even number of points ``N`` per axis with nodes
``(j - N/2) * h``.  Samples are identified with the trigonometric
interpolant whose modes are ``-N/2 .. N/2-1`` (numpy ``fftfreq`` order), so
shifts by arbitrary real amounts compose exactly.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np


def wavenumbers(N: int, h: float) -> np.ndarray:
    return 2.0 * np.pi * np.fft.fftfreq(N, d=h)


def centered_nodes(N: int, h: float) -> np.ndarray:
    return (np.arange(N) - N // 2) * h


def shift(values: np.ndarray, displacement: Sequence[float], axes: Sequence[int], h: float) -> np.ndarray:
    """Return samples of ``u(. - displacement)`` for the interpolant ``u``.

    Displacements that are integer multiples of ``h`` reduce to a roll and
    are applied exactly.
    """
    values = np.asarray(values, dtype=complex)
    displacement = [float(s) for s in displacement]
    steps = [s / h for s in displacement]
    if all(abs(t - round(t)) < 1e-12 for t in steps):
        return np.roll(values, [int(round(t)) for t in steps], axis=tuple(axes))
    out = np.fft.fftn(values, axes=axes)
    for ax, s in zip(axes, displacement):
        if s == 0.0:
            continue
        k = wavenumbers(values.shape[ax], h)
        phase = np.exp(-1j * k * s)
        shape = [1] * values.ndim
        shape[ax] = -1
        out = out * phase.reshape(shape)
    return np.fft.ifftn(out, axes=axes)


def shift_batch(values: np.ndarray, displacements: np.ndarray, batch_axes: int, h: float) -> np.ndarray:
    """Shift each function in a batch by its own displacement.

    ``values`` has shape ``batch_shape + grid_shape`` where ``batch_shape``
    spans the first ``batch_axes`` axes; ``displacements`` has shape
    ``batch_shape + (dim,)`` with ``dim == len(grid_shape)``.
    """
    values = np.asarray(values, dtype=complex)
    grid_axes = tuple(range(batch_axes, values.ndim))
    spec = np.fft.fftn(values, axes=grid_axes)
    dim = len(grid_axes)
    batch_shape = values.shape[:batch_axes]
    phase = np.zeros(batch_shape + values.shape[batch_axes:], dtype=float)
    for i, ax in enumerate(grid_axes):
        k = wavenumbers(values.shape[ax], h)
        kshape = [1] * values.ndim
        kshape[ax] = -1
        s = displacements[..., i].reshape(batch_shape + (1,) * dim)
        phase = phase + s * k.reshape(kshape)
    return np.fft.ifftn(spec * np.exp(-1j * phase), axes=grid_axes)


def upsample(values: np.ndarray, axes: Sequence[int], factor: int = 2) -> np.ndarray:
    """Evaluate the interpolant on a grid refined ``factor`` times.

    Node ``s`` of the refined axis sits at ``(s - factor*N/2) * h / factor``
    so refined node ``factor*j`` coincides with coarse node ``j``.
    """
    values = np.asarray(values, dtype=complex)
    out = np.fft.fftn(values, axes=axes)
    for ax in axes:
        N = out.shape[ax]
        M = factor * N
        pad_shape = list(out.shape)
        pad_shape[ax] = M
        padded = np.zeros(pad_shape, dtype=complex)
        lo = [slice(None)] * out.ndim
        hi = [slice(None)] * out.ndim
        lo[ax] = slice(0, N // 2)
        hi[ax] = slice(N // 2, N)
        dst_hi = [slice(None)] * out.ndim
        dst_hi[ax] = slice(M - N // 2, M)
        padded[tuple(lo)] = out[tuple(lo)]
        padded[tuple(dst_hi)] = out[tuple(hi)]
        out = padded * factor
    return np.fft.ifftn(out, axes=axes)


def derivative(values: np.ndarray, orders: Sequence[int], axes: Sequence[int], h: float) -> np.ndarray:
    """Spectral partial derivative of the interpolant."""
    values = np.asarray(values, dtype=complex)
    if not any(orders):
        return values.copy()
    out = np.fft.fftn(values, axes=axes)
    for ax, m in zip(axes, orders):
        if m == 0:
            continue
        k = wavenumbers(values.shape[ax], h)
        shape = [1] * values.ndim
        shape[ax] = -1
        out = out * ((1j * k) ** m).reshape(shape)
    return np.fft.ifftn(out, axes=axes)


def nyquist_fraction(values: np.ndarray, axes: Sequence[int]) -> float:
    """Spectral mass in the outer quarter of each axis band, relative to total."""
    spec = np.abs(np.fft.fftn(np.asarray(values, dtype=complex), axes=axes))
    total = float(np.sqrt(np.sum(spec**2)))
    if total == 0.0:
        return 0.0
    mask = np.zeros(spec.shape, dtype=bool)
    for ax in axes:
        N = spec.shape[ax]
        f = np.abs(np.fft.fftfreq(N) * N)
        shape = [1] * spec.ndim
        shape[ax] = -1
        mask = mask | (f >= N / 4).reshape(shape)
    return float(np.sqrt(np.sum(spec[mask] ** 2)) / total)


def interpolate(values: np.ndarray, axes: Sequence[int], h: float, targets: np.ndarray) -> np.ndarray:
    """Evaluate the interpolant at the points ``targets`` along each of ``axes``.

    The same 1D target set is used on every axis; the result replaces each
    listed axis of length ``N`` by one of length ``len(targets)``.
    """
    out = np.asarray(values, dtype=complex)
    targets = np.asarray(targets, dtype=float)
    for ax in axes:
        N = out.shape[ax]
        origin = -(N // 2) * h
        k = wavenumbers(N, h)
        E = np.exp(1j * np.outer(targets - origin, k)) / N
        coeff = np.fft.fft(out, axis=ax)
        out = np.moveaxis(np.tensordot(E, np.moveaxis(coeff, ax, 0), axes=(1, 0)), 0, ax)
    return out
