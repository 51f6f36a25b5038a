"""The deformed product ``#``, the product on A-valued functions, and Blackadar-Cuntz seminorms.

``f # g = 2^{2n} int int dY dZ exp(2i [[Y, Z]]) Theta_Y(f) Theta_Z(g)`` is
evaluated by four routes:

``SPECTRAL_EXACT``
    On homogeneous components the integral is a pure phase,
    ``f_p # g_q = kappa(p, q) f_p g_q``.
``GRID_REDUCED``
    Translation backend.  Integrating out one variable leaves
    ``(f # g)(X) = int dU exp(i [[U, X]]) f(X - U/2) (F g)(U)``; the
    half-nodes ``X - U/2`` are nodes of the twice refined grid.
``OPERATOR_ORACLE``
    Translation backend.  The symbol of ``Op(f) Op(g)``, computed on a grid
    with twice as many points per axis (the interpolants of ``f`` and ``g``
    restricted to the original box) and interpolated back.
``BRUTE_QUADRATURE``
    The double sum of the defining integral on a refined grid.  For
    spectral backends the phase of every pair of components is obtained
    from the windowed double integral of :func:`windowed_phase_integral`.
"""

from __future__ import annotations

import itertools
import math
import warnings
from enum import Enum

import numpy as np

from . import _fourier
from .algebra_actions import (
    DEFAULT_MAX_ORDER,
    ActionSpec,
    AlgebraElement,
    Backend,
    BandLimitWarning,
    derivation,
    homogeneous_decompose,
    multi_factorial,
    multi_indices,
    mul_batch,
)
from .crossed_product import CPElement
from .phase_space import (
    PhaseFunction,
    PhaseGrid,
    SymplecticSpace,
    check_tails,
    cocycle,
    fourier_leading,
    symplectic_form,
)
from .weyl import ConfigGrid, op_norm, weyl_op, weyl_symbol

# complex entries materialized per chunk of output nodes
CHUNK_BUDGET = 1 << 22
# refuse brute double sums whose dense slabs exceed this many complex entries
BRUTE_MAX_ENTRIES = 1 << 23


class Strategy(str, Enum):
    SPECTRAL_EXACT = "spectral_exact"
    GRID_REDUCED = "grid_reduced"
    OPERATOR_ORACLE = "operator_oracle"
    BRUTE_QUADRATURE = "brute_quadrature"


# ---------------------------------------------------------------- spectral backends


def _inner_spectral_phases(spec: ActionSpec) -> np.ndarray:
    """``kappa(p_ab, p_bc)`` indexed ``[a, b, c]``."""
    freqs = spec.frequencies
    return cocycle(spec.space, freqs[:, :, None, :], freqs[None, :, :, :])


def _torus_product(spec: ActionSpec, f: np.ndarray, g: np.ndarray) -> np.ndarray:
    R, dim = spec.radius, spec.dim
    out = np.zeros(spec.payload_shape, dtype=complex)
    modes = spec.frequencies
    for idx in zip(*np.nonzero(f)):
        k = np.array(idx) - R
        phased = g * cocycle(spec.space, k.astype(float), modes) * f[idx]
        # e_k # e_l lands on e_{k+l}; everything must stay inside the box
        lost = 0.0
        moved = phased
        for ax in range(dim):
            moved = np.roll(moved, k[ax], axis=ax)
            edge = np.arange(2 * R + 1) - k[ax]
            outside = (edge < 0) | (edge > 2 * R)
            shape = [1] * dim
            shape[ax] = -1
            lost = max(lost, float(np.max(np.abs(np.where(outside.reshape(shape), moved, 0)))))
            moved = np.where(outside.reshape(shape), 0, moved)
        if lost > 1e-14:
            raise ValueError(f"deformed product leaves the mode box of radius {R}; enlarge the radius")
        out += moved
    return out


def spectral_product(f: AlgebraElement, g: AlgebraElement) -> AlgebraElement:
    spec = f.spec
    if spec.variant is Backend.INNER_SPECTRAL:
        K = _inner_spectral_phases(spec)
        return AlgebraElement(spec, np.einsum("abc,ab,bc->ac", K, f.payload, g.payload))
    if spec.variant is Backend.TORUS_MODES:
        return AlgebraElement(spec, _torus_product(spec, f.payload, g.payload))
    raise ValueError("the exact phase law needs a spectral backend")


def phase_law_product(f: AlgebraElement, g: AlgebraElement, phase=None) -> AlgebraElement:
    """``sum_{p,q} phase(p, q) f_p g_q`` over homogeneous components (default phase ``kappa``)."""
    spec = f.spec
    if phase is None:
        phase = lambda p, q: cocycle(spec.space, p, q)  # noqa: E731
    out = np.zeros(spec.payload_shape, dtype=complex)
    for cf in homogeneous_decompose(f):
        for cg in homogeneous_decompose(g):
            out += phase(cf.p, cg.p) * mul_batch(spec, cf.part.payload, cg.part.payload)
    return AlgebraElement(spec, out)


def windowed_phase_integral(space: SymplecticSpace, p, q, N: int, rho: float = 1.5, order: int = 5) -> complex:
    """Quadrature of ``2^{2n} int int exp(2i [[Y, Z]] + i p.Y + i q.Z)`` with a flat-top window.

    The window ``exp(-(|Y| / R)^{2 order})`` with ``R = B / rho`` (``B`` the
    half-width of the ``N`` point self-dual box) regularizes the oscillatory
    integral; the double sum runs over the twice refined grid, where the
    inner sum over ``Z`` is exactly a discrete Fourier transform.
    """
    n, dim = space.n, space.dim
    grid = PhaseGrid(space, N)
    M = 2 * N
    hr = grid.h / 2
    nodes = (np.arange(M) - M // 2) * hr
    pts = np.stack(np.meshgrid(*([nodes] * dim), indexing="ij"), axis=-1)
    R = grid.half_width / rho
    window = np.exp(-((np.linalg.norm(pts, axis=-1) / R) ** (2 * order)))
    p = space.check(p)
    q = space.check(q)
    a = np.exp(1j * pts @ p) * window
    b = np.exp(1j * pts @ q) * window
    # 2 [[Y, Z]] = 2 hr^2 (j_z . j_eta - j_y . j_zeta) with 2 hr^2 = 2 pi / M:
    # a forward transform over the zeta axes and a backward one over the z axes
    x_axes, xi_axes = tuple(range(n)), tuple(range(n, dim))
    if space.reversed:
        x_axes, xi_axes = xi_axes, x_axes
    t = np.fft.ifftshift(b)
    t = np.fft.fftn(t, axes=xi_axes)
    t = np.fft.ifftn(t, axes=x_axes, norm="forward")
    t = np.fft.fftshift(t)
    # t is indexed by (j_eta, j_y); the sum needs it at Y = (y, eta)
    inner = np.transpose(t, tuple(range(n, dim)) + tuple(range(n)))
    wr = hr**dim / (2 * math.pi) ** n
    return complex(4**n * wr**2 * np.sum(a * inner))


def windowed_phase_integral_direct(space: SymplecticSpace, p, q, N: int, rho: float = 1.5, order: int = 5) -> complex:
    """Same double sum as :func:`windowed_phase_integral`, term by term (small ``N`` only)."""
    dim = space.dim
    grid = PhaseGrid(space, N)
    M = 2 * N
    hr = grid.h / 2
    nodes = (np.arange(M) - M // 2) * hr
    pts = np.stack(np.meshgrid(*([nodes] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    if pts.shape[0] ** 2 > BRUTE_MAX_ENTRIES:
        raise MemoryError(f"direct double sum over {pts.shape[0]} nodes squared exceeds the cap")
    R = grid.half_width / rho
    window = np.exp(-((np.linalg.norm(pts, axis=-1) / R) ** (2 * order)))
    a = np.exp(1j * pts @ space.check(p)) * window
    b = np.exp(1j * pts @ space.check(q)) * window
    K = np.exp(2j * symplectic_form(space, pts[:, None, :], pts[None, :, :]))
    wr = hr**dim / (2 * math.pi) ** space.n
    return complex(4**space.n * wr**2 * (a @ (K @ b)))


def brute_spectral_product(f: AlgebraElement, g: AlgebraElement, N: int = 32) -> AlgebraElement:
    """Defining double integral, evaluated per pair of homogeneous components."""
    space = f.spec.space
    return phase_law_product(f, g, phase=lambda p, q: windowed_phase_integral(space, p, q, N))


# ---------------------------------------------------------------- translation backend


def _batched(values: np.ndarray, grid: PhaseGrid) -> tuple[np.ndarray, tuple[int, ...]]:
    values = np.asarray(values, dtype=complex)
    if values.shape[: grid.dim] != grid.shape:
        raise ValueError(f"leading axes {values.shape[:grid.dim]} do not match the grid {grid.shape}")
    extra = values.shape[grid.dim :]
    return values.reshape(grid.shape + (-1,)), extra


def moyal_grid_reduced(f: np.ndarray, g: np.ndarray, grid: PhaseGrid) -> np.ndarray:
    """Single-integral reduction of the translation product.

    Trailing axes beyond the grid are a batch: ``f[..., i] # g[..., i]``.
    """
    f, extra = _batched(f, grid)
    g, extra_g = _batched(g, grid)
    if extra != extra_g:
        raise ValueError("batch shapes differ")
    dim, N = grid.dim, grid.N
    m = f.shape[-1]
    nodes = math.prod(grid.shape)
    fine = _fourier.upsample(f, tuple(range(dim)), 2)
    ghat = fourier_leading(g, grid.n, grid.space.orientation).reshape(nodes, m)
    idx = np.indices(grid.shape).reshape(dim, -1)
    P = grid.points.reshape(nodes, dim)
    out = np.empty((nodes, m), dtype=complex)
    chunk = max(1, CHUNK_BUDGET // (nodes * m))
    for c0 in range(0, nodes, chunk):
        rows = slice(c0, min(c0 + chunk, nodes))
        # refined index of X - U/2: 2 i_X - i_U + N/2 on the 2N point axis
        s = (2 * idx[:, rows, None] - idx[:, None, :] + N // 2) % (2 * N)
        halves = fine[tuple(s)]
        phase = np.exp(1j * symplectic_form(grid.space, P[None, :, :], P[rows, None, :]))
        out[rows] = grid.w * np.einsum("xu,xum,um->xm", phase, halves, ghat)
    return out.reshape(grid.shape + extra)


def _restrict_resample(values: np.ndarray, source: PhaseGrid, target: PhaseGrid) -> np.ndarray:
    """Interpolant of grid data at the target nodes, zero outside the source box."""
    nodes = target.axis_nodes
    B = source.half_width
    inside = (nodes >= -B - 1e-12) & (nodes < B - 1e-12)
    out = np.zeros(target.shape, dtype=complex)
    sub = _fourier.interpolate(values, tuple(range(source.dim)), source.h, nodes[inside])
    out[np.ix_(*([inside] * source.dim))] = sub
    return out


def moyal_operator_oracle(f: np.ndarray, g: np.ndarray, grid: PhaseGrid, oversample: int = 2) -> np.ndarray:
    """Symbol of ``Op(f) Op(g)`` on a grid ``oversample`` times finer in points per axis.

    Reversing the orientation reverses the product, so there the symbol of
    ``Op(g) Op(f)`` is returned.
    """
    f, extra = _batched(f, grid)
    g, _ = _batched(g, grid)
    if grid.space.reversed:
        f, g = g, f
    fine = PhaseGrid(SymplecticSpace(grid.n), oversample * grid.N)
    out = np.empty(f.shape, dtype=complex)
    for i in range(f.shape[-1]):
        a = PhaseFunction(fine, _restrict_resample(f[..., i], grid, fine))
        b = PhaseFunction(fine, _restrict_resample(g[..., i], grid, fine))
        sym = weyl_symbol(weyl_op(a) @ weyl_op(b), fine)
        out[..., i] = _fourier.interpolate(sym.values, tuple(range(grid.dim)), fine.h, grid.axis_nodes)
    return out.reshape(grid.shape + extra)


def moyal_brute(f: np.ndarray, g: np.ndarray, grid: PhaseGrid, max_entries: int = BRUTE_MAX_ENTRIES) -> np.ndarray:
    """Double sum of the defining integral on the twice refined grid.

    With ``Theta_Y f = f(. - Y)`` the sum reads
    ``2^{2n} w'^2 sum_{Y', Z'} exp(2i([[Y', Z']] + [[X, Y']] - [[X, Z']])) f(Y') g(Z')``.
    """
    dim, n = grid.dim, grid.n
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    if f.shape != grid.shape or g.shape != grid.shape:
        raise ValueError("brute quadrature takes single grid functions")
    nodes = math.prod(grid.shape)
    refined = 2**dim * nodes
    if nodes * refined > max_entries:
        raise MemoryError(f"brute quadrature needs {nodes * refined} entries per slab (cap {max_entries})")
    fr = _fourier.upsample(f, tuple(range(dim)), 2).reshape(-1)
    gr = _fourier.upsample(g, tuple(range(dim)), 2).reshape(-1)
    hr = grid.h / 2
    ax = (np.arange(2 * grid.N) - grid.N) * hr
    P = np.stack(np.meshgrid(*([ax] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    X = grid.points.reshape(nodes, dim)
    wr = hr**dim / (2 * math.pi) ** n
    left = np.exp(2j * symplectic_form(grid.space, X[:, None, :], P[None, :, :])) * fr
    right = np.exp(-2j * symplectic_form(grid.space, X[:, None, :], P[None, :, :])) * gr
    inner = np.empty((refined, nodes), dtype=complex)
    step = max(1, max_entries // refined)
    for c0 in range(0, refined, step):
        rows = slice(c0, min(c0 + step, refined))
        K = np.exp(2j * symplectic_form(grid.space, P[rows, None, :], P[None, :, :]))
        inner[rows] = K @ right.T
    return (4**n * wr**2 * np.sum(left * inner.T, axis=1)).reshape(grid.shape)


# ---------------------------------------------------------------- dispatch


_TRANSLATION_ROUTES = {
    Strategy.GRID_REDUCED: moyal_grid_reduced,
    Strategy.OPERATOR_ORACLE: moyal_operator_oracle,
    Strategy.BRUTE_QUADRATURE: moyal_brute,
}


def deform_product(f: AlgebraElement, g: AlgebraElement, strategy: Strategy | str | None = None, **options) -> AlgebraElement:
    """``f # g`` by the chosen route (default: exact phases or the grid reduction)."""
    if not isinstance(g, AlgebraElement) or f.spec != g.spec:
        raise ValueError("deformed product needs two elements of the same backend")
    spec = f.spec
    if strategy is None:
        strategy = Strategy.SPECTRAL_EXACT if spec.is_spectral else Strategy.GRID_REDUCED
    strategy = Strategy(strategy)
    if spec.is_spectral:
        if strategy is Strategy.SPECTRAL_EXACT:
            return spectral_product(f, g)
        if strategy is Strategy.BRUTE_QUADRATURE:
            return brute_spectral_product(f, g, **options)
        raise ValueError(f"strategy {strategy.value} is not available for the {spec.variant.value} backend")
    if strategy is Strategy.SPECTRAL_EXACT:
        raise ValueError("the translation backend has no discrete spectrum; use a grid strategy")
    grid = spec.grid
    for arr, name in ((f.payload, "left factor"), (g.payload, "right factor")):
        check_tails(arr, tuple(range(grid.dim)), what=name)
        if _fourier.nyquist_fraction(arr, tuple(range(grid.dim))) > 1e-8:
            warnings.warn(f"{name} is not band-limited on the grid", BandLimitWarning, stacklevel=2)
    return AlgebraElement(spec, _TRANSLATION_ROUTES[strategy](f.payload, g.payload, grid, **options))


def moyal(a: PhaseFunction, b: PhaseFunction, strategy: Strategy | str = Strategy.GRID_REDUCED) -> PhaseFunction:
    """Translation product of two phase-space functions."""
    spec = ActionSpec.translation(a.grid)
    out = deform_product(AlgebraElement(spec, a.values), AlgebraElement(spec, b.values), strategy)
    return PhaseFunction(a.grid, out.payload)


# ---------------------------------------------------------------- deformed norms


def left_multiplication_matrix(f: AlgebraElement) -> np.ndarray:
    """Matrix of ``g -> f # g`` on row-major ``d x d`` matrices (inner spectral backend)."""
    spec = f.spec
    if spec.variant is not Backend.INNER_SPECTRAL:
        raise ValueError("left multiplication matrix is defined for the inner spectral backend")
    d = spec.d
    K = _inner_spectral_phases(spec) * f.payload[:, :, None]  # [a, b, c]
    L = np.zeros((d, d, d, d), dtype=complex)  # [a, c, b, c']
    for c in range(d):
        L[:, c, :, c] = K[:, :, c]
    return L.reshape(d * d, d * d)


def _torus_section_norm(f: AlgebraElement, window: int) -> float:
    spec = f.spec
    R, dim = spec.radius, spec.dim
    cols = np.array(list(itertools.product(range(-window, window + 1), repeat=dim)), dtype=float)
    reach = window + R
    side = 2 * reach + 1
    if side**dim * len(cols) > BRUTE_MAX_ENTRIES:
        raise MemoryError("finite section too large; lower the padding")
    L = np.zeros((side**dim, len(cols)), dtype=complex)
    support = [np.array(i) for i in zip(*np.nonzero(f.payload))]
    for k_idx in support:
        k = (k_idx - R).astype(float)
        coeff = f.payload[tuple(k_idx)]
        target = cols + k + reach
        flat = np.ravel_multi_index(tuple(target.T.astype(int)), (side,) * dim)
        L[flat, np.arange(len(cols))] += coeff * cocycle(spec.space, k, cols)
    return op_norm(L)


def torus_deformed_norm(f: AlgebraElement, pad: int = 1) -> tuple[float, float]:
    """Finite-section norm of left ``#``-multiplication on the torus modes.

    Columns run over modes within ``radius + pad``; the second value is the
    change when one more shell is added (a padding-sensitivity flag).
    """
    if f.spec.variant is not Backend.TORUS_MODES:
        raise ValueError("torus backend only")
    window = f.spec.radius + pad
    base = _torus_section_norm(f, window)
    return base, _torus_section_norm(f, window + 1) - base


def deformed_norm(f: AlgebraElement) -> float:
    """C*-norm of ``f`` in the deformed algebra.

    Inner spectral: the norm of left ``#``-multiplication on the
    Hilbert-Schmidt space, exact because the trace is a ``#``-trace.
    Torus: finite section of left ``#``-multiplication (see
    :func:`torus_deformed_norm`).  Translation: the operator norm of
    ``Op(f)``.
    """
    spec = f.spec
    if spec.variant is Backend.INNER_SPECTRAL:
        return op_norm(left_multiplication_matrix(f))
    if spec.variant is Backend.TORUS_MODES:
        return torus_deformed_norm(f)[0]
    return op_norm(weyl_op(PhaseFunction(spec.grid, f.payload)))


# ---------------------------------------------------------------- the product on A-valued functions


def square_product(F: CPElement, G: CPElement, strategy: Strategy | str = Strategy.GRID_REDUCED) -> CPElement:
    """``F [] G``: the translation product (opposite order) in the Xi slot, ``#`` in the algebra.

    Tensor forms use ``(a (x) f) [] (b (x) g) = (b # a) (x) (f # g)``; dense
    spectral arrays use the reduced form
    ``(F [] G)_ac = sum_b kappa(p_ab, p_bc) G_bc # F_ab`` (torus: over modes).
    """
    F._check(G)
    strategy = Strategy(strategy)
    if F.terms and G.terms:
        terms = []
        for a, f in F.terms:
            for b, g in G.terms:
                terms.append((moyal(b, a, strategy), deform_product(f, g)))
        return CPElement.from_terms(terms)
    spec, grid = F.spec, F.grid
    route = _TRANSLATION_ROUTES[strategy]
    if spec.variant is Backend.INNER_SPECTRAL:
        d = spec.d
        left = np.broadcast_to(G.values[..., None, :, :], grid.shape + (d, d, d))  # G_bc at [a, b, c]
        right = np.broadcast_to(F.values[..., :, :, None], grid.shape + (d, d, d))  # F_ab at [a, b, c]
        prods = route(left, right, grid)
        out = np.einsum("abc,...abc->...ac", _inner_spectral_phases(spec), prods)
        return CPElement(grid, spec, out)
    if spec.variant is Backend.TORUS_MODES:
        R = spec.radius
        modes = spec.frequencies
        fk = [i for i in np.ndindex(*spec.payload_shape) if np.any(F.values[(Ellipsis,) + i])]
        gl = [i for i in np.ndindex(*spec.payload_shape) if np.any(G.values[(Ellipsis,) + i])]
        pairs = list(itertools.product(fk, gl))
        left = np.stack([G.values[(Ellipsis,) + l] for _, l in pairs], axis=-1)
        right = np.stack([F.values[(Ellipsis,) + k] for k, _ in pairs], axis=-1)
        prods = route(left, right, grid)
        out = np.zeros(F.values.shape, dtype=complex)
        for i, (k, l) in enumerate(pairs):
            target = tuple(a + b - R for a, b in zip(k, l))
            if min(target) < 0 or max(target) > 2 * R:
                raise ValueError("product leaves the mode box; enlarge the radius")
            out[(Ellipsis,) + target] += cocycle(spec.space, modes[k], modes[l]) * prods[..., i]
        return CPElement(grid, spec, out)
    raise ValueError("dense products on the translation backend need tensor forms")


def square_involution(F: CPElement) -> CPElement:
    """``X -> F(X)^*``."""
    from .algebra_actions import star_batch

    terms = tuple((a.conj(), f.adjoint()) for a, f in F.terms) if F.terms else None
    return CPElement(F.grid, F.spec, star_batch(F.spec, F.values), terms)


# ---------------------------------------------------------------- Blackadar-Cuntz seminorms


def bc_seminorm(k: int, f: AlgebraElement, deformed: bool = True, max_order: int = DEFAULT_MAX_ORDER) -> float:
    """``p_k(f) = sum_{|alpha| <= k} ||delta^alpha f|| / alpha!``.

    ``deformed=True`` uses the norm of the deformed algebra, in which the
    inequality ``p_k(f # g) <= sum_{i+j=k} p_i(f) p_j(g)`` is checked.
    """
    if k < 0 or k > max_order:
        raise ValueError(f"order {k} outside 0..{max_order}")
    norm = deformed_norm if deformed else AlgebraElement.norm
    total = 0.0
    for order in range(k + 1):
        for alpha in multi_indices(f.spec.dim, order):
            total += norm(derivation(alpha, f)) / multi_factorial(alpha)
    return total


def bc_defect(k: int, f: AlgebraElement, g: AlgebraElement) -> float:
    """``sum_{i+j=k} p_i(f) p_j(g) - p_k(f # g)``; non-negative when the inequality holds."""
    lhs = bc_seminorm(k, deform_product(f, g))
    rhs = sum(bc_seminorm(i, f) * bc_seminorm(k - i, g) for i in range(k + 1))
    return rhs - lhs


def _config_derivative_matrices(cfg: ConfigGrid) -> list[np.ndarray]:
    """Spectral ``d/dy_j`` on the configuration grid."""
    mats = []
    eye = np.eye(cfg.size, dtype=complex).reshape(cfg.shape + (cfg.size,))
    for j in range(cfg.n):
        orders = [0] * cfg.n
        orders[j] = 1
        d = _fourier.derivative(eye, orders, tuple(range(cfg.n)), cfg.h)
        mats.append(d.reshape(cfg.size, cfg.size))
    return mats


def heisenberg_jet(cfg: ConfigGrid, order: int) -> dict[tuple[int, ...], np.ndarray]:
    """Derivatives at the identity of ``Pi(x, xi, t)`` up to total ``order``.

    Keys are multi-indices over ``(x_1..x_n, xi_1..xi_n, t)``.  The series of
    ``Pi = exp(-i t) exp(i x.xi/2) exp(i xi.Q) exp(x.D)`` is multiplied out
    with ``Q`` the position and ``D`` the derivative on the grid.
    """
    n = cfg.n
    Q = [np.diag(cfg.points.reshape(-1, n)[:, j]).astype(complex) for j in range(n)]
    D = _config_derivative_matrices(cfg)
    ident = np.eye(cfg.size, dtype=complex)

    def power_product(mats, exps, scale):
        out = ident
        for m, e in zip(mats, exps):
            for _ in range(e):
                out = out @ (scale * m)
            out = out / math.factorial(e)
        return out

    jet = {}
    for key in itertools.chain.from_iterable(multi_indices(2 * n + 1, o) for o in range(order + 1)):
        A, Bx, c = key[:n], key[n : 2 * n], key[2 * n]
        coeff = np.zeros_like(ident)
        for m in itertools.product(*(range(min(a, b) + 1) for a, b in zip(A, Bx))):
            scalar = math.prod((0.5j) ** mj / math.factorial(mj) for mj in m)
            q_part = power_product(Q, [b - mj for b, mj in zip(Bx, m)], 1j)
            d_part = power_product(D, [a - mj for a, mj in zip(A, m)], 1.0)
            coeff = coeff + scalar * (q_part @ d_part)
        coeff = coeff * (-1j) ** c / math.factorial(c)
        jet[key] = coeff * multi_factorial(key)
    return jet


def realize(F: CPElement) -> np.ndarray:
    """Operator ``sum_ab Op(F_ab)^T (x) L_{E_ab}`` on configuration space times Hilbert-Schmidt space.

    This is multiplicative for ``[]`` on the inner spectral backend.
    """
    spec = F.spec
    if spec.variant is not Backend.INNER_SPECTRAL:
        raise ValueError("operator realization is implemented for the inner spectral backend")
    d = spec.d
    cfg = ConfigGrid.for_phase_grid(F.grid)
    out = np.zeros((cfg.size * d * d,) * 2, dtype=complex)
    for a in range(d):
        for b in range(d):
            if not np.any(F.values[..., a, b]):
                continue
            unit_ab = np.zeros((d, d))
            unit_ab[a, b] = 1.0
            op = weyl_op(PhaseFunction(F.grid, F.values[..., a, b])).T
            out += np.kron(op, left_multiplication_matrix(AlgebraElement(spec, unit_ab)))
    return out


def _hs_generators(spec: ActionSpec) -> list[np.ndarray]:
    """Generators of ``Theta`` on the Hilbert-Schmidt space: ``g -> [H_j, g]`` on row-major vectors."""
    d = spec.d
    ident = np.eye(d)
    return [np.kron(np.diag(h), ident) - np.kron(ident, np.diag(h)) for h in spec.eigenvalues]


def operator_bc_seminorm(k: int, T: np.ndarray, cfg: ConfigGrid, spec: ActionSpec) -> float:
    """Seminorm ``p_k`` of an operator on configuration space times Hilbert-Schmidt space.

    Sums ``||d^alpha1 Pi (x) 1 . ad^beta(T) . d^alpha2 Pi(-.) (x) 1|| / (alpha! beta!)``
    over ``|alpha1| + |alpha2| + |beta| <= k``; the Xi action on the second
    factor is conjugation by ``exp(i Z.G)`` with the generators of
    :func:`_hs_generators`.
    """
    jet = heisenberg_jet(cfg, k)
    hs = spec.d * spec.d
    ident = np.eye(hs)
    gens = [1j * np.kron(np.eye(cfg.size), g) for g in _hs_generators(spec)]
    dim = spec.dim
    ad_cache = {(0,) * dim: T}

    def ad(beta):
        if beta not in ad_cache:
            j = next(i for i, b in enumerate(beta) if b)
            prev = list(beta)
            prev[j] -= 1
            inner = ad(tuple(prev))
            ad_cache[beta] = gens[j] @ inner - inner @ gens[j]
        return ad_cache[beta]

    total = 0.0
    heis = 2 * cfg.n + 1
    for order in range(k + 1):
        for key in multi_indices(2 * heis + dim, order):
            a1, a2, beta = key[:heis], key[heis : 2 * heis], key[2 * heis :]
            left = np.kron(jet[a1], ident)
            right = (-1) ** sum(a2) * np.kron(jet[a2], ident)
            val = op_norm(left @ ad(beta) @ right)
            total += val / (multi_factorial(a1) * multi_factorial(a2) * multi_factorial(beta))
    return total


__all__ = [
    "Strategy",
    "bc_defect",
    "bc_seminorm",
    "brute_spectral_product",
    "deform_product",
    "deformed_norm",
    "heisenberg_jet",
    "left_multiplication_matrix",
    "moyal",
    "moyal_brute",
    "moyal_grid_reduced",
    "moyal_operator_oracle",
    "operator_bc_seminorm",
    "phase_law_product",
    "realize",
    "spectral_product",
    "square_involution",
    "square_product",
    "torus_deformed_norm",
    "windowed_phase_integral",
    "windowed_phase_integral_direct",
]
