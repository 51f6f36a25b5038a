"""Catalog of identity checks run by the command-line verifier.

Every check is a function of a :class:`CheckContext` returning one or more
:class:`Measurement` values.  Random data comes from a generator seeded by
the suite seed and the check name, so checks are reproducible one by one.
"""

from __future__ import annotations

import math
import warnings
import zlib
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .algebra_actions import (
    ActionSpec,
    AlgebraElement,
    act,
    derivation,
    homogeneous_decompose,
    matrix_unit,
    random_element,
    torus_mode,
)
from .canonical_map import (
    EquivariantMorphism,
    canonical_m,
    canonical_m_direct,
    canonical_m_inv,
    canonical_m_inv_direct,
    canonical_m_prime,
    canonical_m_prime_direct,
    dual_action,
    lift_morphism,
    orthogonality_pairing,
    translate_act,
)
from .crossed_product import CPElement, c_alpha, cp_involution, twisted_conv, twisted_conv_kn
from .phase_space import PhaseFunction, PhaseGrid, SymplecticSpace, TailWarning, cocycle, symplectic_fourier
from .rieffel import (
    Strategy,
    bc_defect,
    bc_seminorm,
    deform_product,
    deformed_norm,
    moyal,
    spectral_product,
    square_involution,
    square_product,
    windowed_phase_integral,
)
from .weyl import (
    ConfigGrid,
    heisenberg_mul,
    hermite_functions,
    hs_norm,
    op_norm,
    proj_rep,
    schrodinger,
    weyl_op,
    weyl_symbol,
    wigner,
)


@dataclass(frozen=True)
class Measurement:
    residual: float | None
    params: dict = field(default_factory=dict)
    error: str | None = None


@dataclass(frozen=True)
class Check:
    name: str
    anchor: str
    backend: str
    tol: float
    run: Callable[["CheckContext"], list[Measurement]]
    suite: str
    refinement: bool = False


@dataclass
class CheckContext:
    n: int
    N: int
    d: int
    seed: int
    eigen_scale: float
    gaussian_width: float
    torus_radius: int
    name: str = ""
    eigenvalues: tuple | None = None
    strategy: Strategy = Strategy.GRID_REDUCED
    orientation: int = 1

    def rng(self) -> np.random.Generator:
        return np.random.default_rng([self.seed, zlib.crc32(self.name.encode())])

    @cached_property
    def space(self) -> SymplecticSpace:
        return SymplecticSpace(self.n, self.orientation)

    def grid(self, N: int | None = None) -> PhaseGrid:
        return PhaseGrid(self.space, N or self.N)

    def spectral_spec(self, rng, d: int | None = None) -> ActionSpec:
        d = d or self.d
        # always draw, so explicit eigenvalues leave the rest of the stream unchanged
        drawn = rng.uniform(-self.eigen_scale, self.eigen_scale, size=(self.space.dim, d))
        if self.eigenvalues is not None and d == self.d:
            return ActionSpec.inner_spectral(np.asarray(self.eigenvalues, dtype=float), self.space)
        return ActionSpec.inner_spectral(drawn, self.space)

    def torus_spec(self) -> ActionSpec:
        return ActionSpec.torus_modes(self.n, self.torus_radius, self.space)


# ---------------------------------------------------------------- test families


def gaussian_pair(grid: PhaseGrid, width: float) -> tuple[PhaseFunction, PhaseFunction]:
    """Two Gaussian-Hermite symbols ``exp(-width |X|^2)`` times low-degree polynomials."""
    P = grid.points
    a = np.exp(-width * np.sum(P**2, axis=-1)) * (1 + 0.2 * P[..., 0])
    b = np.exp(-width * np.sum((P - 0.2) ** 2, axis=-1)) * (1 - 0.2j * P[..., grid.n])
    return PhaseFunction(grid, a), PhaseFunction(grid, b)


def cp_family(grid: PhaseGrid, spec: ActionSpec, width: float, rng) -> tuple[CPElement, CPElement, CPElement]:
    a, b = gaussian_pair(grid, width)
    small = None if spec.variant.value != "torus_modes" else 1
    el = lambda: random_element(spec, rng, small) if small else random_element(spec, rng)  # noqa: E731
    F = CPElement.from_terms([(a, el()), (b, el())])
    G = CPElement.from_terms([(b, el()), (a * 0.5, el())])
    H = CPElement.from_terms([(a, el())])
    return F, G, H


def _quiet(fn):
    def wrapped(ctx):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TailWarning)
            return fn(ctx)

    wrapped.__name__ = fn.__name__
    return wrapped


def _rel(lhs: np.ndarray, rhs: np.ndarray) -> float:
    scale = float(np.max(np.abs(rhs))) or 1.0
    return float(np.max(np.abs(lhs - rhs))) / scale


def _one(residual: float, **params) -> list[Measurement]:
    return [Measurement(float(residual), params)]


# ---------------------------------------------------------------- phase space


def check_cocycle(ctx):
    rng = ctx.rng()
    X, Y, Z = (rng.uniform(-5, 5, size=(1000, ctx.space.dim)) for _ in range(3))
    s = ctx.space
    res = np.abs(cocycle(s, X, Y) * cocycle(s, X + Y, Z) - cocycle(s, Y, Z) * cocycle(s, X, Y + Z))
    return _one(res.max(), triples=1000)


def check_cocycle_antisymmetry(ctx):
    rng = ctx.rng()
    X, Y = (rng.uniform(-5, 5, size=(1000, ctx.space.dim)) for _ in range(2))
    return _one(np.abs(cocycle(ctx.space, X, Y) * cocycle(ctx.space, Y, X) - 1).max(), pairs=1000)


def _fourier_sizes(ctx):
    return sorted({16, 32, ctx.N, 64}) if ctx.n == 1 else [ctx.N]


def check_fourier_unitary(ctx):
    rng = ctx.rng()
    out = []
    for N in _fourier_sizes(ctx):
        grid = ctx.grid(N)
        a = PhaseFunction(grid, rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape))
        out.append(Measurement(abs(symplectic_fourier(a).l2_norm() / a.l2_norm() - 1), {"N": N}))
    return out


def check_fourier_involutive(ctx):
    rng = ctx.rng()
    out = []
    for N in _fourier_sizes(ctx):
        grid = ctx.grid(N)
        a = PhaseFunction(grid, rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape))
        out.append(Measurement(_rel(symplectic_fourier(symplectic_fourier(a)).values, a.values), {"N": N}))
    return out


def check_gaussian_fixed_point(ctx):
    grid = ctx.grid()
    a = grid.sample(lambda P: np.exp(-np.sum(P**2, axis=-1) / 2))
    return _one(np.abs(symplectic_fourier(a).values - a.values).max(), N=ctx.N)


# ---------------------------------------------------------------- acted algebra


def _spectral_specs(ctx, rng):
    return [ctx.spectral_spec(rng), ctx.torus_spec()]


def check_act_group_law(ctx):
    rng = ctx.rng()
    worst = 0.0
    for spec in _spectral_specs(ctx, rng):
        f = random_element(spec, rng)
        for _ in range(10):
            X, Y = rng.uniform(-3, 3, size=(2, spec.dim))
            worst = max(worst, act(X, act(Y, f)).distance(act(X + Y, f)))
    return _one(worst)


def check_act_automorphism(ctx):
    rng = ctx.rng()
    worst = 0.0
    for spec in _spectral_specs(ctx, rng):
        f, g = random_element(spec, rng, 1), random_element(spec, rng, 1)
        X = rng.uniform(-3, 3, size=spec.dim)
        scale = (f * g).norm()
        worst = max(worst, act(X, f * g).distance(act(X, f) * act(X, g)) / scale)
        worst = max(worst, act(X, f.adjoint()).distance(act(X, f).adjoint()) / f.norm())
        worst = max(worst, abs(act(X, f).norm() - f.norm()) / f.norm())
    return _one(worst)


def check_derivation_fd(ctx):
    rng = ctx.rng()
    spec = ctx.spectral_spec(rng)
    f = random_element(spec, rng)
    step = 1e-4
    worst = 0.0
    for j in range(spec.dim):
        e = np.zeros(spec.dim)
        e[j] = step
        fd = (act(e, f) - act(-e, f)) * (1 / (2 * step))
        alpha = tuple(int(i == j) for i in range(spec.dim))
        worst = max(worst, fd.distance(derivation(alpha, f)))
    return _one(worst, step=step)


def check_leibniz(ctx):
    rng = ctx.rng()
    spec = ctx.spectral_spec(rng)
    f, g = random_element(spec, rng), random_element(spec, rng)
    worst = 0.0
    for j in range(spec.dim):
        alpha = tuple(int(i == j) for i in range(spec.dim))
        lhs = derivation(alpha, f * g)
        rhs = derivation(alpha, f) * g + f * derivation(alpha, g)
        worst = max(worst, lhs.distance(rhs) / max(lhs.norm(), 1.0))
    return _one(worst)


def check_homogeneous_phase(ctx):
    rng = ctx.rng()
    worst = 0.0
    for spec in _spectral_specs(ctx, rng):
        f = random_element(spec, rng)
        comps = homogeneous_decompose(f)
        total = sum((c.part for c in comps[1:]), comps[0].part)
        worst = max(worst, total.distance(f))
        for X in rng.uniform(-3, 3, size=(100, spec.dim)):
            for c in comps[:8]:
                worst = max(worst, act(X, c.part).distance(c.part * np.exp(1j * c.p @ X)))
    return _one(worst, samples=100)


# ---------------------------------------------------------------- deformed product


def check_phase_law_exact(ctx):
    rng = ctx.rng()
    spec = ctx.spectral_spec(rng)
    freqs = spec.frequencies
    worst = 0.0
    for a in range(spec.d):
        for b in range(spec.d):
            for c in range(spec.d):
                lhs = spectral_product(matrix_unit(spec, a, b), matrix_unit(spec, b, c))
                rhs = matrix_unit(spec, a, c) * cocycle(spec.space, freqs[a, b], freqs[b, c])
                worst = max(worst, lhs.distance(rhs))
    tspec = ctx.torus_spec()
    r = tspec.radius // 2
    for k in np.ndindex(*(2 * r + 1,) * tspec.dim):
        k = np.array(k) - r
        l = rng.integers(-r, r + 1, size=tspec.dim)
        lhs = spectral_product(torus_mode(tspec, k), torus_mode(tspec, l))
        rhs = torus_mode(tspec, k + l) * cocycle(tspec.space, k.astype(float), l.astype(float))
        worst = max(worst, lhs.distance(rhs))
    return _one(worst)


def _phase_pairs(ctx, rng, count=6):
    spec = ctx.spectral_spec(rng)
    freqs = spec.frequencies
    idx = [tuple(rng.integers(0, spec.d, size=3)) for _ in range(count)]
    return [(freqs[a, b], freqs[b, c]) for a, b, c in idx]


def _phase_quadrature_residual(ctx, rng, N):
    pairs = _phase_pairs(ctx, rng)
    return max(abs(windowed_phase_integral(ctx.space, p, q, N) - cocycle(ctx.space, p, q)) for p, q in pairs)


def check_phase_law_quadrature(ctx):
    return _one(_phase_quadrature_residual(ctx, ctx.rng(), ctx.N), N=ctx.N, pairs=6)


def check_phase_law_quadrature_refinement(ctx):
    coarse = _phase_quadrature_residual(ctx, ctx.rng(), ctx.N)
    fine = _phase_quadrature_residual(ctx, ctx.rng(), 2 * ctx.N)
    # passes when the refined residual is at least ten times smaller
    return _one(10 * fine / coarse, N=ctx.N, coarse=coarse, fine=fine)


def check_brute_product(ctx):
    rng = ctx.rng()
    spec = ctx.spectral_spec(rng)
    f, g = random_element(spec, rng), random_element(spec, rng)
    exact = deform_product(f, g, Strategy.SPECTRAL_EXACT)
    brute = deform_product(f, g, Strategy.BRUTE_QUADRATURE, N=ctx.N)
    return _one(brute.distance(exact) / float(np.max(np.abs(exact.payload))), N=ctx.N)


def check_torus_commutation(ctx):
    spec = ctx.torus_spec()
    r = spec.radius // 2
    worst = 0.0
    for k in np.ndindex(*(2 * r + 1,) * spec.dim):
        for l in np.ndindex(*(2 * r + 1,) * spec.dim):
            k_, l_ = np.array(k) - r, np.array(l) - r
            lhs = spectral_product(torus_mode(spec, k_), torus_mode(spec, l_))
            rhs = spectral_product(torus_mode(spec, l_), torus_mode(spec, k_)) * np.exp(-1j * k_ @ spec.space.J @ l_)
            worst = max(worst, lhs.distance(rhs))
    return _one(worst)


def check_deformed_associativity(ctx):
    rng = ctx.rng()
    spec = ctx.spectral_spec(rng)
    f, g, h = (random_element(spec, rng) for _ in range(3))
    lhs = deform_product(deform_product(f, g), h)
    rhs = deform_product(f, deform_product(g, h))
    res = _rel(lhs.payload, rhs.payload)
    inv = _rel(deform_product(f, g).adjoint().payload, deform_product(g.adjoint(), f.adjoint()).payload)
    return _one(max(res, inv))


def check_deformed_cstar(ctx):
    rng = ctx.rng()
    spec = ctx.spectral_spec(rng)
    f = random_element(spec, rng)
    n = deformed_norm(f)
    return _one(abs(deformed_norm(deform_product(f.adjoint(), f)) - n * n) / (n * n))


def _strategy_pair(first: Strategy, second: Strategy):
    def run(ctx):
        grid = ctx.grid()
        a, b = gaussian_pair(grid, ctx.gaussian_width)
        try:
            x = moyal(a, b, first).values
            y = moyal(a, b, second).values
        except MemoryError as exc:
            return [Measurement(None, {"N": ctx.N}, error=str(exc))]
        return _one(np.max(np.abs(x - y)), N=ctx.N)

    run.__name__ = f"check_{first.value}_vs_{second.value}"
    return _quiet(run)


def check_square_associativity(ctx):
    rng = ctx.rng()
    grid = ctx.grid()
    spec = ctx.spectral_spec(rng)
    F, G, H = cp_family(grid, spec, ctx.gaussian_width, rng)
    lhs = square_product(square_product(F, G), H)
    rhs = square_product(F, square_product(G, H))
    return _one(lhs.relative_residual(rhs), N=ctx.N)


def check_square_dense_route(ctx):
    rng = ctx.rng()
    grid = ctx.grid()
    spec = ctx.spectral_spec(rng)
    F, G, _ = cp_family(grid, spec, ctx.gaussian_width, rng)
    tensor_route = square_product(F, G)
    dense_route = square_product(CPElement(grid, spec, F.values), CPElement(grid, spec, G.values))
    return _one(dense_route.relative_residual(tensor_route), N=ctx.N)


def check_bc_inequality(ctx):
    rng = ctx.rng()
    worst = math.inf
    for _ in range(100):
        d = int(rng.integers(2, 9))
        spec = ActionSpec.inner_spectral(rng.uniform(-1, 1, size=(ctx.space.dim, d)), ctx.space)
        f, g = random_element(spec, rng), random_element(spec, rng)
        for k in range(4):
            worst = min(worst, bc_defect(k, f, g))
    # residual is the worst violation; zero when every inequality holds
    return _one(max(0.0, -worst), pairs=100, max_order=3, min_slack=worst)


def check_bc_p0(ctx):
    rng = ctx.rng()
    spec = ctx.spectral_spec(rng)
    f = random_element(spec, rng)
    return _one(abs(bc_seminorm(0, f) - deformed_norm(f)))


# ---------------------------------------------------------------- Weyl calculus


def _states(cfg: ConfigGrid):
    hs = hermite_functions(cfg, 3)
    return hs[0] + 0.5 * hs[1], hs[2] - 0.3j * hs[0]


def _coherent(cfg: ConfigGrid):
    x = cfg.points[..., 0]
    return (np.pi**-0.25 * np.exp(-(x**2) / 2)).astype(complex).reshape(-1)


def check_heisenberg(ctx):
    """Grid-node pairs at N are exact; off-grid pairs need the doubled grid.

    Modulating by exp(i y.eta) moves the coherent state's spectrum towards
    the Nyquist frequency, where its tail is about exp(-(sqrt(pi N/2) - |eta|)^2 / 2).
    """
    rng = ctx.rng()
    out = []
    for N, on_grid in ((ctx.N, True), (2 * ctx.N, False)):
        cfg = ConfigGrid(1, N)
        u = _coherent(cfg)
        worst = 0.0
        for _ in range(5):
            if on_grid:
                XY = rng.integers(-N // 4, N // 4, size=(2, 3)) * cfg.h
                X, Y = XY
            else:
                X, Y = rng.uniform(-1, 1, size=(2, 3))
            lhs = schrodinger(cfg, heisenberg_mul(X, Y)) @ u
            rhs = schrodinger(cfg, X) @ (schrodinger(cfg, Y) @ u)
            worst = max(worst, cfg.norm(lhs - rhs))
            lhs = proj_rep(cfg, X[:2]) @ (proj_rep(cfg, Y[:2]) @ u)
            rhs = cocycle(SymplecticSpace(1), X[:2], Y[:2]) * (proj_rep(cfg, X[:2] + Y[:2]) @ u)
            worst = max(worst, cfg.norm(lhs - rhs))
        out.append(Measurement(worst, {"N": N, "points": "grid" if on_grid else "random"}))
    return out


def check_op_homomorphism(ctx):
    grid = ctx.grid()
    a, b = gaussian_pair(grid, ctx.gaussian_width)
    A, B = weyl_op(a), weyl_op(b)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        AB = weyl_op(moyal(a, b, ctx.strategy))
    return _one(op_norm(AB - A @ B) / (op_norm(A) * op_norm(B)), N=ctx.N)


def check_wigner_moyal(ctx):
    N = 2 * ctx.N
    grid = ctx.grid(N)
    cfg = ConfigGrid(1, N)
    a, _ = gaussian_pair(grid, ctx.gaussian_width)
    u, v = _states(cfg)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lhs = moyal(a, wigner(cfg, u, v), ctx.strategy)
    rhs = wigner(cfg, weyl_op(a) @ u, v)
    return _one(np.max(np.abs(lhs.values - rhs.values)), N=N)


def check_rank_one(ctx):
    cfg = ConfigGrid(1, ctx.N)
    u, v = _states(cfg)
    T = weyl_op(wigner(cfg, u, v))
    # <w|v> u as a matrix: w -> h sum conj(v) w
    target = np.outer(u, np.conj(v)) * cfg.h
    return _one(np.max(np.abs(T - target)), N=ctx.N)


def check_hs_unitarity(ctx):
    rng = ctx.rng()
    grid = ctx.grid()
    a = PhaseFunction(grid, rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape))
    T = weyl_op(a)
    unitary = abs(hs_norm(T) - a.l2_norm()) / a.l2_norm()
    inverse = _rel(weyl_symbol(T, grid).values, a.values)
    # the adjoint rule sees the symbol's boundary mass (a wrapped node picks up
    # a sign), so it is measured on unit-width Gaussian-Hermite symbols
    adjoint = max(_rel(weyl_op(s.conj()), weyl_op(s).conj().T) for s in gaussian_pair(grid, 0.5))
    return [
        Measurement(max(unitary, inverse), {"N": ctx.N, "symbol": "random"}),
        Measurement(adjoint, {"N": ctx.N, "symbol": "gaussian_hermite"}),
    ]


def check_wigner_isometry(ctx):
    cfg = ConfigGrid(1, ctx.N)
    u, v = _states(cfg)
    return _one(abs(wigner(cfg, u, v).l2_norm() - cfg.norm(u) * cfg.norm(v)), N=ctx.N)


def check_projection_norm(ctx):
    cfg = ConfigGrid(1, ctx.N)
    u, _ = _states(cfg)
    u = u / cfg.norm(u)
    return _one(abs(op_norm(weyl_op(wigner(cfg, u, u))) - 1), N=ctx.N)


# ---------------------------------------------------------------- canonical maps


def _cp(ctx, N=None, backend="inner_spectral"):
    rng = ctx.rng()
    grid = ctx.grid(N)
    spec = ctx.spectral_spec(rng) if backend == "inner_spectral" else ctx.torus_spec()
    return grid, spec, cp_family(grid, spec, ctx.gaussian_width, rng)


def _m_morphism(ctx, N):
    _, _, (F, G, _) = _cp(ctx, N)
    lhs = canonical_m(square_product(F, G))
    rhs = twisted_conv(canonical_m(F), canonical_m(G))
    return lhs.relative_residual(rhs)


@_quiet
def check_m_morphism(ctx):
    return _one(_m_morphism(ctx, ctx.N), N=ctx.N)


@_quiet
def check_m_morphism_refinement(ctx):
    coarse = _m_morphism(ctx, ctx.N)
    fine = _m_morphism(ctx, 2 * ctx.N)
    return _one(10 * fine / coarse, N=ctx.N, coarse=coarse, fine=fine)


@_quiet
def check_m_involution(ctx):
    _, _, (F, _, _) = _cp(ctx)
    return _one(canonical_m(square_involution(F)).relative_residual(cp_involution(canonical_m(F))), N=ctx.N)


@_quiet
def check_m_inverse(ctx):
    _, _, (F, _, _) = _cp(ctx)
    return _one(canonical_m_inv(canonical_m(F)).relative_residual(F), N=ctx.N)


@_quiet
def check_direct_routes(ctx):
    _, _, (F, _, _) = _cp(ctx)
    res = max(
        canonical_m_direct(F).relative_residual(canonical_m(F)),
        canonical_m_inv_direct(F).relative_residual(canonical_m_inv(F)),
        canonical_m_prime_direct(F).relative_residual(canonical_m_prime(F)),
    )
    return _one(res, N=ctx.N)


@_quiet
def check_c_half(ctx):
    _, _, (F, G, _) = _cp(ctx)
    A, B = canonical_m(F), canonical_m(G)
    lhs = c_alpha(0.5, twisted_conv(A, B))
    rhs = twisted_conv_kn(c_alpha(0.5, A), c_alpha(0.5, B))
    return _one(lhs.relative_residual(rhs), N=ctx.N)


@_quiet
def check_m_prime_morphism(ctx):
    _, _, (F, G, _) = _cp(ctx)
    lhs = canonical_m_prime(square_product(F, G))
    rhs = twisted_conv_kn(canonical_m_prime(F), canonical_m_prime(G))
    return _one(lhs.relative_residual(rhs), N=ctx.N)


@_quiet
def check_dual_action(ctx):
    """Run on the doubled grid with shifts of at most N/16 nodes per axis.

    Translating the Gaussian family by Z moves its mass towards the box
    edge; at N the family already touches the edge, so the wrapped mass
    (not the identity) would dominate the residual.
    """
    N = 2 * ctx.N
    grid, _, (F, _, _) = _cp(ctx, N)
    rng = ctx.rng()
    MF = canonical_m(F)
    reach = max(1, N // 16)
    worst = 0.0
    for _ in range(20):
        Z = rng.integers(-reach, reach + 1, size=grid.dim) * grid.h
        worst = max(worst, canonical_m(translate_act(Z, F)).relative_residual(dual_action(Z, MF)))
    return _one(worst, N=N, samples=20)


@_quiet
def check_dual_automorphism(ctx):
    grid, _, (F, G, _) = _cp(ctx)
    A, B = canonical_m(F), canonical_m(G)
    Z = np.full(grid.dim, 2 * grid.h)
    lhs = dual_action(Z, twisted_conv(A, B))
    rhs = twisted_conv(dual_action(Z, A), dual_action(Z, B))
    return _one(lhs.relative_residual(rhs), N=ctx.N)


def _morphisms(ctx, rng):
    grid = ctx.grid()
    spec = ctx.spectral_spec(rng)
    tspec = ctx.torus_spec()
    diag = EquivariantMorphism.diagonal_conjugation(spec, np.exp(1j * rng.uniform(0, 2 * np.pi, spec.d)))
    trans = EquivariantMorphism.torus_translation(tspec, rng.uniform(0, 2 * np.pi, tspec.dim))
    return grid, [("diagonal_conjugation", diag), ("torus_translation_phase", trans)]


@_quiet
def check_functoriality(ctx):
    rng = ctx.rng()
    grid, morphs = _morphisms(ctx, rng)
    out = []
    for label, R in morphs:
        F, _, _ = cp_family(grid, R.source, ctx.gaussian_width, rng)
        lhs = lift_morphism(R, canonical_m(F))
        rhs = canonical_m(lift_morphism(R, F))
        out.append(Measurement(lhs.relative_residual(rhs), {"N": ctx.N, "morphism": label}))
    return out


@_quiet
def check_lift_product(ctx):
    rng = ctx.rng()
    grid, morphs = _morphisms(ctx, rng)
    out = []
    for label, R in morphs:
        F, G, _ = cp_family(grid, R.source, ctx.gaussian_width, rng)
        A, B = canonical_m(F), canonical_m(G)
        lhs = lift_morphism(R, twisted_conv(A, B))
        rhs = twisted_conv(lift_morphism(R, A), lift_morphism(R, B))
        out.append(Measurement(lhs.relative_residual(rhs), {"N": ctx.N, "morphism": label}))
    return out


def _translation_cp(ctx, rng, N):
    grid = ctx.grid(N)
    spec = ActionSpec.translation(grid)
    a, b = gaussian_pair(grid, ctx.gaussian_width)
    terms_f = [(a, random_element(spec, rng)), (b, random_element(spec, rng))]
    terms_g = [(b, random_element(spec, rng))]
    return CPElement.from_terms(terms_f), CPElement.from_terms(terms_g)


@_quiet
def check_orthogonality(ctx):
    rng = ctx.rng()
    out = []
    # the translation carrier holds N^{4n} values; keep it desk-sized
    N = min(ctx.N, 32)
    F, G = _translation_cp(ctx, rng, N)
    grid_t = ctx.grid()
    tspec = ctx.torus_spec()
    Ft, Gt, _ = cp_family(grid_t, tspec, ctx.gaussian_width, rng)
    for label, (F_, G_) in (("translation", (F, G)), ("torus_modes", (Ft, Gt))):
        scale = F_.l2_norm() * G_.l2_norm()
        res = abs(orthogonality_pairing(canonical_m(F_), canonical_m(G_)) - orthogonality_pairing(F_, G_)) / scale
        res = max(res, abs(canonical_m(F_).l2_norm() - F_.l2_norm()) / F_.l2_norm())
        out.append(Measurement(res, {"N": F_.grid.N, "backend": label}))
    return out


# ---------------------------------------------------------------- catalog


def _c(name, anchor, backend, tol, fn, suite, refinement=False):
    return Check(name, anchor, backend, tol, fn, suite, refinement)


_STRATS = (Strategy.GRID_REDUCED, Strategy.OPERATOR_ORACLE, Strategy.BRUTE_QUADRATURE)

CATALOG: list[Check] = [
    _c("cocycle_identity", "kappa(X,Y)kappa(X+Y,Z) = kappa(Y,Z)kappa(X,Y+Z)", "phase", 1e-13, check_cocycle, "phase_space"),
    _c("cocycle_antisymmetry", "kappa(X,Y)kappa(Y,X) = 1", "phase", 1e-14, check_cocycle_antisymmetry, "phase_space"),
    _c("fourier_unitary", "||F a||_2 = ||a||_2", "phase", 1e-12, check_fourier_unitary, "phase_space"),
    _c("fourier_involutive", "F o F = id", "phase", 1e-12, check_fourier_involutive, "phase_space"),
    _c("fourier_gaussian_fixed_point", "F exp(-|X|^2/2) = exp(-|X|^2/2)", "phase", 1e-10, check_gaussian_fixed_point, "phase_space"),
    _c("action_group_law", "Theta_X Theta_Y = Theta_{X+Y}", "spectral", 1e-12, check_act_group_law, "algebra"),
    _c("action_automorphism", "Theta_X(fg) = Theta_X(f)Theta_X(g), isometric, *-preserving", "spectral", 1e-12, check_act_automorphism, "algebra"),
    _c("derivation_finite_difference", "delta_j f = d/dX_j Theta_X(f) at 0", "inner_spectral", 1e-7, check_derivation_fd, "algebra"),
    _c("derivation_leibniz", "delta(fg) = delta(f)g + f delta(g)", "inner_spectral", 1e-12, check_leibniz, "algebra"),
    _c("homogeneous_phase", "Theta_X f_p = exp(i p.X) f_p", "spectral", 1e-13, check_homogeneous_phase, "algebra"),
    _c("phase_law_exact", "f_p # g_q = kappa(p,q) f_p g_q", "spectral", 1e-13, check_phase_law_exact, "rieffel"),
    _c("phase_law_quadrature", "f # g = 2^{2n} int int exp(2i[[Y,Z]]) Theta_Y(f) Theta_Z(g)", "inner_spectral", 1e-6, check_phase_law_quadrature, "rieffel"),
    _c("phase_law_quadrature_refinement", "quadrature error shrinks >= 10x when N doubles", "inner_spectral", 1.0, check_phase_law_quadrature_refinement, "rieffel", True),
    _c("brute_product", "f # g by the defining double integral", "inner_spectral", 1e-6, check_brute_product, "rieffel"),
    _c("torus_commutation", "e_k # e_l = exp(-i k.Jl) e_l # e_k", "torus_modes", 1e-14, check_torus_commutation, "rieffel"),
    _c("deformed_associativity", "(f#g)#h = f#(g#h), (f#g)^* = g^*#f^*", "inner_spectral", 1e-12, check_deformed_associativity, "rieffel"),
    _c("deformed_cstar_identity", "||f^* # f|| = ||f||^2", "inner_spectral", 1e-12, check_deformed_cstar, "rieffel"),
    *[
        _c(f"strategy_{x.value}_vs_{y.value}", "three evaluations of the translation product agree", "translation", 1e-8, _strategy_pair(x, y), "rieffel")
        for x, y in ((_STRATS[0], _STRATS[1]), (_STRATS[0], _STRATS[2]), (_STRATS[1], _STRATS[2]))
    ],
    _c("square_associativity", "(F[]G)[]H = F[](G[]H)", "inner_spectral", 1e-7, _quiet(check_square_associativity), "rieffel"),
    _c("square_tensor_rule", "(a x f)[](b x g) = (b # a) x (f # g)", "inner_spectral", 1e-12, _quiet(check_square_dense_route), "rieffel"),
    _c("blackadar_cuntz", "p_k(f#g) <= sum_{i+j=k} p_i(f) p_j(g)", "inner_spectral", 1e-10, check_bc_inequality, "rieffel"),
    _c("blackadar_cuntz_p0", "p_0 = deformed C*-norm", "inner_spectral", 1e-14, check_bc_p0, "rieffel"),
    _c("heisenberg_representation", "Pi(X*Y) = Pi(X)Pi(Y), pi(X)pi(Y) = kappa(X,Y)pi(X+Y)", "weyl", 1e-10, check_heisenberg, "weyl"),
    _c("weyl_homomorphism", "Op(a#b) = Op(a)Op(b)", "translation", 1e-8, check_op_homomorphism, "weyl"),
    _c("wigner_moyal", "a # W(u,v) = W(Op(a)u, v)", "translation", 1e-8, check_wigner_moyal, "weyl"),
    _c("weyl_rank_one", "Op[W(u,v)] = <.|v>u", "translation", 1e-9, check_rank_one, "weyl"),
    _c("weyl_hs_unitarity", "||Op(a)||_HS = ||a||_2, inverse pair, Op(a)^* = Op(conj a)", "translation", 1e-10, check_hs_unitarity, "weyl"),
    _c("wigner_isometry", "||W(u,v)||_2 = ||u|| ||v||", "translation", 1e-10, check_wigner_isometry, "weyl"),
    _c("weyl_projection_norm", "||Op(W(u,u))|| = 1", "translation", 1e-8, check_projection_norm, "weyl"),
    _c("m_morphism", "M(F[]G) = MF <> MG", "inner_spectral", 1e-7, check_m_morphism, "canonical"),
    _c("m_morphism_refinement", "M(F[]G) = MF <> MG improves >= 10x when N doubles", "inner_spectral", 1.0, check_m_morphism_refinement, "canonical", True),
    _c("m_involution", "M(F^[]) = (MF)^<>", "inner_spectral", 1e-9, check_m_involution, "canonical"),
    _c("m_inverse", "M^-1 o M = id", "inner_spectral", 1e-11, check_m_inverse, "canonical"),
    _c("m_direct_routes", "direct integrals of M, M^-1, M' = factorized forms", "inner_spectral", 1e-10, check_direct_routes, "canonical"),
    _c("c_half_intertwining", "C_1/2(G1 <> G2) = C_1/2 G1 <>' C_1/2 G2", "inner_spectral", 1e-8, check_c_half, "canonical"),
    _c("m_prime_morphism", "M'(F[]G) = M'F <>' M'G", "inner_spectral", 1e-7, check_m_prime_morphism, "canonical"),
    _c("dual_action_intertwining", "M o (T_-Z x Theta_Z) = beta_Z o M", "inner_spectral", 1e-9, check_dual_action, "canonical"),
    _c("dual_action_automorphism", "beta_Z(G1 <> G2) = beta_Z G1 <> beta_Z G2", "inner_spectral", 1e-8, check_dual_automorphism, "canonical"),
    _c("functoriality", "R o M1 = M2 o (id x R)", "spectral", 1e-10, check_functoriality, "canonical"),
    _c("lift_product", "R(F <> G) = R(F) <> R(G)", "spectral", 1e-8, check_lift_product, "canonical"),
    _c("orthogonality", "<MF, MG> = <F, G> on L2(Xi x Sigma)", "commutative", 1e-10, check_orthogonality, "canonical"),
]

SUITES = ("phase_space", "algebra", "rieffel", "weyl", "canonical")


def find(name: str) -> Check:
    for check in CATALOG:
        if check.name == name:
            return check
    raise KeyError(name)
