"""Trilinear convolution form: Monte Carlo evaluation and the bound chain.

Two tiers of verification: a physical-space Monte Carlo of the trilinear
form for bi-invariant triples on real hyperbolic spaces (m2 = 0), and an
exact discrete surrogate of the rearrangement chain, where the compact
factor is a finite uniform atom space and the slice kernel is the real
one.  The Monte Carlo reports values in the radial normalization (ball
measures match geometry.ball_volume), so norm ratios are meaningful.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from . import parallel
from .geometry import (SpaceParams, UnsupportedSpaceError, ball_volume,
                       cartan_radius_components, slice_radius)
from .kernel import RadialFunction, phi_weight, psi
from .pinned import SPLIT_BOUND_C
from .rearrange import StepProfile, general_radial_profile


@dataclass(frozen=True, eq=False)
class BiInvariantTriple:
    """Three compactly supported radial step functions."""

    f: RadialFunction
    g: RadialFunction
    h: RadialFunction


def _unit_ball_volume(dim: int) -> float:
    return math.pi ** (dim / 2.0) / math.gamma(dim / 2.0 + 1.0)


@lru_cache(maxsize=64)
def _mu_ball_cached(m1: int, rho: float, radius: float) -> float:
    val, _ = quad(lambda s: math.exp(2.0 * rho * s) * float(slice_radius(radius, s)) ** m1,
                  -radius, radius, limit=200)
    return _unit_ball_volume(m1) * val


def horospherical_ball_measure(sp: SpaceParams, radius: float) -> float:
    """Measure of B(o, r) in (v, s) coordinates with weight e^{2 rho s}."""
    if sp.m2 != 0:
        raise UnsupportedSpaceError("point-level operations require m2 = 0")
    return _mu_ball_cached(sp.m1, sp.rho, float(radius))


@lru_cache(maxsize=16)
def _lambda_cached(m1: int, rho: float) -> float:
    sp = SpaceParams(m1=m1, m2=0, rho=rho)
    return horospherical_ball_measure(sp, 1.0) / ball_volume(sp, 1.0)


def coordinate_bridge_constant(sp: SpaceParams) -> float:
    """Ratio between the horospherical and radial ball normalizations.

    Independent of the radius used to compute it (checked in the tests);
    equals 2*pi for m1 = 2.
    """
    if sp.m2 != 0:
        raise UnsupportedSpaceError("point-level operations require m2 = 0")
    return _lambda_cached(sp.m1, sp.rho)


def _sample_ball(sp: SpaceParams, radius: float, n: int, rng: np.random.Generator):
    """n points uniform for the weighted measure on B(o, radius); (v, s)."""
    grid = np.linspace(-radius, radius, 4097)
    pdf = np.exp(2.0 * sp.rho * grid) * slice_radius(radius, grid) ** sp.m1
    cdf = np.concatenate(([0.0], np.cumsum((pdf[1:] + pdf[:-1]) / 2.0 * np.diff(grid))))
    cdf /= cdf[-1]
    s = np.interp(rng.random(n), cdf, grid)
    dirs = rng.standard_normal((n, sp.m1))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radial = slice_radius(radius, s) * rng.random(n) ** (1.0 / sp.m1)
    return dirs * radial[:, None], s


def _trilinear_core(sp: SpaceParams, f: RadialFunction, gs, h: RadialFunction,
                    box_f: float, box_h: float, n_samples: int, seed: int,
                    chunk: int, workers):
    """Shared-sample Monte Carlo of the trilinear form for several middle factors."""
    sizes = parallel.chunk_sizes(n_samples, chunk)
    rngs = parallel.substreams(seed, len(sizes))

    def one_chunk(args):
        m, rng = args
        v, s = _sample_ball(sp, box_f, m, rng)
        vp, sq = _sample_ball(sp, box_h, m, rng)
        t_z = cartan_radius_components(np.einsum("ij,ij->i", v, v), 0.0, s)
        t_zp = cartan_radius_components(np.einsum("ij,ij->i", vp, vp), 0.0, sq)
        dv = vp - v
        mid_sq = np.exp(2.0 * s) * np.einsum("ij,ij->i", dv, dv)
        t_g = cartan_radius_components(mid_sq, 0.0, sq - s)
        base = f.eval(t_z) * h.eval(t_zp)
        sums = np.empty(len(gs))
        sums_sq = np.empty(len(gs))
        for i, g in enumerate(gs):
            y = base * g.eval(t_g)
            sums[i] = y.sum()
            sums_sq[i] = (y * y).sum()
        return sums, sums_sq

    total = np.zeros(len(gs))
    total_sq = np.zeros(len(gs))
    for sums, sums_sq in parallel.parallel_map(one_chunk, zip(sizes, rngs), workers):
        total += sums
        total_sq += sums_sq

    lam = coordinate_bridge_constant(sp)
    amp = (horospherical_ball_measure(sp, box_f)
           * horospherical_ball_measure(sp, box_h)) / (lam * lam)
    mean = total / n_samples
    var = np.maximum(total_sq / n_samples - mean * mean, 0.0)
    return amp * mean, amp * np.sqrt(var / n_samples)


def trilinear_mc(sp: SpaceParams, triple: BiInvariantTriple, box=None,
                 n_samples: int = 1_000_000, seed: int = 0,
                 chunk: int = 1 << 20, workers: int | None = None):
    """Monte Carlo estimate of the trilinear convolution form.

    Samples the two outer points uniformly for the weighted measure on
    balls covering the supports of f and h (the middle factor's argument
    is then determined) and returns (estimate, stderr) in the radial
    normalization.  box = (radius for f side, radius for h side).
    """
    if sp.m2 != 0:
        raise UnsupportedSpaceError("point-level operations require m2 = 0")
    r_f = triple.f.support_radius
    r_h = triple.h.support_radius
    if box is None:
        box = (r_f, r_h)
    box_f, box_h = float(box[0]), float(box[1])
    if box_f < r_f or box_h < r_h:
        raise ValueError(
            f"sampling box {box} does not contain the supports ({r_f}, {r_h})")
    if box_f <= 0 or box_h <= 0:
        return 0.0, 0.0
    est, err = _trilinear_core(sp, triple.f, [triple.g], triple.h,
                               box_f, box_h, n_samples, seed, chunk, workers)
    return float(est[0]), float(err[0])


def min_young_check(a, b, c):
    """Exact convolution bound on a finite abelian group.

    lhs = sum_{n,d} a(n) b(d) c(n+d); rhs = (sum b) * min(sum a, sum c).
    Values must lie in [0, 1]; the inequality lhs <= rhs holds with
    constant one.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    if not (a.shape == b.shape == c.shape):
        raise ValueError("a, b, c must live on the same group")
    for arr in (a, b, c):
        if np.any(arr < 0) or np.any(arr > 1):
            raise ValueError("values must lie in [0, 1]")
    lhs = 0.0
    axes = tuple(range(a.ndim))
    for d in np.ndindex(a.shape):
        if b[d] == 0.0:
            continue
        lhs += b[d] * float((a * np.roll(c, shift=tuple(-x for x in d), axis=axes)).sum())
    rhs = float(b.sum() * min(a.sum(), c.sum()))
    return float(lhs), rhs


@dataclass(frozen=True, eq=False)
class DiscreteModel:
    """Exact surrogate for the chain bounds.

    The compact factor is n_K uniform atoms; t lives on a uniform grid;
    G1(k, k', u, s) is the middle-factor surface average, supported on
    u >= |s| with s on the difference grid of t.
    """

    n_K: int
    t_grid: np.ndarray
    u_grid: np.ndarray
    F1: np.ndarray  # (n_K, n_t)
    H1: np.ndarray  # (n_K, n_t)
    G1: np.ndarray  # (n_K, n_K, n_u, n_s)

    def __post_init__(self):
        t = np.asarray(self.t_grid, dtype=float)
        u = np.asarray(self.u_grid, dtype=float)
        n_t = t.size
        steps = np.diff(t)
        if n_t < 2 or not np.allclose(steps, steps[0], rtol=1e-12, atol=0):
            raise ValueError("t_grid must be uniform with at least two points")
        if self.F1.shape != (self.n_K, n_t) or self.H1.shape != (self.n_K, n_t):
            raise ValueError("F1 and H1 must have shape (n_K, n_t)")
        if np.any(self.F1 < 0) or np.any(self.H1 < 0):
            raise ValueError("F1 and H1 must be nonnegative")
        n_s = 2 * n_t - 1
        if self.G1.shape != (self.n_K, self.n_K, u.size, n_s):
            raise ValueError("G1 must have shape (n_K, n_K, n_u, 2*n_t - 1)")
        if np.any(self.G1 < 0) or np.any(self.G1 > 1):
            raise ValueError("G1 values must lie in [0, 1]")
        support = u[:, None] >= np.abs(self.s_grid)[None, :]
        if np.any(self.G1[..., ~support] != 0):
            raise ValueError("G1 must vanish for u < |s|")

    @property
    def t_step(self) -> float:
        return float(self.t_grid[1] - self.t_grid[0])

    @property
    def u_step(self) -> float:
        return float(self.u_grid[1] - self.u_grid[0])

    @property
    def s_grid(self) -> np.ndarray:
        n_t = self.t_grid.size
        return (np.arange(2 * n_t - 1) - (n_t - 1)) * self.t_step


def random_model(sp: SpaceParams, rng: np.random.Generator, n_K: int = 8,
                 n_t: int = 64, t_half: float = 2.0, n_u: int = 64,
                 u_max: float = 4.5, fill: float = 0.35,
                 s_jitter: float = 0.25) -> DiscreteModel:
    """Random surrogate with dyadic-range side factors.

    Nonzero F1/H1 values are e^{rho X} with X uniform in [-8, 8], so the
    dyadic shell decomposition behind the chain sees at least eight shells.
    """
    t_grid = np.linspace(-t_half, t_half, n_t)
    u_grid = np.linspace(0.0, u_max, n_u)

    def side():
        vals = np.exp(sp.rho * rng.uniform(-8.0, 8.0, size=(n_K, n_t)))
        vals[rng.random((n_K, n_t)) >= fill] = 0.0
        return vals

    F1 = side()
    H1 = side()
    amp = rng.random((n_K, n_K, n_u))
    amp[rng.random((n_K, n_K, n_u)) >= 0.6] = 0.0
    n_s = 2 * n_t - 1
    wiggle = 1.0 - s_jitter * rng.random((n_K, n_K, n_u, n_s))
    h = t_grid[1] - t_grid[0]
    s_grid = (np.arange(n_s) - (n_t - 1)) * h
    support = (u_grid[:, None] >= np.abs(s_grid)[None, :]).astype(float)
    G1 = amp[..., None] * wiggle * support[None, None, :, :]
    return DiscreteModel(n_K=n_K, t_grid=t_grid, u_grid=u_grid, F1=F1, H1=H1, G1=G1)


def _psi_weighted_g(model: DiscreteModel, sp: SpaceParams, tol: float = 1e-8):
    """W(k, k', s) = sum_u G1 * psi(u, s) * du."""
    tbl = psi(sp, model.u_grid[:, None], model.s_grid[None, :], tol=tol)
    tbl = np.where(model.u_grid[:, None] > np.abs(model.s_grid)[None, :], tbl, 0.0)
    return np.einsum("abus,us->abs", model.G1, tbl) * model.u_step


def side_masses(model: DiscreteModel, sp: SpaceParams):
    """F(k) and H(k'): square roots of the weighted t-masses of F1 and H1."""
    w = np.exp(2.0 * sp.rho * model.t_grid) * model.t_step
    return np.sqrt(model.F1 @ w), np.sqrt(model.H1 @ w)


def chain_step1_bound(model: DiscreteModel, sp: SpaceParams) -> float:
    """Quintuple sum bounding the trilinear form after the nilpotent step."""
    n_t = model.t_grid.size
    e1 = np.exp(sp.rho * model.t_grid)
    sidx = (np.arange(n_t)[None, :] - np.arange(n_t)[:, None]) + (n_t - 1)
    flat = sidx.ravel()
    W = _psi_weighted_g(model, sp)
    acc = 0.0
    for k in range(model.n_K):
        for kp in range(model.n_K):
            m = np.minimum.outer(model.F1[k], model.H1[kp]) * np.outer(e1, e1)
            by_s = np.bincount(flat, weights=m.ravel(), minlength=2 * n_t - 1)
            acc += float(by_s @ W[k, kp])
    return acc * model.t_step ** 2 / model.n_K ** 2


def chain_step2_bound(model: DiscreteModel, sp: SpaceParams) -> float:
    """Two-region split after integrating the A-factor.

    The split threshold is e^{rho s} = H(k')/F(k); pairs with a vanishing
    side contribute nothing to the corresponding term.
    """
    F, H = side_masses(model, sp)
    W = _psi_weighted_g(model, sp)
    eps = np.exp(sp.rho * model.s_grid)
    lhs = F[:, None, None] * eps[None, None, :]
    cond1 = lhs <= H[None, :, None]
    cond2 = lhs >= H[None, :, None]
    term1 = (F[:, None, None] ** 2 * eps[None, None, :] * W * cond1).sum()
    term2 = (H[None, :, None] ** 2 / eps[None, None, :] * W * cond2).sum()
    return float((term1 + term2) * model.t_step / model.n_K ** 2)


def _double_rearranged_uniform(mat: np.ndarray) -> np.ndarray:
    """Double rearrangement on uniform atoms: row sort then column sort."""
    rows = -np.sort(-mat, axis=1)
    return -np.sort(-rows, axis=0)


@dataclass(frozen=True, eq=False)
class RearrangedData:
    """Rearranged side profiles and the per-u double rearrangement."""

    Fstar: StepProfile
    Hstar: StepProfile
    Gstarstar: np.ndarray  # (n_u, n_K, n_K)
    u_grid: np.ndarray
    u_step: float


def _profile_from_atoms(values: np.ndarray) -> StepProfile:
    n = values.size
    return StepProfile(breaks=np.arange(1, n + 1) / n, values=-np.sort(-values))


def _uniform_cell_values(profile: StepProfile, n: int) -> np.ndarray:
    return profile.value_at(np.arange(1, n + 1) / n)


def rearranged_data(model: DiscreteModel, sp: SpaceParams) -> RearrangedData:
    """Side rearrangements of F, H over the atoms plus G** per u level."""
    F, H = side_masses(model, sp)
    g_sup = model.G1.max(axis=3)
    gss = np.stack([_double_rearranged_uniform(g_sup[:, :, i])
                    for i in range(model.u_grid.size)])
    return RearrangedData(Fstar=_profile_from_atoms(F), Hstar=_profile_from_atoms(H),
                          Gstarstar=gss, u_grid=model.u_grid, u_step=model.u_step)


def rearranged_data_profile(model: DiscreteModel, sp: SpaceParams) -> RearrangedData:
    """Like rearranged_data but with sqrt-scale general side profiles."""
    weights = np.exp(2.0 * sp.rho * model.t_grid) * model.t_step
    fstar = general_radial_profile(model.F1, weights)
    hstar = general_radial_profile(model.H1, weights)
    g_sup = model.G1.max(axis=3)
    gss = np.stack([_double_rearranged_uniform(g_sup[:, :, i])
                    for i in range(model.u_grid.size)])
    return RearrangedData(Fstar=fstar, Hstar=hstar, Gstarstar=gss,
                          u_grid=model.u_grid, u_step=model.u_step)


def _rearranged_integral(data: RearrangedData, u_weight: np.ndarray) -> float:
    n = data.Gstarstar.shape[1]
    fs = _uniform_cell_values(data.Fstar, n)
    hs = _uniform_cell_values(data.Hstar, n)
    per_u = np.einsum("x,uxy,y->u", fs, data.Gstarstar, hs) / n ** 2
    return float(per_u @ u_weight * data.u_step)


def chain_step3_bound(model: DiscreteModel, sp: SpaceParams) -> float:
    """Rearranged bound: integral of F*(x) H*(y) G**(x, y, u) e^{rho u}."""
    data = rearranged_data(model, sp)
    return _rearranged_integral(data, np.exp(sp.rho * data.u_grid))


def rearranged_norms(data: RearrangedData, sp: SpaceParams):
    """(2,1)-scale norms read off the rearranged data (unit constants)."""
    n = data.Gstarstar.shape[1]
    fs = _uniform_cell_values(data.Fstar, n)
    hs = _uniform_cell_values(data.Hstar, n)
    nf = math.sqrt(float(fs @ fs) / n)
    nh = math.sqrt(float(hs @ hs) / n)
    g_mass = float(np.einsum("uxy,u->", data.Gstarstar,
                             np.exp(2.0 * sp.rho * data.u_grid)) * data.u_step / n ** 2)
    return nf, math.sqrt(g_mass), nh


def split_optimize(data: RearrangedData, sp: SpaceParams, norms,
                   c: float = SPLIT_BOUND_C) -> float:
    """Optimized two-region bound 2 c |f| |g| |h|.

    Splits the rearranged integral at the level where F* H* crosses
    K e^{rho u} (K = |f||h|/|g|), checks the split dominates the
    rearranged integral on this data, and returns the optimized value.
    """
    nf, ng, nh = (float(x) for x in norms)
    if nf <= 0 or ng <= 0 or nh <= 0:
        raise ValueError("norms must be positive (split level undefined otherwise)")
    bound = 2.0 * c * nf * ng * nh
    value = _rearranged_integral(data, np.exp(sp.rho * data.u_grid))
    if value > bound * (1.0 + 1e-9):
        raise RuntimeError(
            f"split bound {bound} fails to dominate the rearranged integral {value}")
    return bound


def theorem8_bound(sp: SpaceParams, data: RearrangedData) -> float:
    """Rearranged bound with the reference weight in place of e^{rho u}."""
    return _rearranged_integral(data, phi_weight(sp, data.u_grid))


def _layered_profile(sp: SpaceParams, layers: int) -> list[RadialFunction]:
    """Truncations of the slowly decaying layered middle factor."""
    out = []
    for n in range(1, layers + 1):
        vals = np.array([math.exp(-sp.rho * j) / (1.0 + j) for j in range(n + 1)])
        edges = np.arange(n + 2, dtype=float)
        out.append(RadialFunction(edges=edges, values=vals))
    return out


def endpoint_ratio_sweep(sp: SpaceParams, family: dict, seed: int = 0,
                         chunk: int = 1 << 20, workers: int | None = None):
    """Ratio table for the trilinear form against Lorentz-norm products.

    family kinds:
      - {"kind": "balls", "radii": [...], "n_samples": n}: f = g = h the
        ball indicator; ratio against the cube of the sqrt-scale norm.
      - {"kind": "l2_probe", "radius": R, "layers": N, "n_samples": n}:
        f = h the R-ball, g the layered profile truncated at each level;
        ratio against |f|_{2,1} |g|_{L2} |h|_{2,1} (shared samples, so the
        numerator is monotone in the truncation by construction).
    """
    if sp.m2 != 0:
        raise UnsupportedSpaceError("point-level operations require m2 = 0")
    rows = []
    kind = family.get("kind", "balls")
    n_samples = int(family.get("n_samples", 1_000_000))
    if kind == "balls":
        for i, radius in enumerate(family["radii"]):
            ball = RadialFunction.ball(radius)
            est, err = trilinear_mc(sp, BiInvariantTriple(ball, ball, ball),
                                    n_samples=n_samples, seed=seed + i,
                                    chunk=chunk, workers=workers)
            norm = ball_volume(sp, radius) ** 1.5
            rows.append({
                "radius": float(radius),
                "estimate": est,
                "stderr": err,
                "norm_product": norm,
                "ratio": est / norm if norm > 0 else 0.0,
                "stderr_frac": err / est if est > 0 else float("inf"),
            })
    elif kind == "l2_probe":
        radius = float(family["radius"])
        layers = int(family["layers"])
        ball = RadialFunction.ball(radius)
        gs = _layered_profile(sp, layers)
        est, err = _trilinear_core(sp, ball, gs, ball, radius, radius,
                                   n_samples, seed, chunk, workers)
        from .kernel import radial_l2_norm
        side = math.sqrt(ball_volume(sp, radius))
        for n, (e, se, g) in enumerate(zip(est, err, gs), start=1):
            denom = side * radial_l2_norm(sp, g) * side
            rows.append({
                "layers": n,
                "estimate": float(e),
                "stderr": float(se),
                "norm_product": denom,
                "ratio": float(e) / denom if denom > 0 else 0.0,
                "stderr_frac": float(se) / float(e) if e > 0 else float("inf"),
            })
    else:
        raise ValueError(f"unknown family kind {kind!r}")
    return rows
