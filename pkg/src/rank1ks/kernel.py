"""The horospherical slice kernel, the Abel transform, and related bounds.

The kernel psi(t, s) is the density that converts integrals of a radial
function over the slice {n a(s)} into integrals against the radial
coordinate t; it vanishes for t < |s|.  For m2 = 0 it has the closed form
sinh(t) (cosh t - cosh s)^{(m1-2)/2} (unit normalization).  For m2 >= 1 it
is a one-dimensional integral with endpoint singularities that are removed
by square-root substitutions before Gauss-Legendre quadrature.  An
independent Monte Carlo estimate of the slice measure ties the unit
normalization to the true geometric constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from . import parallel
from .geometry import SpaceParams, cartan_radius_components, radial_density

_GL_ORDERS = (16, 32, 64, 128, 256)


@lru_cache(maxsize=32)
def _gauss01(n: int):
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1.0) / 2.0, w / 2.0


def _integrate_unit(fvec, tol: float, orders=_GL_ORDERS):
    """Integrate fvec over [0,1] with escalating fixed-order quadrature.

    fvec(x) must return an array whose last axis matches x; escalation
    stops when successive orders agree to the requested relative accuracy.
    """
    prev = None
    vals = None
    for n in orders:
        x, w = _gauss01(n)
        vals = fvec(x) @ w
        if prev is not None:
            scale = np.maximum(np.abs(vals), 1e-12 * np.max(np.abs(vals), initial=0.0) + 1e-300)
            if np.max(np.abs(vals - prev) / scale) <= tol:
                return vals
        prev = vals
    return vals


def _psi_quadrature(sp: SpaceParams, cosh_t, cosh_s, tol: float):
    """The u-integral for m2 >= 1, endpoint singularities substituted away."""
    ct = np.asarray(cosh_t, dtype=float)
    cs = np.asarray(cosh_s, dtype=float)
    u0 = cs / ct
    um = (u0 + 1.0) / 2.0
    pm1 = (sp.m1 - 2) / 2.0
    pm2 = (sp.m2 - 2) / 2.0

    ct_ = ct[..., None]
    u0_ = u0[..., None]

    def lower(x):
        # u = u0 + x^2 on [u0, um]; (u ct - cs) = ct x^2 exactly
        xx = np.sqrt(um - u0)[..., None] * x
        u = u0_ + xx * xx
        return 2.0 * np.sqrt(um - u0)[..., None] * ct_ ** pm1 * xx ** (sp.m1 - 1) \
            * (1.0 - u * u) ** pm2

    def upper(y):
        # u = 1 - y^2 on [um, 1]; 1 - u^2 = y^2 (2 - y^2) exactly
        yy = np.sqrt(1.0 - um)[..., None] * y
        u = 1.0 - yy * yy
        return 2.0 * np.sqrt(1.0 - um)[..., None] * (u * ct_ - cs[..., None]) ** pm1 \
            * yy ** (sp.m2 - 1) * (2.0 - yy * yy) ** pm2

    return _integrate_unit(lower, tol) + _integrate_unit(upper, tol)


def _psi_boundary(sp: SpaceParams, t):
    """Value at t = |s| exactly: 0 above total multiplicity 2, limits at 2."""
    t = np.asarray(t, dtype=float)
    total = sp.m1 + sp.m2
    if total > 2:
        return np.zeros_like(t)
    if total == 2:
        if sp.m2 == 0:
            return np.sinh(t)
        return math.pi * np.sinh(t) * np.sqrt(np.cosh(t) / 2.0)
    # (1, 0): the limit diverges off the corner, sqrt(2) at the corner
    return np.where(t > 0, np.inf, math.sqrt(2.0))


def psi(sp: SpaceParams, t, s, tol: float = 1e-8):
    """Slice kernel at radial coordinate t and shift s (unit normalization).

    Vanishes for t < |s|; even in s.  Closed form for m2 = 0, quadrature
    for m2 >= 1 with relative target tol.
    """
    t = np.asarray(t, dtype=float)
    s_abs = np.abs(np.asarray(s, dtype=float))
    t, s_abs = np.broadcast_arrays(t, s_abs)
    out = np.zeros(t.shape, dtype=float)

    interior = t > s_abs
    boundary = t == s_abs
    if boundary.any():
        out[boundary] = _psi_boundary(sp, t[boundary])
    if interior.any():
        ti = t[interior]
        si = s_abs[interior]
        cosh_t = np.cosh(ti)
        cosh_s = np.cosh(si)
        if sp.m2 == 0:
            vals = np.sinh(ti) * (cosh_t - cosh_s) ** ((sp.m1 - 2) / 2.0)
        else:
            vals = np.sinh(ti) * cosh_t ** sp.m2 * _psi_quadrature(sp, cosh_t, cosh_s, tol)
        out[interior] = vals
    if out.ndim == 0:
        return float(out)
    return out


def psi_comparator(sp: SpaceParams, t, s):
    """Closed-form two-sided comparator for the slice kernel, t >= |s| only."""
    t = np.asarray(t, dtype=float)
    s_abs = np.abs(np.asarray(s, dtype=float))
    t, s_abs = np.broadcast_arrays(t, s_abs)
    if np.any(t < s_abs):
        raise ValueError("comparator is defined only for t >= |s|")
    expo = (sp.m1 + sp.m2 - 2) / 2.0
    with np.errstate(divide="ignore"):
        gap = np.maximum(np.cosh(t) - np.cosh(s_abs), 0.0)
        out = np.sinh(t) * np.cosh(t) ** (sp.m2 / 2.0) * gap ** expo
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True, eq=False)
class KernelTable:
    """Sampled kernel values on a (t, s) grid with the method recorded."""

    sp: SpaceParams
    t_grid: np.ndarray
    s_grid: np.ndarray
    values: np.ndarray  # shape (len(t_grid), len(s_grid))
    method: str

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write("t,s,psi,method\n")
            for i, t in enumerate(self.t_grid):
                for j, s in enumerate(self.s_grid):
                    fh.write(f"{t:.17g},{s:.17g},{self.values[i, j]:.17g},{self.method}\n")


def build_kernel_table(sp: SpaceParams, t_grid, s_grid, tol: float = 1e-8) -> KernelTable:
    t_grid = np.asarray(t_grid, dtype=float)
    s_grid = np.asarray(s_grid, dtype=float)
    values = psi(sp, t_grid[:, None], s_grid[None, :], tol=tol)
    method = "closed_form_m2_0" if sp.m2 == 0 else "quadrature"
    return KernelTable(sp=sp, t_grid=t_grid, s_grid=s_grid, values=values, method=method)


def surface_mc(sp: SpaceParams, t_bin, s: float, n_samples: int, seed: int,
               chunk: int = 1 << 20, workers: int | None = None):
    """Monte Carlo estimate of the bin-averaged slice kernel (true constant).

    Samples (v, w) uniformly in a box guaranteed to contain the region
    {radial coordinate <= bin top}, bins by the radial coordinate, and
    rescales: the result estimates the average over the bin of
    e^{rho s} * (slice measure at t), i.e. kappa times the unit-normalized
    kernel average.  Returns (estimate, stderr).
    """
    t_lo, t_hi = float(t_bin[0]), float(t_bin[1])
    if not t_lo < t_hi:
        raise ValueError(f"empty bin {t_bin}")
    if n_samples < 1000:
        raise ValueError("n_samples must be at least 1000")
    s = float(s)
    if t_hi <= abs(s):
        return 0.0, 0.0

    cosh_gap = math.cosh(t_hi) - math.cosh(s)
    r_v = math.sqrt(math.exp(-s) * cosh_gap)
    r_w = math.exp(-s) * math.cosh(t_hi)
    box_vol = (2.0 * r_v) ** sp.m1 * ((2.0 * r_w) ** sp.m2 if sp.m2 else 1.0)

    sizes = parallel.chunk_sizes(n_samples, chunk)
    rngs = parallel.substreams(seed, len(sizes))

    def one_chunk(args):
        m, rng = args
        v = rng.uniform(-r_v, r_v, size=(m, sp.m1))
        v_sq = np.einsum("ij,ij->i", v, v)
        if sp.m2:
            w = rng.uniform(-r_w, r_w, size=(m, sp.m2))
            w_sq = np.einsum("ij,ij->i", w, w)
        else:
            w_sq = 0.0
        t = cartan_radius_components(v_sq, w_sq, s)
        return int(np.count_nonzero((t > t_lo) & (t < t_hi)))

    hits = sum(parallel.parallel_map(one_chunk, zip(sizes, rngs), workers))
    p = hits / n_samples
    scale = math.exp(sp.rho * s) * box_vol / (t_hi - t_lo)
    estimate = scale * p
    stderr = scale * math.sqrt(max(p * (1.0 - p), 0.0) / n_samples)
    return estimate, stderr


@dataclass(frozen=True, eq=False)
class RadialFunction:
    """Compactly supported nonnegative step function of the radial coordinate.

    values[i] is taken on [edges[i], edges[i+1]); zero outside [edges[0],
    edges[-1]).
    """

    edges: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if edges.ndim != 1 or edges.size != values.size + 1:
            raise ValueError("need len(edges) == len(values) + 1")
        if edges[0] < 0 or np.any(np.diff(edges) <= 0):
            raise ValueError("edges must be nonnegative and strictly increasing")
        if np.any(values < 0):
            raise ValueError("values must be nonnegative")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "values", values)

    @classmethod
    def ball(cls, radius: float) -> "RadialFunction":
        return cls(edges=np.array([0.0, float(radius)]), values=np.array([1.0]))

    @classmethod
    def indicator(cls, intervals) -> "RadialFunction":
        """Indicator of a finite union of radial intervals."""
        ivs = sorted((float(a), float(b)) for a, b in intervals if b > a)
        edges = [ivs[0][0]]
        values = []
        for a, b in ivs:
            if a < edges[-1]:
                raise ValueError("intervals must be disjoint")
            if a > edges[-1]:
                edges.append(a)
                values.append(0.0)
            edges.append(b)
            values.append(1.0)
        return cls(edges=np.array(edges), values=np.array(values))

    def eval(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.edges, t, side="right") - 1
        inside = (idx >= 0) & (idx < self.values.size) & (t < self.edges[-1])
        out = np.zeros(t.shape, dtype=float)
        out[inside] = self.values[idx[inside]]
        if out.ndim == 0:
            return float(out)
        return out

    @property
    def support_radius(self) -> float:
        nz = np.nonzero(self.values)[0]
        if nz.size == 0:
            return 0.0
        return float(self.edges[nz[-1] + 1])

    def is_indicator(self) -> bool:
        return bool(np.all((self.values == 0.0) | (self.values == 1.0)))


def abel_transform(sp: SpaceParams, F: RadialFunction, s, tol: float = 1e-8):
    """Integral of F against the slice kernel from |s| upward.

    Exact per step for m2 = 0 via the closed-form antiderivative; for
    m2 >= 1 each step is integrated with the square-root substitution at
    the lower support edge.  s may be an array.
    """
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    s_abs = np.abs(s_arr)
    cosh_s = np.cosh(s_abs)
    lo_edges = F.edges[:-1]
    hi_edges = F.edges[1:]

    if sp.m2 == 0:
        power = sp.m1 / 2.0
        lo = np.maximum(lo_edges[:, None], s_abs[None, :])
        hi = np.broadcast_to(hi_edges[:, None], lo.shape)
        gap_hi = np.maximum(np.cosh(hi) - cosh_s[None, :], 0.0)
        gap_lo = np.maximum(np.cosh(lo) - cosh_s[None, :], 0.0)
        per_step = (2.0 / sp.m1) * (gap_hi ** power - gap_lo ** power)
        per_step = np.where(hi > lo, per_step, 0.0)
        out = F.values @ per_step
    else:
        out = np.zeros(s_arr.shape, dtype=float)
        for k in range(F.values.size):
            val = F.values[k]
            if val == 0.0:
                continue
            lo = np.maximum(lo_edges[k], s_abs)
            width = hi_edges[k] - lo
            active = width > 0
            if not active.any():
                continue
            la = lo[active]
            wa = width[active]
            sa = s_abs[active]

            def fvec(x):
                # t = lo + (width * x)^2 per point removes the edge kink
                root_w = np.sqrt(wa)[:, None]
                xx = root_w * x
                t_nodes = la[:, None] + xx * xx
                return 2.0 * root_w * xx * psi(sp, t_nodes, sa[:, None], tol=tol)

            out[active] += val * _integrate_unit(fvec, tol)

    if np.ndim(s) == 0:
        return float(out[0])
    return out


def radial_indicator_l21(sp: SpaceParams, F: RadialFunction) -> float:
    """Sqrt-scale radial norm of a {0,1}-valued radial function.

    For indicators the (2,1) Lorentz norm of the bi-invariant function is
    (up to the unit constant) the square root of the support's radial mass.
    """
    if not F.is_indicator():
        raise ValueError("this norm form applies to indicator profiles only")
    mass = 0.0
    for a, b, v in zip(F.edges[:-1], F.edges[1:], F.values):
        if v == 1.0:
            part, _ = quad(lambda t: float(radial_density(sp, t)), a, b, limit=200)
            mass += part
    return math.sqrt(mass)


def radial_l2_norm(sp: SpaceParams, F: RadialFunction) -> float:
    """L2 norm of a radial step function against the radial density."""
    acc = 0.0
    for a, b, v in zip(F.edges[:-1], F.edges[1:], F.values):
        if v != 0.0:
            part, _ = quad(lambda t: float(radial_density(sp, t)), a, b, limit=200)
            acc += v * v * part
    return math.sqrt(acc)


def abel_l21_bound(sp: SpaceParams, F: RadialFunction, s_grid=None,
                   tol: float = 1e-8):
    """Sup over shifts of the transform of an indicator versus its norm.

    Returns (sup over the s grid of the transform, sqrt-scale radial norm).
    The default grid covers the support with margin 1 at step <= 0.02.
    """
    if not F.is_indicator():
        raise ValueError("bound is stated for indicator profiles")
    if s_grid is None:
        top = F.support_radius + 1.0
        n = max(int(math.ceil(2 * top / 0.02)) + 1, 11)
        s_grid = np.linspace(-top, top, n)
    lhs = abel_transform(sp, F, s_grid, tol=tol)
    rhs = radial_indicator_l21(sp, F)
    return float(np.max(lhs)), rhs


def phi_weight(sp: SpaceParams, u):
    """Reference weight: u^{m1+m2} below 1, e^{rho u} above (continuous splice)."""
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise ValueError("u must be nonnegative")
    out = np.where(u <= 1.0, u ** (sp.m1 + sp.m2), np.exp(sp.rho * u))
    if out.ndim == 0:
        return float(out)
    return out


def _weighted_kernel_segment(sp, u, a, b, tol, singular_lo, singular_hi):
    """Integral of psi(u, s) e^{rho s} ds over [a, b] with edge substitutions."""
    if b <= a:
        return 0.0

    def plain(x):
        s_nodes = a + (b - a) * x
        return (b - a) * psi(sp, u, s_nodes, tol=tol)[None, :] * np.exp(sp.rho * s_nodes)

    def sub_lo(x):
        # s = a + ((b-a) x^2); handles the (s + u)^{p} edge at s = a = -u
        xx = math.sqrt(b - a) * x
        s_nodes = a + xx * xx
        return (2.0 * math.sqrt(b - a) * xx * psi(sp, u, s_nodes, tol=tol)
                * np.exp(sp.rho * s_nodes))[None, :]

    def sub_hi(x):
        xx = math.sqrt(b - a) * x
        s_nodes = b - xx * xx
        return (2.0 * math.sqrt(b - a) * xx * psi(sp, u, s_nodes, tol=tol)
                * np.exp(sp.rho * s_nodes))[None, :]

    if singular_lo and singular_hi:
        mid = (a + b) / 2.0
        return (_weighted_kernel_segment(sp, u, a, mid, tol, True, False)
                + _weighted_kernel_segment(sp, u, mid, b, tol, False, True))
    if singular_lo:
        return float(_integrate_unit(sub_lo, tol)[0])
    if singular_hi:
        return float(_integrate_unit(sub_hi, tol)[0])
    return float(_integrate_unit(plain, tol)[0])


def phi_sup_identity_check(sp: SpaceParams, u: float, n_r: int = 129,
                           tol: float = 1e-8):
    """Sup over r of e^{-rho r} * (partial weighted kernel mass) vs phi(u).

    Computes sup_{r in [-u, u]} e^{-rho r} int_{-u}^{r} psi(u, s) e^{rho s} ds
    on an r grid and returns (sup, sup / phi(u)).
    """
    u = float(u)
    if u <= 0:
        raise ValueError("u must be positive")
    r_grid = np.linspace(-u, u, n_r)
    partial = np.zeros(n_r)
    acc = 0.0
    for i in range(1, n_r):
        a, b = r_grid[i - 1], r_grid[i]
        acc += _weighted_kernel_segment(sp, u, a, b, tol,
                                        singular_lo=(i == 1),
                                        singular_hi=(i == n_r - 1))
        partial[i] = acc
    sup = float(np.max(np.exp(-sp.rho * r_grid) * partial))
    return sup, sup / phi_weight(sp, u)
