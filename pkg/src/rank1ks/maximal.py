"""Discretized maximal operators on real hyperbolic grid models.

The grid lives in (v, s) coordinates with cell measure e^{2 rho s} times
the coordinate cell volume.  Balls are handled containment-only: a ball
that would stick out of the box is rejected rather than clipped, so
averages are never biased by truncation.  Four operators are provided:
the centered average, the noncentered average over a finite candidate
family, the sqrt-normalized large-ball operator, and the slice operator
on the nilpotent factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import (SpaceParams, UnsupportedSpaceError, IwasawaPoint,
                       make_point, max_slice_radius)
from .rearrange import WeightedSamples, l21_norm, weak_l2_norm


@dataclass(frozen=True, eq=False)
class GridModel:
    """Uniform box [-v_half, v_half]^m1 x [-s_half, s_half] of cell centers."""

    sp: SpaceParams
    v_half: float
    s_half: float
    n_v: int
    n_s: int

    def __post_init__(self):
        if self.sp.m2 != 0:
            raise UnsupportedSpaceError("grid models require m2 = 0")
        if self.n_v < 2 or self.n_s < 2:
            raise ValueError("need at least two cells per axis")

    @property
    def dv(self) -> float:
        return 2.0 * self.v_half / self.n_v

    @property
    def ds(self) -> float:
        return 2.0 * self.s_half / self.n_s

    @property
    def v_axis(self) -> np.ndarray:
        return -self.v_half + (np.arange(self.n_v) + 0.5) * self.dv

    @property
    def s_axis(self) -> np.ndarray:
        return -self.s_half + (np.arange(self.n_s) + 0.5) * self.ds

    @property
    def shape(self) -> tuple:
        return (self.n_v,) * self.sp.m1 + (self.n_s,)

    def cell_volume(self) -> float:
        return self.dv ** self.sp.m1 * self.ds

    def row_measures(self) -> np.ndarray:
        """Cell measure per s row: e^{2 rho s} * coordinate cell volume."""
        return np.exp(2.0 * self.sp.rho * self.s_axis) * self.cell_volume()

    def weights_field(self) -> np.ndarray:
        return np.broadcast_to(self.row_measures(), self.shape).copy()

    def total_mass(self) -> float:
        return float(self.row_measures().sum()) * self.n_v ** self.sp.m1


@dataclass(frozen=True, eq=False)
class FieldGrid:
    """Nonnegative scalar field sampled at the cell centers."""

    model: GridModel
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != self.model.shape:
            raise ValueError(f"field shape {vals.shape} != grid shape {self.model.shape}")
        if not np.all(np.isfinite(vals)) or np.any(vals < 0):
            raise ValueError("field values must be finite and nonnegative")
        object.__setattr__(self, "values", vals)


def _contained(model: GridModel, v0: np.ndarray, s0: float, radius: float) -> bool:
    v_reach = math.exp(-s0) * max_slice_radius(radius)
    if abs(s0) + radius > model.s_half:
        return False
    return bool(np.all(np.abs(v0) + v_reach <= model.v_half))


@dataclass(frozen=True, eq=False)
class BallSpec:
    """A metric ball that must fit inside the grid box."""

    model: GridModel
    center: IwasawaPoint
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if not _contained(self.model, self.center.v, self.center.s, self.radius):
            raise ValueError(
                "ball is not contained in the grid box; "
                "boundary clipping would bias averages")


def _threshold_sq(model: GridModel, s0: float, radius: float) -> np.ndarray:
    """Squared v-half-width of the ball section on each s row (can be <= 0)."""
    ds = model.s_axis - s0
    return np.exp(-2.0 * s0) * np.exp(-ds) * (math.cosh(radius) - np.cosh(ds))


def ball_cells(model: GridModel, ball: BallSpec):
    """(mask, measure) of the cells whose centers lie strictly inside the ball."""
    thr = _threshold_sq(model, ball.center.s, ball.radius)
    diffs = [(model.v_axis - ball.center.v[a]) ** 2 for a in range(model.sp.m1)]
    if model.sp.m1 == 1:
        dist2 = diffs[0]
    else:
        dist2 = diffs[0][:, None] + diffs[1][None, :]
        for a in range(2, model.sp.m1):
            dist2 = dist2[..., None] + diffs[a]
    mask = dist2[..., None] < thr
    counts = mask.sum(axis=tuple(range(model.sp.m1)))
    measure = float(counts @ model.row_measures())
    return mask, measure


def containment_mask(model: GridModel, radius: float) -> np.ndarray:
    """Cells whose centered ball of the given radius fits inside the box."""
    reach = np.exp(-model.s_axis) * max_slice_radius(radius)
    cond_v = np.abs(model.v_axis)[:, None] + reach[None, :] <= model.v_half  # (n_v, n_s)
    cond_s = np.abs(model.s_axis) + radius <= model.s_half
    if model.sp.m1 == 1:
        return cond_v & cond_s
    out = cond_v[:, None, :] & cond_v[None, :, :]
    for _ in range(model.sp.m1 - 2):
        out = out[..., None, :] & cond_v
    return out & cond_s


def _interval_sums_axis0(block: np.ndarray, k: int) -> np.ndarray:
    """Sliding window sum of half-width k cells along axis 0, zero padded."""
    n = block.shape[0]
    cs = np.concatenate([np.zeros((1,) + block.shape[1:]), np.cumsum(block, axis=0)])
    hi = np.minimum(np.arange(n) + k + 1, n)
    lo = np.maximum(np.arange(n) - k, 0)
    return cs[hi] - cs[lo]


def _halfwidth_cells(w_sq: float, dv: float) -> int:
    """Largest k with (k dv)^2 < w_sq; -1 when the section is empty."""
    if w_sq <= 0:
        return -1
    return int(math.ceil(math.sqrt(w_sq) / dv)) - 1


def ball_sums_centered(model: GridModel, weighted: np.ndarray, radius: float) -> np.ndarray:
    """Sum of a weighted field over B(cell, radius) for every cell at once."""
    out = np.zeros(model.shape)
    s_axis = model.s_axis
    max_ds = int(math.floor(radius / model.ds)) + 1
    for i0 in range(model.n_s):
        acc = None
        for i1 in range(max(0, i0 - max_ds), min(model.n_s, i0 + max_ds + 1)):
            ds = s_axis[i1] - s_axis[i0]
            w_sq = math.exp(-2.0 * s_axis[i0]) * math.exp(-ds) \
                * (math.cosh(radius) - math.cosh(ds))
            if model.sp.m1 == 1:
                k = _halfwidth_cells(w_sq, model.dv)
                if k < 0:
                    continue
                part = _interval_sums_axis0(weighted[:, i1], k)
            else:
                k2 = _halfwidth_cells(w_sq, model.dv)
                if k2 < 0:
                    continue
                part = np.zeros((model.n_v, model.n_v))
                plane = weighted[:, :, i1]
                for off in range(-k2, k2 + 1):
                    k1 = _halfwidth_cells(w_sq - (off * model.dv) ** 2, model.dv)
                    lo = max(0, -off)
                    hi = min(model.n_v, model.n_v - off)
                    if k1 < 0 or hi <= lo:
                        continue
                    part[:, lo:hi] += _interval_sums_axis0(plane[:, lo + off:hi + off], k1)
            acc = part if acc is None else acc + part
        if acc is not None:
            out[..., i0] = acc
    return out


def ball_measures_centered(model: GridModel, radius: float) -> np.ndarray:
    """|B(cell, radius)| per s row (independent of the v position)."""
    out = np.zeros(model.n_s)
    s_axis = model.s_axis
    rows = model.row_measures()
    max_ds = int(math.floor(radius / model.ds)) + 1
    for i0 in range(model.n_s):
        acc = 0.0
        for i1 in range(max(0, i0 - max_ds), min(model.n_s, i0 + max_ds + 1)):
            ds = s_axis[i1] - s_axis[i0]
            w_sq = math.exp(-2.0 * s_axis[i0]) * math.exp(-ds) \
                * (math.cosh(radius) - np.cosh(ds))
            if model.sp.m1 == 1:
                k = _halfwidth_cells(w_sq, model.dv)
                if k >= 0:
                    acc += (2 * k + 1) * rows[i1]
            else:
                k2 = _halfwidth_cells(w_sq, model.dv)
                if k2 >= 0:
                    count = 0
                    for off in range(-k2, k2 + 1):
                        k1 = _halfwidth_cells(w_sq - (off * model.dv) ** 2, model.dv)
                        if k1 >= 0:
                            count += 2 * k1 + 1
                    acc += count * rows[i1]
        out[i0] = acc
    return out


def _cell_point(model: GridModel, cell) -> IwasawaPoint:
    idx = tuple(cell)
    v = np.array([model.v_axis[idx[a]] for a in range(model.sp.m1)])
    return make_point(model.sp, v, (), model.s_axis[idx[-1]])


def m1_centered(f: FieldGrid, cell, radii) -> float:
    """Centered maximal average at one cell over a list of radii."""
    model = f.model
    fm = f.values * model.row_measures()
    center = _cell_point(model, cell)
    best = 0.0
    for r in radii:
        mask, measure = ball_cells(model, BallSpec(model, center, float(r)))
        if measure > 0:
            best = max(best, float(fm[mask].sum()) / measure)
    return best


def m1_centered_field(f: FieldGrid, radii):
    """Centered maximal averages on every cell; (values, validity mask)."""
    model = f.model
    fm = f.values * model.row_measures()
    out = np.zeros(model.shape)
    valid = np.zeros(model.shape, dtype=bool)
    for r in radii:
        ok = containment_mask(model, float(r))
        if not ok.any():
            continue
        sums = ball_sums_centered(model, fm, float(r))
        meas = ball_measures_centered(model, float(r))
        avg = sums / np.where(meas > 0, meas, np.inf)
        out = np.where(ok, np.maximum(out, avg), out)
        valid |= ok
    return out, valid


def m2_noncentered(f: FieldGrid, cell, candidate_balls) -> float:
    """Noncentered maximal average at one cell over explicit candidate balls."""
    model = f.model
    from .geometry import distance
    z = _cell_point(model, cell)
    fm = f.values * model.row_measures()
    best = 0.0
    for ball in candidate_balls:
        if distance(model.sp, ball.center, z) >= ball.radius:
            raise ValueError("candidate ball does not contain the evaluation cell")
        mask, measure = ball_cells(model, ball)
        if measure > 0:
            best = max(best, float(fm[mask].sum()) / measure)
    return best


def _scatter_max(model: GridModel, out: np.ndarray, center_idx, s0_idx: int,
                 radius: float, value: float):
    """Raise out to value on all cells of the ball around a grid cell."""
    s_axis = model.s_axis
    s0 = s_axis[s0_idx]
    max_ds = int(math.floor(radius / model.ds)) + 1
    for i1 in range(max(0, s0_idx - max_ds), min(model.n_s, s0_idx + max_ds + 1)):
        ds = s_axis[i1] - s0
        w_sq = math.exp(-2.0 * s0) * math.exp(-ds) * (math.cosh(radius) - math.cosh(ds))
        if model.sp.m1 == 1:
            k = _halfwidth_cells(w_sq, model.dv)
            if k < 0:
                continue
            j = center_idx[0]
            sl = slice(max(0, j - k), min(model.n_v, j + k + 1))
            np.maximum(out[sl, i1], value, out=out[sl, i1])
        else:
            k2 = _halfwidth_cells(w_sq, model.dv)
            if k2 < 0:
                continue
            j1, j2 = center_idx
            for off in range(-k2, k2 + 1):
                col = j2 + off
                if col < 0 or col >= model.n_v:
                    continue
                k1 = _halfwidth_cells(w_sq - (off * model.dv) ** 2, model.dv)
                if k1 < 0:
                    continue
                sl = slice(max(0, j1 - k1), min(model.n_v, j1 + k1 + 1))
                np.maximum(out[sl, col, i1], value, out=out[sl, col, i1])


def m2_noncentered_field(f: FieldGrid, radii, subgrid_step: int = 4):
    """Noncentered maximal averages over subgrid-centered candidates.

    Candidate centers sit on every subgrid_step-th cell along each axis;
    centered balls at the evaluation cell are always included, so the
    result dominates the centered operator pointwise by construction.
    The finite family under-approximates the true supremum.
    """
    model = f.model
    fm = f.values * model.row_measures()
    out, valid = m1_centered_field(f, radii)
    sub = [np.arange(0, model.n_v, subgrid_step)] * model.sp.m1 \
        + [np.arange(0, model.n_s, subgrid_step)]
    for r in radii:
        r = float(r)
        ok = containment_mask(model, r)
        sums = ball_sums_centered(model, fm, r)
        meas = ball_measures_centered(model, r)
        for idx in np.ndindex(*(len(a) for a in sub)):
            cell = tuple(int(sub[d][idx[d]]) for d in range(len(sub)))
            if not ok[cell]:
                continue
            m = meas[cell[-1]]
            if m <= 0:
                continue
            _scatter_max(model, out, cell[:-1], cell[-1], r, float(sums[cell]) / m)
    return out, valid


def m2_tilde(f: FieldGrid, cell, radii) -> float:
    """Sqrt-normalized centered averages over radii >= 1 at one cell."""
    model = f.model
    radii = [float(r) for r in radii]
    if any(r < 1.0 for r in radii):
        raise ValueError("the sqrt-normalized operator uses radii >= 1 only")
    fm = f.values * model.row_measures()
    center = _cell_point(model, cell)
    best = 0.0
    for r in radii:
        mask, measure = ball_cells(model, BallSpec(model, center, r))
        if measure > 0:
            best = max(best, float(fm[mask].sum()) / math.sqrt(measure))
    return best


def m2_tilde_field(f: FieldGrid, radii):
    """Sqrt-normalized operator on every cell; (values, validity mask)."""
    model = f.model
    radii = [float(r) for r in radii]
    if any(r < 1.0 for r in radii):
        raise ValueError("the sqrt-normalized operator uses radii >= 1 only")
    fm = f.values * model.row_measures()
    out = np.zeros(model.shape)
    valid = np.zeros(model.shape, dtype=bool)
    for r in radii:
        ok = containment_mask(model, r)
        if not ok.any():
            continue
        sums = ball_sums_centered(model, fm, r)
        meas = ball_measures_centered(model, r)
        val = sums / np.sqrt(np.where(meas > 0, meas, np.inf))
        out = np.where(ok, np.maximum(out, val), out)
        valid |= ok
    return out, valid


def _slice_ball_offsets(model: GridModel, u: float):
    """Cell offsets of the closed v-ball |m| <= u (slice geometry)."""
    k = int(math.floor(u / model.dv + 1e-12))
    return k


def m3_nilpotent(f: FieldGrid, cell, u_list) -> float:
    """Slice maximal function at one cell: averages over |m| <= u."""
    model = f.model
    idx = tuple(cell)
    margin = model.v_half - max(abs(model.v_axis[i]) for i in idx[:-1])
    best = 0.0
    for u in u_list:
        u = float(u)
        if u > margin:
            raise ValueError(f"slice radius {u} exceeds the box margin {margin}")
        field = m3_field(f, [u])
        best = max(best, float(field[idx]))
    return best


def m3_field(f: FieldGrid, u_list) -> np.ndarray:
    """Slice maximal function on every cell.

    Reads outside the box count as zero, which is exact whenever the field
    is supported inside it; radii beyond the box margin are therefore
    allowed here, unlike in the single-cell form.
    """
    model = f.model
    out = np.zeros(model.shape)
    for u in u_list:
        u = float(u)
        k = _slice_ball_offsets(model, u)
        if model.sp.m1 == 1:
            sums = _interval_sums_axis0(f.values, k)
        else:
            sums = np.zeros(model.shape)
            for off in range(-k, k + 1):
                rest = u * u - (off * model.dv) ** 2
                lo = max(0, -off)
                hi = min(model.n_v, model.n_v - off)
                if rest < 0 or hi <= lo:
                    continue
                k1 = int(math.floor(math.sqrt(rest) / model.dv + 1e-12))
                sums[:, lo:hi, :] += _interval_sums_axis0(
                    f.values[:, lo + off:hi + off, :], k1)
        scale = model.dv ** model.sp.m1 / u ** (2.0 * model.sp.rho)
        np.maximum(out, sums * scale, out=out)
    return out


@dataclass(frozen=True)
class DominationReport:
    worst_ratio: float
    flagged_cells: int
    valid_cells: int


def domination_u_list(model: GridModel, radii) -> list:
    """Slice radii for the domination check.

    The inclusion behind the bound needs slice balls up to
    e^{(r + |t| + |t'|)/2}, so the list runs geometrically from two cells
    to e^{(max radius + 2 s_half)/2}.
    """
    u_min = 2.0 * model.dv
    u_max = math.exp((max(radii) + 2.0 * model.s_half) / 2.0)
    n = max(int(math.ceil(math.log(u_max / u_min) / math.log(math.sqrt(2.0)))), 1) + 1
    return list(np.geomspace(u_min, u_max, n))


def pointwise_domination_check(f: FieldGrid, radii, u_list=None) -> DominationReport:
    """Largest ratio of the sqrt-normalized operator to the A-integrated
    slice operator over the cells where both are defined."""
    model = f.model
    if u_list is None:
        u_list = domination_u_list(model, radii)
    lhs, valid = m2_tilde_field(f, radii)
    m3 = m3_field(f, u_list)
    kernel = np.exp(model.sp.rho * model.s_axis) * model.ds
    profile = m3 @ kernel  # integrate out the s axis
    rhs = profile[..., None] * np.exp(-model.sp.rho * model.s_axis)
    flagged = int(np.count_nonzero(valid & (rhs == 0.0) & (lhs > 0.0)))
    good = valid & (rhs > 0.0)
    worst = float((lhs[good] / rhs[good]).max()) if good.any() else 0.0
    return DominationReport(worst_ratio=worst, flagged_cells=flagged,
                            valid_cells=int(valid.sum()))


def field_l21_norm(f: FieldGrid) -> float:
    w = f.model.weights_field()
    pos = f.values > 0
    if not pos.any():
        return 0.0
    return l21_norm(WeightedSamples(f.values[pos], w[pos]))


def field_weak_l2_norm(values: np.ndarray, weights: np.ndarray) -> float:
    pos = values > 0
    if not pos.any():
        return 0.0
    return weak_l2_norm(WeightedSamples(values[pos], weights[pos]))


def weak_type_sweep(instances, radii):
    """Weak-norm ratio table: one row per labelled field instance."""
    rows = []
    for label, f in instances:
        big, valid = m2_tilde_field(f, radii)
        weights = f.model.weights_field()
        weak = field_weak_l2_norm(big[valid], weights[valid])
        sharp = field_l21_norm(f)
        rows.append({
            "instance": label,
            "weak_norm": weak,
            "l21_norm": sharp,
            "ratio": weak / sharp if sharp > 0 else 0.0,
        })
    return rows


def covering_select(model: GridModel, balls):
    """Greedy half-new-measure selection with a coverage guarantee.

    Balls are scanned by decreasing measure and accepted when at least
    half their measure is new.  A final augmentation pass accepts further
    balls (largest new measure first) until the selected union reaches
    half the full union, which forces report ratio (i) <= 2.
    """
    rows = model.row_measures()

    def mask_measure(mask):
        return float(mask.sum(axis=tuple(range(model.sp.m1))) @ rows)

    masks = []
    measures = []
    for b in balls:
        mask, measure = ball_cells(model, b)
        masks.append(mask)
        measures.append(measure)
    order = sorted(range(len(balls)), key=lambda i: (-measures[i], i))

    covered = np.zeros(model.shape, dtype=bool)
    selected = []
    for i in order:
        new = mask_measure(masks[i] & ~covered)
        if new >= 0.5 * measures[i]:
            selected.append(i)
            covered |= masks[i]

    union_all = np.zeros(model.shape, dtype=bool)
    for m in masks:
        union_all |= m
    union_all_measure = mask_measure(union_all)

    remaining = [i for i in order if i not in set(selected)]
    while mask_measure(covered) < 0.5 * union_all_measure and remaining:
        gains = [(mask_measure(masks[i] & ~covered), -i) for i in remaining]
        best = max(range(len(remaining)), key=lambda j: gains[j])
        i = remaining.pop(best)
        selected.append(i)
        covered |= masks[i]

    overlap = np.zeros(model.shape)
    for i in selected:
        overlap += masks[i]
    union_sel_measure = mask_measure(covered)
    weak = field_weak_l2_norm(overlap, model.weights_field())
    report = {
        "union_all": union_all_measure,
        "union_selected": union_sel_measure,
        "union_ratio": union_all_measure / union_sel_measure if union_sel_measure else math.inf,
        "overlap_weak_ratio": weak / math.sqrt(union_all_measure) if union_all_measure else 0.0,
        "n_selected": len(selected),
        "n_balls": len(balls),
    }
    return sorted(selected), report


def radial_field(model: GridModel, profile) -> FieldGrid:
    """Field given by a radial step profile of the distance to the origin."""
    diffs = [model.v_axis ** 2 for _ in range(model.sp.m1)]
    if model.sp.m1 == 1:
        dist2 = diffs[0]
    else:
        dist2 = diffs[0][:, None] + diffs[1][None, :]
        for a in range(2, model.sp.m1):
            dist2 = dist2[..., None] + diffs[a]
    from .geometry import cartan_radius_components
    t = cartan_radius_components(dist2[..., None], 0.0, model.s_axis)
    return FieldGrid(model=model, values=profile.eval(t))


def indicator_field(model: GridModel, balls) -> FieldGrid:
    """Indicator of a union of balls."""
    vals = np.zeros(model.shape, dtype=bool)
    for b in balls:
        mask, _ = ball_cells(model, b)
        vals |= mask
    return FieldGrid(model=model, values=vals.astype(float))
