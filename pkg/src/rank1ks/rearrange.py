"""Nonincreasing rearrangements, Lorentz quasinorms and embedding checks.

All carriers are discrete: a measurable function is a finite list of
(value, weight) atoms, its rearrangement a right-continuous nonincreasing
step function on (0, M], and the two-variable rearrangement a step surface
that is nonincreasing along both axes.  Continuum statements are exercised
through grid refinement in the test layer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pinned import ITERATED_L21_C


@dataclass(frozen=True, eq=False)
class WeightedSamples:
    """Finite weighted carrier of a nonnegative measurable function."""

    values: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if values.shape != weights.shape or values.ndim != 1:
            raise ValueError("values and weights must be 1-d arrays of equal length")
        if np.any(weights <= 0):
            raise ValueError("all weights must be positive")
        if np.any(values < 0):
            raise ValueError("all values must be nonnegative")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "weights", weights)

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())


def samples(values, weights=None) -> WeightedSamples:
    values = np.asarray(values, dtype=float)
    if weights is None:
        weights = np.ones_like(values)
    return WeightedSamples(values=values, weights=np.asarray(weights, dtype=float))


@dataclass(frozen=True, eq=False)
class StepProfile:
    """Nonincreasing step function on (0, M].

    ``values[i]`` is taken on the interval (breaks[i-1], breaks[i]], with
    breaks[-1] = M.  Equal adjacent values are merged on construction so the
    representation is canonical and independent of input tie order.
    """

    breaks: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        breaks = np.asarray(self.breaks, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if breaks.ndim != 1 or breaks.shape != values.shape:
            raise ValueError("breaks and values must be 1-d arrays of equal length")
        if breaks.size == 0:
            raise ValueError("a step profile needs at least one interval")
        if np.any(np.diff(breaks) <= 0) or breaks[0] <= 0:
            raise ValueError("breaks must be strictly increasing and positive")
        if np.any(np.diff(values) > 0):
            raise ValueError("values must be nonincreasing")
        # canonical form: merge adjacent equal values
        keep = np.ones(values.size, dtype=bool)
        keep[:-1] = values[:-1] != values[1:]
        object.__setattr__(self, "breaks", breaks[keep])
        object.__setattr__(self, "values", values[keep])

    @property
    def total_mass(self) -> float:
        return float(self.breaks[-1])

    def widths(self) -> np.ndarray:
        return np.diff(np.concatenate(([0.0], self.breaks)))

    def value_at(self, x):
        """Evaluate at x in (0, M]; 0 beyond M."""
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.breaks, x, side="left")
        padded = np.concatenate((self.values, [0.0]))
        return padded[np.minimum(idx, self.values.size)]

    def integral(self) -> float:
        return float(np.dot(self.values, self.widths()))

    def mass_above(self, lam: float) -> float:
        """Measure of {x : profile(x) > lam}."""
        above = self.values > lam
        if not above.any():
            return 0.0
        return float(self.breaks[np.nonzero(above)[0][-1]])


def decreasing_rearrangement(f: WeightedSamples) -> StepProfile:
    """Sort values descending; cumulative weights become the breakpoints.

    Preserves the distribution function exactly: for every level lam the
    mass of {f > lam} equals the length of {x : f*(x) > lam}.
    """
    order = np.argsort(-f.values, kind="stable")
    return StepProfile(breaks=np.cumsum(f.weights[order]), values=f.values[order])


def lorentz_norm(p: StepProfile, p_exp: float, q_exp: float) -> float:
    """Lorentz quasinorm of a nonincreasing profile.

    Uses the functional (int (x^{1/p} f*(x))^q dx/x)^{1/q}, integrated in
    closed form on each step; q = inf gives sup_x x^{1/p} f*(x).
    """
    if p_exp <= 0:
        raise ValueError(f"p exponent must be positive, got {p_exp}")
    if q_exp <= 0:
        raise ValueError(f"q exponent must be positive, got {q_exp}")
    right = p.breaks
    left = np.concatenate(([0.0], right[:-1]))
    if np.isinf(q_exp):
        return float(np.max(p.values * right ** (1.0 / p_exp)))
    a = q_exp / p_exp
    acc = np.dot(p.values ** q_exp, right ** a - left ** a) / a
    return float(acc ** (1.0 / q_exp))


def weak_l2_norm(f: WeightedSamples) -> float:
    """sup_lam lam * mass{f > lam}^{1/2}, via the (2, inf) Lorentz functional."""
    return lorentz_norm(decreasing_rearrangement(f), 2.0, np.inf)


def l21_norm(f: WeightedSamples) -> float:
    """The (2, 1) Lorentz quasinorm of a weighted sample set."""
    return lorentz_norm(decreasing_rearrangement(f), 2.0, 1.0)


@dataclass(frozen=True, eq=False)
class DoubleProfile:
    """Step surface on (0, Mx] x (0, My], nonincreasing along both axes."""

    x_breaks: np.ndarray
    y_breaks: np.ndarray
    values: np.ndarray  # shape (len(x_breaks), len(y_breaks))

    def __post_init__(self):
        xb = np.asarray(self.x_breaks, dtype=float)
        yb = np.asarray(self.y_breaks, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (xb.size, yb.size):
            raise ValueError("values shape must match the break grids")
        object.__setattr__(self, "x_breaks", xb)
        object.__setattr__(self, "y_breaks", yb)
        object.__setattr__(self, "values", vals)

    def _cell_widths(self, breaks, upto):
        left = np.concatenate(([0.0], breaks[:-1]))
        return np.clip(np.minimum(breaks, upto) - left, 0.0, None)

    def rectangle_integral(self, x_upto: float, y_upto: float) -> float:
        """Integral over (0, x_upto] x (0, y_upto]."""
        wx = self._cell_widths(self.x_breaks, x_upto)
        wy = self._cell_widths(self.y_breaks, y_upto)
        return float(wx @ self.values @ wy)

    def integral(self) -> float:
        return self.rectangle_integral(self.x_breaks[-1], self.y_breaks[-1])


def _uniform_weights(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)


def double_rearrangement(a, row_weights=None, col_weights=None) -> DoubleProfile:
    """Two-stage rearrangement of a nonnegative matrix over K x K'.

    Stage one rearranges each row over the second factor; stage two, for
    each cell of the refined second-axis grid, rearranges the resulting
    column over the first factor.  Both factors carry probability weights.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError("input must be a matrix")
    n, m = a.shape
    rw = _uniform_weights(n) if row_weights is None else np.asarray(row_weights, dtype=float)
    cw = _uniform_weights(m) if col_weights is None else np.asarray(col_weights, dtype=float)
    for w, k in ((rw, n), (cw, m)):
        if w.shape != (k,) or np.any(w <= 0):
            raise ValueError("weights must be positive and match the matrix shape")
        if abs(w.sum() - 1.0) > 1e-9:
            raise ValueError("factor weights must sum to 1")

    row_profiles = [decreasing_rearrangement(WeightedSamples(a[i], cw)) for i in range(n)]
    y_breaks = np.unique(np.concatenate([p.breaks for p in row_profiles]))
    stage1 = np.stack([p.value_at(y_breaks) for p in row_profiles])  # (n, ny)

    col_profiles = [decreasing_rearrangement(WeightedSamples(stage1[:, j], rw))
                    for j in range(y_breaks.size)]
    x_breaks = np.unique(np.concatenate([p.breaks for p in col_profiles]))
    values = np.stack([p.value_at(x_breaks) for p in col_profiles], axis=1)  # (nx, ny)
    return DoubleProfile(x_breaks=x_breaks, y_breaks=y_breaks, values=values)


def rectangle_domination_check(a, D, E, row_weights=None, col_weights=None):
    """Rectangle integral of a versus its double rearrangement.

    Returns (lhs, rhs) with lhs the integral of a over D x E and rhs the
    integral of the double rearrangement over (0, |D|] x (0, |E|].
    """
    a = np.asarray(a, dtype=float)
    n, m = a.shape
    rw = _uniform_weights(n) if row_weights is None else np.asarray(row_weights, dtype=float)
    cw = _uniform_weights(m) if col_weights is None else np.asarray(col_weights, dtype=float)
    D = np.asarray(D)
    E = np.asarray(E)
    if D.dtype != bool:
        mask = np.zeros(n, dtype=bool)
        mask[D] = True
        D = mask
    if E.dtype != bool:
        mask = np.zeros(m, dtype=bool)
        mask[E] = True
        E = mask
    if not D.any() or not E.any():
        return 0.0, 0.0
    lhs = float(rw[D] @ a[np.ix_(D, E)] @ cw[E])
    prof = double_rearrangement(a, rw, cw)
    rhs = prof.rectangle_integral(float(rw[D].sum()), float(cw[E].sum()))
    return lhs, rhs


def _normalize_intervals(intervals):
    ivs = sorted((float(a), float(b)) for a, b in intervals if b > a)
    merged = []
    for a, b in ivs:
        if a < 0:
            raise ValueError("indicator intervals must lie in the positive half-line")
        if merged and a <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], b))
        else:
            merged.append((a, b))
    return merged


def exp_embedding_check(g_intervals, delta: float):
    """Prefix-extremal embedding check for a {0,1}-valued g on (0, inf).

    After the exponential substitution the inequality is scale-free in
    delta: lhs = int g(s) ds, rhs = sqrt(2) * (int g(s) s ds)^{1/2}, with
    equality exactly when g is the indicator of a prefix [0, L].  delta is
    validated (the substitution needs it nonzero) but does not change the
    returned pair.
    """
    if delta == 0:
        raise ValueError("delta must be nonzero")
    ivs = _normalize_intervals(g_intervals)
    lhs = sum(b - a for a, b in ivs)
    first_moment = sum((b * b - a * a) / 2.0 for a, b in ivs)
    return float(lhs), float(np.sqrt(2.0 * first_moment))


def row_l21_embedding_check(H, u_weights=None, v_weights=None):
    """Square-mean of row (2,1)-norms versus the global (2,1)-norm.

    lhs = (sum_u w_u ||H(u, .)||_{2,1}^2)^{1/2}; rhs is the (2,1)-norm of H
    over the product space scaled by the pinned constant.  The observed
    ratio lhs/norm never exceeded 1 in calibration; the pinned constant
    records that sweep, it is not claimed as a theorem.
    """
    H = np.asarray(H, dtype=float)
    n, m = H.shape
    uw = np.ones(n) if u_weights is None else np.asarray(u_weights, dtype=float)
    vw = np.ones(m) if v_weights is None else np.asarray(v_weights, dtype=float)
    row_norms_sq = np.empty(n)
    for i in range(n):
        row_norms_sq[i] = l21_norm(WeightedSamples(H[i], vw)) ** 2
    lhs = float(np.sqrt(np.dot(uw, row_norms_sq)))
    flat = WeightedSamples(H.ravel(), np.outer(uw, vw).ravel())
    return lhs, float(ITERATED_L21_C * l21_norm(flat))


def general_radial_profile(f, cell_weights, k_weights=None) -> StepProfile:
    """Radial profile of a function sampled over K x (weighted cell grid).

    Stage one rearranges f(k, .) over the weighted cells for each k; stage
    two rearranges over k at each mass level r; stage three integrates the
    sqrt-scale functional (1/2) int profile(x, r) r^{-1/2} dr in closed form
    per step.  For indicator inputs this collapses to the rearrangement of
    k -> (mass of the k-section)^{1/2}.
    """
    f = np.asarray(f, dtype=float)
    cell_weights = np.asarray(cell_weights, dtype=float)
    if f.ndim != 2 or f.shape[1] != cell_weights.size:
        raise ValueError("f must be (n_K, n_cells) matching cell_weights")
    n_k = f.shape[0]
    kw = _uniform_weights(n_k) if k_weights is None else np.asarray(k_weights, dtype=float)
    if abs(kw.sum() - 1.0) > 1e-9:
        raise ValueError("K weights must sum to 1")

    row_profiles = [decreasing_rearrangement(WeightedSamples(f[i], cell_weights))
                    for i in range(n_k)]
    r_breaks = np.unique(np.concatenate([p.breaks for p in row_profiles]))
    stage1 = np.stack([p.value_at(r_breaks) for p in row_profiles])  # (n_k, nr)

    col_profiles = [decreasing_rearrangement(WeightedSamples(stage1[:, j], kw))
                    for j in range(r_breaks.size)]
    x_breaks = np.unique(np.concatenate([p.breaks for p in col_profiles]))
    stage2 = np.stack([p.value_at(x_breaks) for p in col_profiles], axis=1)  # (nx, nr)

    # (1/2) int r^{-1/2} dr over each r-cell = sqrt(right) - sqrt(left)
    right = np.sqrt(r_breaks)
    left = np.sqrt(np.concatenate(([0.0], r_breaks[:-1])))
    fstar = stage2 @ (right - left)
    # enforce the (tiny) monotonicity that float rounding may disturb
    fstar = np.maximum.accumulate(fstar[::-1])[::-1]
    return StepProfile(breaks=x_breaks, values=fstar)
