"""Verification suites: one per acceptance property, shared by CLI and tests.

Each suite returns a SuiteResult with per-case rows (CSV-ready) and a
summary {suite, cases, max_ratio, pinned_constant, pass}.  All randomness
is derived from the configured seed, so reruns are byte-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import convolution as cv
from . import maximal as mx
from . import pinned
from .geometry import make_point, make_space
from .kernel import (RadialFunction, abel_l21_bound, phi_sup_identity_check,
                     phi_weight, psi, psi_comparator, surface_mc)
from .rearrange import (WeightedSamples, decreasing_rearrangement,
                        exp_embedding_check, general_radial_profile, l21_norm,
                        rectangle_domination_check, row_l21_embedding_check,
                        samples)

ALL_SPACES = [(1, 0), (2, 0), (3, 0), (2, 1), (4, 3)]


@dataclass
class SuiteResult:
    suite: str
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def finish(self, cases: int, max_ratio: float, pinned_constant, ok: bool, **extra):
        self.summary = {
            "suite": self.suite,
            "cases": cases,
            "max_ratio": max_ratio,
            "pinned_constant": pinned_constant,
            "pass": bool(ok),
        }
        self.summary.update(extra)
        return self


def _suite_rng(seed: int, tag: str) -> np.random.Generator:
    return np.random.default_rng([seed, sum(ord(c) for c in tag), len(tag)])


def suite_kernel(cfg: dict, seed: int) -> SuiteResult:
    """Two-sided kernel/comparator comparability with refinement stability."""
    res = SuiteResult("kernel")
    tol = float(cfg.get("tol", 1e-8))
    s_max, s_step = float(cfg.get("s_max", 5.0)), float(cfg.get("s_step", 0.05))
    t_max, t_step = float(cfg.get("t_max", 10.0)), float(cfg.get("t_step", 0.05))
    cstar = pinned.KERNEL_COMPARATOR_CSTAR
    worst = 0.0
    ok = True
    cases = 0
    for m1, m2 in cfg.get("spaces", ALL_SPACES):
        sp = make_space(m1, m2)
        intervals = []
        for use_tol in (tol, tol / 2.0):
            lo, hi = np.inf, 0.0
            for sv in np.arange(-s_max, s_max + s_step / 2, s_step):
                ts = np.arange(abs(sv) + 0.01, t_max + t_step / 2, t_step)
                if ts.size == 0:
                    continue
                ratio = psi(sp, ts, sv, tol=use_tol) / psi_comparator(sp, ts, sv)
                lo, hi = min(lo, float(ratio.min())), max(hi, float(ratio.max()))
                cases += ts.size
            intervals.append((lo, hi))
        (lo, hi), (lo2, hi2) = intervals
        drift = max(abs(lo - lo2) / lo, abs(hi - hi2) / hi)
        worst = max(worst, hi, 1.0 / lo)
        in_band = (lo >= 1.0 / cstar) and (hi <= cstar)
        ok = ok and in_band and drift < 0.01
        res.rows.append({"m1": m1, "m2": m2, "ratio_lo": lo, "ratio_hi": hi,
                         "ratio_lo_refined": lo2, "ratio_hi_refined": hi2,
                         "drift": drift, "pass": in_band and drift < 0.01})
    return res.finish(cases, worst, cstar, ok)


def suite_surface(cfg: dict, seed: int) -> SuiteResult:
    """Monte Carlo slice measure against quadrature, one constant per space."""
    res = SuiteResult("surface")
    n = int(cfg.get("n_samples", 1_000_000))
    bins = [tuple(b) for b in cfg.get("bins", [[1.4, 1.6], [1.9, 2.1], [2.4, 2.6]])]
    shifts = [float(s) for s in cfg.get("shifts", [0.0, 0.5, 1.0])]
    rng = _suite_rng(seed, "surface")
    worst_z = 0.0
    worst_spread = 0.0
    ok = True
    kappas = {}
    for m1, m2 in cfg.get("spaces", ALL_SPACES):
        sp = make_space(m1, m2)
        pts = []
        for b in bins:
            for s in shifts:
                sub_seed = int(rng.integers(0, 2 ** 63))
                est, err = surface_mc(sp, b, s, n, seed=sub_seed)
                ts = np.linspace(b[0], b[1], 401)
                avg = float(np.trapezoid(psi(sp, ts, s), ts) / (b[1] - b[0]))
                pts.append((b, s, est, err, avg))
        w = np.array([1.0 / (p[3] ** 2) for p in pts])
        k_hat = np.array([p[2] / p[4] for p in pts])
        kappa = float((w * k_hat).sum() / w.sum())
        kappas[f"{m1},{m2}"] = kappa
        spread = float((k_hat.max() - k_hat.min()) / kappa)
        worst_spread = max(worst_spread, spread)
        for (b, s, est, err, avg) in pts:
            z = abs(est - kappa * avg) / err if err > 0 else 0.0
            worst_z = max(worst_z, z)
            res.rows.append({"m1": m1, "m2": m2, "bin_lo": b[0], "bin_hi": b[1],
                             "shift": s, "estimate": est, "stderr": err,
                             "quadrature_avg": avg, "kappa": kappa, "z": z})
            ok = ok and z <= 3.0
        ok = ok and spread <= 0.02
    return res.finish(len(res.rows), worst_z, 3.0, ok,
                      kappa=kappas, max_spread=worst_spread)


def suite_abel(cfg: dict, seed: int) -> SuiteResult:
    """Transform-of-indicator sup ratios plus the growing-ball saturation."""
    res = SuiteResult("abel")
    rng = _suite_rng(seed, "abel")
    tol = float(cfg.get("tol", 1e-6))
    s_step = float(cfg.get("s_step", 0.05))
    n_random = int(cfg.get("n_random", 200))
    r_max = int(cfg.get("ball_radii_max", 20))
    ok = True
    worst_norm = 0.0

    def grid_for(F):
        top = F.support_radius + 1.0
        return np.linspace(-top, top, int(math.ceil(2 * top / s_step)) + 1)

    for m1, m2 in cfg.get("spaces", [(2, 0), (2, 1)]):
        sp = make_space(m1, m2)
        limit = pinned.ABEL_SUP_RATIO_MAX[(m1, m2)]
        fam = []
        for radius in range(1, r_max + 1):
            F = RadialFunction.ball(float(radius))
            sup, rhs = abel_l21_bound(sp, F, s_grid=grid_for(F), tol=tol)
            ratio = sup / rhs
            fam.append(ratio)
            worst_norm = max(worst_norm, ratio / limit)
            res.rows.append({"m1": m1, "m2": m2, "kind": "ball", "param": radius,
                             "ratio": ratio})
            ok = ok and ratio <= limit
        growth = max(fam) / max(fam[:r_max // 2])
        ok = ok and growth < 1.05
        res.rows.append({"m1": m1, "m2": m2, "kind": "family_growth", "param": r_max,
                         "ratio": growth})
        for i in range(n_random):
            k = int(rng.integers(1, 6))
            pts = np.sort(rng.uniform(0, 10, size=2 * k))
            F = RadialFunction.indicator(list(zip(pts[0::2], pts[1::2])))
            sup, rhs = abel_l21_bound(sp, F, s_grid=grid_for(F), tol=tol)
            if rhs == 0:
                continue
            ratio = sup / rhs
            worst_norm = max(worst_norm, ratio / limit)
            if i < 20 or ratio > limit:
                res.rows.append({"m1": m1, "m2": m2, "kind": "random", "param": i,
                                 "ratio": ratio})
            ok = ok and ratio <= limit
    return res.finish(2 * (n_random + r_max), worst_norm,
                      {f"{k[0]},{k[1]}": v
                       for k, v in pinned.ABEL_SUP_RATIO_MAX.items()}, ok)


def suite_rearrange(cfg: dict, seed: int) -> SuiteResult:
    """Conservation, rectangle domination, prefix embedding, iterated norm."""
    res = SuiteResult("rearrange")
    rng = _suite_rng(seed, "rearrange")
    n_rect = int(cfg.get("n_rectangle", 10_000))
    n_exp = int(cfg.get("n_exp", 1000))
    n_iter = int(cfg.get("n_iterated", 1000))
    max_dim = int(cfg.get("max_dim", 8))
    ok = True

    worst_cons = 0.0
    worst_dom = 0.0  # positive values would be violations
    for _ in range(n_rect):
        nr, nc = int(rng.integers(1, max_dim + 1)), int(rng.integers(1, max_dim + 1))
        a = rng.random((nr, nc)) * (rng.random((nr, nc)) < 0.8)
        rw = rng.random(nr) + 0.1
        rw /= rw.sum()
        cw = rng.random(nc) + 0.1
        cw /= cw.sum()
        from .rearrange import double_rearrangement
        prof = double_rearrangement(a, rw, cw)
        total = float(rw @ a @ cw)
        cons = abs(prof.integral() - total)
        worst_cons = max(worst_cons, cons)
        D = rng.random(nr) < 0.5
        E = rng.random(nc) < 0.5
        if D.any() and E.any():
            lhs, rhs = rectangle_domination_check(a, D, E, rw, cw)
            worst_dom = max(worst_dom, lhs - rhs)
    ok = ok and worst_cons <= 1e-12 and worst_dom <= 1e-12
    res.rows.append({"check": "conservation", "cases": n_rect, "worst": worst_cons})
    res.rows.append({"check": "rectangle_domination", "cases": n_rect,
                     "worst": worst_dom})

    worst_exp = 0.0  # positive values would be violations
    worst_prefix = 0.0
    for i in range(n_exp):
        k = int(rng.integers(1, 6))
        pts = np.sort(rng.uniform(0, 10, size=2 * k))
        lhs, rhs = exp_embedding_check(list(zip(pts[0::2], pts[1::2])), 1.0)
        worst_exp = max(worst_exp, lhs - rhs)
        lam = float(rng.uniform(0.1, 10))
        lhs, rhs = exp_embedding_check([(0.0, lam)], 1.0)
        worst_prefix = max(worst_prefix, abs(lhs - rhs) / lhs)
    ok = ok and worst_exp <= 1e-12 and worst_prefix <= 1e-12
    res.rows.append({"check": "exp_embedding", "cases": n_exp, "worst": worst_exp})
    res.rows.append({"check": "exp_prefix_equality", "cases": n_exp,
                     "worst": worst_prefix})

    worst_iter = 0.0
    for _ in range(n_iter):
        nr, nc = int(rng.integers(1, 17)), int(rng.integers(1, 17))
        H = rng.random((nr, nc)) * (rng.random((nr, nc)) < 0.7)
        uw = rng.random(nr) + 0.1
        vw = rng.random(nc) + 0.1
        lhs, rhs = row_l21_embedding_check(H, uw, vw)
        if rhs > 0:
            worst_iter = max(worst_iter, lhs / rhs)
    ok = ok and worst_iter <= 1.0 + 1e-9
    res.rows.append({"check": "iterated_l21", "cases": n_iter, "worst": worst_iter})

    return res.finish(n_rect + n_exp + n_iter, worst_iter,
                      pinned.ITERATED_L21_C, ok)


def suite_chain(cfg: dict, seed: int) -> SuiteResult:
    """Chain domination on random models plus the single-atom reduction."""
    res = SuiteResult("chain")
    rng = _suite_rng(seed, "chain")
    n_models = int(cfg.get("n_models", 200))
    n_red = int(cfg.get("n_reduction", 20))
    n_K = int(cfg.get("n_K", 8))
    n_t = int(cfg.get("n_t", 64))
    spaces = cfg.get("spaces", [(2, 0), (2, 1)])
    c12, c23 = pinned.CHAIN_C12, pinned.CHAIN_C23
    ok = True
    w12 = w23 = w3s = 0.0
    per_space = n_models // len(spaces)
    for m1, m2 in spaces:
        sp = make_space(m1, m2)
        for i in range(per_space):
            model = cv.random_model(sp, rng, n_K=n_K, n_t=n_t)
            s1 = cv.chain_step1_bound(model, sp)
            s2 = cv.chain_step2_bound(model, sp)
            s3 = cv.chain_step3_bound(model, sp)
            data = cv.rearranged_data(model, sp)
            norms = cv.rearranged_norms(data, sp)
            split = cv.split_optimize(data, sp, norms)
            r12 = s1 / s2 if s2 > 0 else 0.0
            r23 = s2 / s3 if s3 > 0 else 0.0
            r3s = c12 * c23 * s3 / split if split > 0 else 0.0
            w12, w23, w3s = max(w12, r12), max(w23, r23), max(w3s, r3s)
            good = (s1 <= c12 * s2 * (1 + 1e-12) + 1e-300
                    and s2 <= c23 * s3 * (1 + 1e-12) + 1e-300
                    and c12 * c23 * s3 <= split * (1 + 1e-12))
            ok = ok and good
            if i < 10 or not good:
                res.rows.append({"m1": m1, "m2": m2, "model": i, "step1": s1,
                                 "step2": s2, "step3": s3, "split": split,
                                 "pass": good})

    # single-atom reduction: the bound must equal the direct bi-invariant
    # formula, and the u-quadrature must match the step-function transform
    sp = make_space(2, 0)
    from .kernel import abel_transform
    worst_red = 0.0
    worst_quad = 0.0
    for i in range(n_red):
        model = cv.random_model(sp, rng, n_K=1, n_t=n_t, s_jitter=0.0)
        s2 = cv.chain_step2_bound(model, sp)
        F, H = cv.side_masses(model, sp)
        W = cv._psi_weighted_g(model, sp)[0, 0]
        eps = np.exp(sp.rho * model.s_grid)
        c1 = F[0] * eps <= H[0]
        c2 = H[0] <= F[0] * eps
        direct = (F[0] ** 2 * (eps * W * c1).sum()
                  + H[0] ** 2 * (W / eps * c2).sum()) * model.t_step
        rel = abs(s2 - direct) / direct if direct > 0 else 0.0
        worst_red = max(worst_red, rel)
        # step-profile transform consistency on one s-slice
        g_prof = model.G1[0, 0, :, model.t_grid.size - 1]  # s = 0 column
        du = model.u_step
        edges = np.concatenate((np.maximum(model.u_grid - du / 2, 0.0),
                                [model.u_grid[-1] + du / 2]))
        F_step = RadialFunction(edges=edges, values=g_prof)
        quad_val = abel_transform(sp, F_step, 0.0)
        riemann = float((g_prof * psi(sp, model.u_grid, 0.0)).sum() * du)
        if quad_val > 0:
            worst_quad = max(worst_quad, abs(riemann - quad_val) / quad_val)
        res.rows.append({"m1": 2, "m2": 0, "model": f"reduction_{i}",
                         "step1": 0.0, "step2": s2, "step3": direct,
                         "split": rel, "pass": rel <= 1e-8})
        ok = ok and rel <= 1e-8
    ok = ok and worst_quad <= 0.01
    return res.finish(n_models + n_red, max(w12, w23, w3s),
                      {"c12": c12, "c23": c23, "split": pinned.SPLIT_BOUND_C}, ok,
                      worst_step12=w12, worst_step23=w23, worst_split=w3s,
                      worst_reduction=worst_red, worst_quadrature=worst_quad)


def suite_endpoint(cfg: dict, seed: int) -> SuiteResult:
    """Trilinear ratio saturation for growing balls plus the L2 probe."""
    res = SuiteResult("endpoint")
    sp = make_space(2, 0)
    radii = [float(x) for x in cfg.get("radii", range(1, 9))]
    n = int(cfg.get("n_samples", 10_000_000))
    rng = _suite_rng(seed, "endpoint")
    base_seed = int(rng.integers(0, 2 ** 62))
    rows = cv.endpoint_ratio_sweep(
        sp, {"kind": "balls", "radii": radii, "n_samples": n}, seed=base_seed)
    ok = True
    by_radius = {}
    for row in rows:
        row["kind"] = "ball"
        by_radius[row["radius"]] = row["ratio"]
        ok = ok and row["stderr_frac"] < 0.10
        ok = ok and row["ratio"] <= pinned.ENDPOINT_RATIO_MAX
        res.rows.append(row)
    if 8.0 in by_radius and 4.0 in by_radius:
        ok = ok and by_radius[8.0] <= 1.5 * by_radius[4.0]

    probe = cv.endpoint_ratio_sweep(
        sp, {"kind": "l2_probe", "radius": float(cfg.get("probe_radius", 5.0)),
             "layers": int(cfg.get("probe_layers", 8)),
             "n_samples": int(cfg.get("probe_samples", 4_000_000))},
        seed=int(rng.integers(0, 2 ** 62)))
    ratios = [row["ratio"] for row in probe]
    increasing = all(b > a for a, b in zip(ratios, ratios[1:]))
    ok = ok and increasing
    for row in probe:
        row["kind"] = "l2_probe"
        row["radius"] = row.pop("layers")
        res.rows.append(row)
    return res.finish(len(res.rows), max(by_radius.values()),
                      pinned.ENDPOINT_RATIO_MAX, ok, probe_increasing=increasing)


def suite_profile(cfg: dict, seed: int) -> SuiteResult:
    """General-profile bound: indicator equivalence, additivity, weight order."""
    res = SuiteResult("profile")
    rng = _suite_rng(seed, "profile")
    n_models = int(cfg.get("n_models", 50))
    sp = make_space(2, 0)
    ok = True
    worst_eq = 0.0
    worst_add = 0.0
    for i in range(n_models):
        model = cv.random_model(sp, rng, n_K=8, n_t=32, n_u=32)
        # indicator version supported on u >= 1
        u_grid = np.linspace(1.0, 4.5, 32)
        support = (u_grid[:, None] >= np.abs(model.s_grid)[None, :]).astype(float)
        g_ind = (model.G1 > 0).astype(float)[:, :, :32, :]
        g_ind = g_ind * support[None, None, :, :]
        ind = cv.DiscreteModel(n_K=8, t_grid=model.t_grid, u_grid=u_grid,
                               F1=(model.F1 > 0).astype(float),
                               H1=(model.H1 > 0).astype(float), G1=g_ind)
        d_atom = cv.rearranged_data(ind, sp)
        d_prof = cv.rearranged_data_profile(ind, sp)
        with_exp = cv._rearranged_integral(d_atom, np.exp(sp.rho * u_grid))
        with_phi = cv.theorem8_bound(sp, d_prof)
        rel = abs(with_exp - with_phi) / with_exp if with_exp > 0 else 0.0
        worst_eq = max(worst_eq, rel)
        ok = ok and rel <= 1e-12

        # nested two-layer additivity of the general profile
        w = np.exp(2.0 * sp.rho * model.t_grid) * model.t_step
        outer = (rng.random((8, model.t_grid.size)) < 0.5).astype(float)
        inner = outer * (rng.random((8, model.t_grid.size)) < 0.5)
        c1, c2 = float(rng.uniform(0.2, 2.0)), float(rng.uniform(0.2, 2.0))
        combined = general_radial_profile(c1 * outer + c2 * inner, w)
        split_sum = None
        p1 = general_radial_profile(outer, w)
        p2 = general_radial_profile(inner, w)
        grid = np.arange(1, 9) / 8.0
        add_err = float(np.max(np.abs(combined.value_at(grid)
                                      - c1 * p1.value_at(grid)
                                      - c2 * p2.value_at(grid))))
        worst_add = max(worst_add, add_err)
        ok = ok and add_err <= 1e-10
        if i < 10:
            res.rows.append({"model": i, "equivalence_rel": rel,
                             "additivity_err": add_err})

    u_grid = np.linspace(0.0, 8.0, 257)
    order = float(np.max(phi_weight(sp, u_grid) - np.exp(sp.rho * u_grid)))
    ok = ok and order <= 0.0
    res.rows.append({"model": "weight_order", "equivalence_rel": order,
                     "additivity_err": 0.0})

    ratios = {}
    for m1, m2 in cfg.get("phi_spaces", ALL_SPACES):
        spx = make_space(m1, m2)
        lo_lim, hi_lim = pinned.PHI_SUP_RATIO_INTERVAL[(m1, m2)]
        for u in cfg.get("phi_points", (0.1, 0.5, 1.0, 2.0, 4.0)):
            _, ratio = phi_sup_identity_check(spx, float(u))
            ratios[f"{m1},{m2},{u}"] = ratio
            ok = ok and lo_lim <= ratio <= hi_lim
            res.rows.append({"model": f"phi_{m1}_{m2}_u{u}",
                             "equivalence_rel": ratio, "additivity_err": 0.0})
    return res.finish(n_models, worst_eq, 1e-12, ok,
                      worst_additivity=worst_add)


def _random_ball_field(model, rng, n_balls_range=(1, 5), radius_range=(0.6, 1.5),
                       s_range=(-0.8, 0.8), v_frac=3.0):
    sp = model.sp
    balls = []
    for _ in range(int(rng.integers(*n_balls_range))):
        rad = float(rng.uniform(*radius_range))
        s0 = float(rng.uniform(*s_range))
        vmax = model.v_half - math.exp(-s0) * math.sinh(rad) / math.sqrt(2) - 0.5
        lim = min(vmax, model.v_half / v_frac)
        v0 = rng.uniform(-lim, lim, size=sp.m1)
        balls.append(mx.BallSpec(model, make_point(sp, v0, (), s0), rad))
    return mx.indicator_field(model, balls), balls


def suite_maximal(cfg: dict, seed: int) -> SuiteResult:
    """Operator order, pointwise domination, weak-type separation family."""
    res = SuiteResult("maximal")
    rng = _suite_rng(seed, "maximal")
    ok = True
    worst = 0.0

    # operator order on both spaces
    for m1, n_v, n_s, v_half, s_half, step in [(1, 256, 256, 20.0, 5.0, 4),
                                               (2, 64, 64, 8.0, 4.0, 8)]:
        sp = make_space(m1, 0)
        model = mx.GridModel(sp=sp, v_half=v_half, s_half=s_half, n_v=n_v, n_s=n_s)
        for i in range(int(cfg.get("n_order_fields", 3))):
            f, _ = _random_ball_field(model, rng)
            radii = [0.5, 1.0, 2.0]
            small, v1 = mx.m1_centered_field(f, radii)
            big, _ = mx.m2_noncentered_field(f, radii, subgrid_step=step)
            exact = bool(np.all(big[v1] >= small[v1]))
            ok = ok and exact
            res.rows.append({"part": "order", "space": m1, "case": i,
                             "value": float((big - small)[v1].min()), "pass": exact})

    # pointwise domination with pinned constants and refinement stability
    n_fields = int(cfg.get("n_domination_fields", 50))
    n_refine = int(cfg.get("n_refine", 3))
    for m1, n_v, n_s, v_half, s_half in [(1, 512, 192, 30.0, 6.0),
                                         (2, 48, 48, 8.0, 4.0)]:
        sp = make_space(m1, 0)
        limit = pinned.DOMINATION_C3[(m1, 0)]
        model = mx.GridModel(sp=sp, v_half=v_half, s_half=s_half, n_v=n_v, n_s=n_s)
        fine = mx.GridModel(sp=sp, v_half=v_half, s_half=s_half,
                            n_v=2 * n_v, n_s=2 * n_s)
        radii = [1.0, 2 ** 0.5, 2.0]
        for i in range(n_fields):
            f, balls = _random_ball_field(model, rng)
            rep = mx.pointwise_domination_check(f, radii)
            ok = ok and rep.flagged_cells == 0 and rep.worst_ratio <= limit
            worst = max(worst, rep.worst_ratio / limit)
            row = {"part": "domination", "space": m1, "case": i,
                   "value": rep.worst_ratio, "pass": rep.worst_ratio <= limit}
            if i < n_refine:
                f2 = mx.indicator_field(fine, [
                    mx.BallSpec(fine, b.center, b.radius) for b in balls])
                rep2 = mx.pointwise_domination_check(f2, radii)
                stable = abs(rep2.worst_ratio - rep.worst_ratio) \
                    <= 0.10 * rep.worst_ratio
                ok = ok and stable
                row["refined_value"] = rep2.worst_ratio
                row["pass"] = row["pass"] and stable
            res.rows.append(row)

    # weak-type separation family on the wide (1,0) grid
    sp = make_space(1, 0)
    wide = mx.GridModel(sp=sp, v_half=float(cfg.get("wide_v_half", 950.0)),
                        s_half=5.0, n_v=int(cfg.get("wide_n_v", 16384)),
                        n_s=int(cfg.get("wide_n_s", 128)))
    spread = 110.0
    mid = wide.n_s // 2

    def family(k):
        centers = []
        for i in range(k):
            pos = (i - (k - 1) / 2) * spread
            j = int(np.argmin(np.abs(wide.v_axis - pos)))
            centers.append(make_point(sp, [wide.v_axis[j]], (), wide.s_axis[mid]))
        return [mx.BallSpec(wide, c, 1.0) for c in centers]

    ks = [int(k) for k in cfg.get("separation_ks", (1, 2, 4, 8, 16))]
    instances = [(str(k), mx.indicator_field(wide, family(k))) for k in ks]
    sweep = mx.weak_type_sweep(instances, [1.0, 2 ** 0.5, 2.0, 2 ** 1.5, 4.0])
    baseline = sweep[0]["ratio"]
    for row in sweep:
        in_band = baseline / 2.0 <= row["ratio"] <= 2.0 * baseline
        ok = ok and in_band
        res.rows.append({"part": "weak_type", "space": 1, "case": row["instance"],
                         "value": row["ratio"], "pass": in_band,
                         "weak_norm": row["weak_norm"], "l21_norm": row["l21_norm"]})
    return res.finish(len(res.rows), worst, dict(
        (f"{k[0]},{k[1]}", v) for k, v in pinned.DOMINATION_C3.items()), ok)


def suite_covering(cfg: dict, seed: int) -> SuiteResult:
    """Greedy ball selection: union ratio <= 2, overlap weak norm pinned."""
    res = SuiteResult("covering")
    rng = _suite_rng(seed, "covering")
    sp = make_space(1, 0)
    model = mx.GridModel(sp=sp, v_half=60.0, s_half=6.0, n_v=1024, n_s=192)
    n_fam = int(cfg.get("n_families", 100))
    ok = True
    worst1 = worst2 = 0.0
    for i in range(n_fam):
        balls = []
        for _ in range(int(rng.integers(5, 20))):
            rad = float(rng.uniform(1, 4))
            s0 = float(rng.uniform(-1.0, 1.5))
            vmax = model.v_half - math.exp(-s0) * math.sinh(rad) / math.sqrt(2) - 0.5
            v0 = float(rng.uniform(-min(vmax, 40), min(vmax, 40)))
            balls.append(mx.BallSpec(model, make_point(sp, [v0], (), s0), rad))
        sel, rep = mx.covering_select(model, balls)
        good = rep["union_ratio"] <= 2.0 \
            and rep["overlap_weak_ratio"] <= pinned.COVERING_OVERLAP_C4
        ok = ok and good
        worst1 = max(worst1, rep["union_ratio"])
        worst2 = max(worst2, rep["overlap_weak_ratio"])
        res.rows.append({"family": i, "n_balls": rep["n_balls"],
                         "n_selected": rep["n_selected"],
                         "union_ratio": rep["union_ratio"],
                         "overlap_weak_ratio": rep["overlap_weak_ratio"],
                         "pass": good})
    return res.finish(n_fam, worst2, pinned.COVERING_OVERLAP_C4, ok,
                      worst_union_ratio=worst1)


SUITES = {
    "kernel": suite_kernel,
    "surface": suite_surface,
    "abel": suite_abel,
    "rearrange": suite_rearrange,
    "chain": suite_chain,
    "endpoint": suite_endpoint,
    "profile": suite_profile,
    "maximal": suite_maximal,
    "covering": suite_covering,
}


def run_suite(name: str, config: dict) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    cfg = config.get("suites", {}).get(name, {})
    return SUITES[name](cfg, int(config.get("seed", 7)))
