#!/usr/bin/env python3
"""Calibration sweeps behind the values in rank1ks.pinned.

Run before freezing the test suite; prints the measured extremes plus the
suggested pinned values (measured worst case with a safety margin).  Takes
a few minutes at the default sizes.
"""

import time

import numpy as np

import rank1ks as r
from rank1ks import convolution as cv
from rank1ks import maximal as mx
from rank1ks.kernel import psi
from rank1ks.rearrange import WeightedSamples, l21_norm

SPACES = [(1, 0), (2, 0), (3, 0), (2, 1), (4, 3)]


def comparator():
    print("== kernel/comparator ratio ==")
    for m1, m2 in SPACES:
        sp = r.make_space(m1, m2)
        lo, hi = np.inf, 0.0
        for sv in np.arange(-5, 5.0001, 0.05):
            ts = np.arange(abs(sv) + 0.01, 10.0001, 0.05)
            if ts.size == 0:
                continue
            ratio = psi(sp, ts, sv) / r.psi_comparator(sp, ts, sv)
            lo, hi = min(lo, ratio.min()), max(hi, ratio.max())
        print(f"  {(m1, m2)}: [{lo:.6f}, {hi:.6f}]  -> C* >= {max(hi, 1/lo):.4f}")


def abel_ratios():
    print("== abel sup ratio ==")
    rng = np.random.default_rng(2024)
    for m1, m2 in SPACES:
        sp = r.make_space(m1, m2)
        worst = 0.0
        for radius in range(1, 21):
            sup, rhs = r.abel_l21_bound(sp, r.RadialFunction.ball(float(radius)))
            worst = max(worst, sup / rhs)
        for _ in range(200):
            k = rng.integers(1, 6)
            pts = np.sort(rng.uniform(0, 10, size=2 * k))
            F = r.RadialFunction.indicator(list(zip(pts[0::2], pts[1::2])))
            if F.support_radius == 0:
                continue
            sup, rhs = r.abel_l21_bound(sp, F)
            if rhs > 0:
                worst = max(worst, sup / rhs)
        print(f"  {(m1, m2)}: worst ratio {worst:.6f}")


def iterated_l21():
    print("== iterated row-(2,1) embedding ==")
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(1000):
        n, m = rng.integers(1, 17), rng.integers(1, 17)
        H = rng.random((n, m)) * (rng.random((n, m)) < 0.7)
        uw = rng.random(n) + 0.1
        vw = rng.random(m) + 0.1
        lhs, rhs = r.row_l21_embedding_check(H, uw, vw)
        norm = rhs  # pinned constant is 1.0 in the build used for calibration
        if norm > 0:
            worst = max(worst, lhs / norm)
    print(f"  worst lhs/norm: {worst:.8f}")


def chain():
    print("== chain constants (200 random models each space) ==")
    for m1, m2 in [(2, 0), (2, 1)]:
        sp = r.make_space(m1, m2)
        rng = np.random.default_rng(99)
        w12 = w23 = w3s = 0.0
        for _ in range(200):
            model = cv.random_model(sp, rng)
            s1 = cv.chain_step1_bound(model, sp)
            s2 = cv.chain_step2_bound(model, sp)
            s3 = cv.chain_step3_bound(model, sp)
            data = cv.rearranged_data(model, sp)
            nf, ng, nh = cv.rearranged_norms(data, sp)
            split = 2.0 * nf * ng * nh
            if s2 > 0:
                w12 = max(w12, s1 / s2)
            if s3 > 0:
                w23 = max(w23, s2 / s3)
            if split > 0:
                w3s = max(w3s, s3 / split)
        print(f"  {(m1, m2)}: step1/step2 {w12:.6f}, step2/step3 {w23:.6f}, "
              f"step3/(2|f||g||h|) {w3s:.6f}")


def endpoint():
    print("== endpoint ratio family ==")
    sp = r.make_space(2, 0)
    rows = cv.endpoint_ratio_sweep(
        sp, {"kind": "balls", "radii": list(range(1, 9)), "n_samples": 2_000_000}, seed=31)
    for row in rows:
        print(f"  R={row['radius']:.0f} ratio={row['ratio']:.4f} "
              f"stderr={row['stderr_frac']:.4f}")


def domination():
    print("== pointwise domination constant ==")
    for m1, n_v, n_s, v_half, s_half in [(1, 512, 192, 30.0, 6.0),
                                         (2, 48, 48, 8.0, 4.0)]:
        sp = r.make_space(m1, 0)
        model = mx.GridModel(sp=sp, v_half=v_half, s_half=s_half, n_v=n_v, n_s=n_s)
        rng = np.random.default_rng(5)
        radii = [1.0, 2 ** 0.5, 2.0]
        worst = 0.0
        t0 = time.time()
        for _ in range(20):
            balls = []
            for _ in range(rng.integers(1, 5)):
                rad = float(rng.uniform(0.6, 1.5))
                s0 = float(rng.uniform(-0.8, 0.8))
                vmax = v_half - np.exp(-s0) * np.sinh(rad) / np.sqrt(2) - 0.5
                v0 = rng.uniform(-min(vmax, v_half / 3), min(vmax, v_half / 3), size=m1)
                balls.append(mx.BallSpec(model, r.make_point(sp, v0, (), s0), rad))
            f = mx.indicator_field(model, balls)
            rep = mx.pointwise_domination_check(f, radii)
            assert rep.flagged_cells == 0
            worst = max(worst, rep.worst_ratio)
        print(f"  m1={m1}: worst ratio {worst:.4f} ({time.time() - t0:.0f}s)")


def large_ball_split():
    print("== large-ball averages vs sqrt-normalized operator ==")
    sp = r.make_space(1, 0)
    model = mx.GridModel(sp=sp, v_half=30.0, s_half=6.0, n_v=512, n_s=192)
    rng = np.random.default_rng(17)
    worst = 0.0
    for _ in range(10):
        rad = float(rng.uniform(0.6, 1.2))
        s0 = float(rng.uniform(-0.5, 0.5))
        v0 = float(rng.uniform(-5, 5))
        f = mx.indicator_field(model, [mx.BallSpec(model, r.make_point(sp, [v0], (), s0), rad)])
        fm = f.values * model.row_measures()
        tilde, valid = mx.m2_tilde_field(f, [1.0, 2 ** 0.5, 2.0])
        for rr in [1.0, 2 ** 0.5, 2.0]:
            ok = mx.containment_mask(model, rr)
            sums = mx.ball_sums_centered(model, fm, rr)
            meas = mx.ball_measures_centered(model, rr)
            avg = sums / meas
            good = ok & valid & (tilde > 0)
            if good.any():
                worst = max(worst, float((avg[good] / tilde[good]).max()))
    print(f"  worst avg/tilde: {worst:.4f}")


def covering():
    print("== covering overlap ratio ==")
    sp = r.make_space(1, 0)
    model = mx.GridModel(sp=sp, v_half=60.0, s_half=6.0, n_v=1024, n_s=192)
    rng = np.random.default_rng(11)
    w1 = w2 = 0.0
    for _ in range(100):
        balls = []
        for _ in range(rng.integers(5, 20)):
            rad = float(rng.uniform(1, 4))
            s0 = float(rng.uniform(-1.0, 1.5))
            vmax = model.v_half - np.exp(-s0) * np.sinh(rad) / np.sqrt(2) - 0.5
            v0 = float(rng.uniform(-min(vmax, 40), min(vmax, 40)))
            balls.append(mx.BallSpec(model, r.make_point(sp, [v0], (), s0), rad))
        _, rep = mx.covering_select(model, balls)
        w1 = max(w1, rep["union_ratio"])
        w2 = max(w2, rep["overlap_weak_ratio"])
    print(f"  worst union ratio {w1:.4f}, worst overlap ratio {w2:.4f}")


def phi_intervals():
    print("== weight identity ratio intervals ==")
    for m1, m2 in SPACES:
        sp = r.make_space(m1, m2)
        ratios = [r.phi_sup_identity_check(sp, u)[1] for u in (0.1, 0.5, 1.0, 2.0, 4.0)]
        print(f"  {(m1, m2)}: [{min(ratios):.4f}, {max(ratios):.4f}]")


if __name__ == "__main__":
    comparator()
    abel_ratios()
    iterated_l21()
    chain()
    phi_intervals()
    covering()
    large_ball_split()
    domination()
    endpoint()
