"""Batch front-end: experiment orchestration, CSV/JSON artifacts, reports.

Numeric defaults live in defaults.json (shipped with the package); a JSON
config file overrides them and command-line flags override both.  Reruns
with the same config and seed are byte-identical.  Exit codes: 0 success,
1 verification failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import convolution as cv
from . import maximal as mx
from . import verification
from .geometry import ball_volume, make_point, make_space, radial_density
from .kernel import (RadialFunction, abel_l21_bound, abel_transform, psi,
                     psi_comparator, radial_indicator_l21)
from .pinned import KERNEL_COMPARATOR_CSTAR
from .rearrange import decreasing_rearrangement, lorentz_norm, samples


class ConfigError(Exception):
    pass


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def write_csv(path: Path, rows) -> None:
    rows = list(rows)
    columns: list[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[c]) if c in row else "" for c in columns) + "\n")


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def write_json(path: Path, payload) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def load_config(path: str | None) -> dict:
    with resources.files("rank1ks").joinpath("defaults.json").open() as fh:
        config = json.load(fh)
    if path:
        try:
            with open(path) as fh:
                user = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        config = _merge(config, user)
    return config


def _merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


def _parse_range(text: str) -> np.ndarray:
    """a..b or a..b..step (inclusive endpoints up to rounding)."""
    parts = text.split("..")
    if len(parts) == 2:
        a, b, step = float(parts[0]), float(parts[1]), 0.1
    elif len(parts) == 3:
        a, b, step = (float(p) for p in parts)
    else:
        raise ConfigError(f"bad range {text!r}, expected a..b or a..b..step")
    n = int(math.floor((b - a) / step + 1e-9)) + 1
    return a + step * np.arange(n)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_space_info(args) -> int:
    sp = make_space(args.m1, args.m2)
    print(f"m1 = {sp.m1}, m2 = {sp.m2}, rho = {sp.rho}")
    rows = []
    for t in _parse_range(args.t):
        rows.append({"t": float(t), "radial_density": float(radial_density(sp, t)),
                     "ball_volume": ball_volume(sp, float(t))})
    for row in rows[:: max(1, len(rows) // 12)]:
        print(f"  t={row['t']:<6g} density={row['radial_density']:<12.6g} "
              f"volume={row['ball_volume']:.6g}")
    if args.out:
        write_csv(_out_dir(args) / "space_info.csv", rows)
    return 0


def cmd_kernel_table(args) -> int:
    sp = make_space(args.m1, args.m2)
    t_grid = _parse_range(args.t)
    s_grid = _parse_range(args.s)
    rows = []
    lo, hi = np.inf, 0.0
    for t in t_grid:
        vals = psi(sp, float(t), s_grid, tol=args.tol)
        vals = np.atleast_1d(vals)
        for j, s in enumerate(s_grid):
            row = {"t": float(t), "s": float(s), "psi": float(vals[j])}
            if t > abs(s):
                comp = float(psi_comparator(sp, float(t), float(s)))
                row["comparator"] = comp
                row["ratio"] = row["psi"] / comp if comp > 0 else 0.0
                if comp > 0:
                    lo, hi = min(lo, row["ratio"]), max(hi, row["ratio"])
            rows.append(row)
    out = _out_dir(args)
    write_csv(out / "kernel_table.csv", rows)
    ok = bool(hi <= KERNEL_COMPARATOR_CSTAR and lo >= 1.0 / KERNEL_COMPARATOR_CSTAR)
    write_json(out / "kernel_table_summary.json", {
        "suite": "kernel-table", "cases": len(rows),
        "max_ratio": hi, "min_ratio": lo,
        "pinned_constant": KERNEL_COMPARATOR_CSTAR, "pass": ok})
    print(f"kernel-table: ratio in [{lo:.6g}, {hi:.6g}], "
          f"pinned C* = {KERNEL_COMPARATOR_CSTAR}: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def cmd_abel(args) -> int:
    sp = make_space(args.m1, args.m2)
    F = RadialFunction.ball(args.radius)
    s_grid = _parse_range(args.s) if args.s else None
    if s_grid is None:
        top = F.support_radius + 1.0
        s_grid = np.linspace(-top, top, 401)
    vals = abel_transform(sp, F, s_grid)
    rows = [{"s": float(s), "transform": float(v)} for s, v in zip(s_grid, vals)]
    sup, rhs = abel_l21_bound(sp, F, s_grid=s_grid)
    out = _out_dir(args)
    write_csv(out / "abel.csv", rows)
    write_json(out / "abel_summary.json", {
        "suite": "abel", "cases": len(rows), "max_ratio": sup / rhs,
        "pinned_constant": None, "pass": True,
        "sup_transform": sup, "sqrt_norm": rhs})
    print(f"abel: sup {sup:.6g}, norm {rhs:.6g}, ratio {sup / rhs:.6g}")
    return 0


def cmd_lorentz_norm(args) -> int:
    values = [float(x) for x in args.values.split(",")]
    weights = [float(x) for x in args.weights.split(",")] if args.weights else None
    prof = decreasing_rearrangement(samples(values, weights))
    q = math.inf if args.q in ("inf", "oo") else float(args.q)
    print(f"{lorentz_norm(prof, float(args.p), q):.17g}")
    return 0


def _run_suites(names, config, out: Path) -> int:
    overall = True
    summaries = []
    for name in names:
        result = verification.run_suite(name, config)
        write_csv(out / f"suite_{name}.csv", result.rows)
        write_json(out / f"summary_{name}.json", result.summary)
        summaries.append(result.summary)
        overall = overall and result.summary["pass"]
        print(f"[{'PASS' if result.summary['pass'] else 'FAIL'}] {name}: "
              f"cases={result.summary['cases']} "
              f"max_ratio={_fmt(result.summary['max_ratio'])}")
    write_json(out / "verify_summary.json",
               {"pass": overall, "suites": summaries,
                "seed": config.get("seed")})
    return 0 if overall else 1


def cmd_verify(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    names = list(verification.SUITES) if args.suite == "all" \
        else [s.strip() for s in args.suite.split(",")]
    for name in names:
        if name not in verification.SUITES:
            raise ConfigError(f"unknown suite {name!r}; "
                              f"choose from {', '.join(verification.SUITES)}")
    return _run_suites(names, config, _out_dir(args))


def cmd_report(args) -> int:
    out = Path(args.out)
    path = out / "verify_summary.json"
    if not path.exists():
        raise ConfigError(f"no verify_summary.json under {out}")
    with open(path) as fh:
        payload = json.load(fh)
    print(f"{'suite':<12} {'cases':>7} {'max_ratio':>14} {'pass':>6}")
    for s in payload["suites"]:
        print(f"{s['suite']:<12} {s['cases']:>7} "
              f"{_fmt(s['max_ratio'])[:14]:>14} {'yes' if s['pass'] else 'NO':>6}")
    print(f"overall: {'PASS' if payload['pass'] else 'FAIL'}")
    return 0 if payload["pass"] else 1


def cmd_trilinear(args) -> int:
    sp = make_space(args.m1, args.m2)
    triple = cv.BiInvariantTriple(RadialFunction.ball(args.f_radius),
                                  RadialFunction.ball(args.g_radius),
                                  RadialFunction.ball(args.h_radius))
    est, err = cv.trilinear_mc(sp, triple, n_samples=args.samples, seed=args.seed or 0)
    norm = math.sqrt(ball_volume(sp, args.f_radius)) \
        * radial_indicator_l21(sp, RadialFunction.ball(args.g_radius)) \
        * math.sqrt(ball_volume(sp, args.h_radius))
    out = _out_dir(args)
    write_csv(out / "trilinear.csv", [{
        "f_radius": args.f_radius, "g_radius": args.g_radius,
        "h_radius": args.h_radius, "estimate": est, "stderr": err,
        "norm_product": norm, "ratio": est / norm if norm else 0.0}])
    print(f"trilinear: {est:.6g} +/- {err:.2g} (norm product {norm:.6g})")
    return 0


def cmd_chain_verify(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    if args.models:
        config["suites"]["chain"]["n_models"] = args.models
    return _run_suites(["chain"], config, _out_dir(args))


def cmd_rearrange_check(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    return _run_suites(["rearrange"], config, _out_dir(args))


def cmd_theorem8(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    return _run_suites(["profile"], config, _out_dir(args))


def cmd_maximal_run(args) -> int:
    sp = make_space(args.m1, 0)
    model = mx.GridModel(sp=sp, v_half=args.v_half, s_half=args.s_half,
                         n_v=args.n_v, n_s=args.n_s)
    rng = np.random.default_rng(args.seed or 0)
    rows = []
    worst = 0.0
    for i in range(args.fields):
        f, _ = verification._random_ball_field(model, rng)
        rep = mx.pointwise_domination_check(f, [1.0, 2 ** 0.5, 2.0])
        worst = max(worst, rep.worst_ratio)
        rows.append({"field": i, "domination_ratio": rep.worst_ratio,
                     "flagged_cells": rep.flagged_cells,
                     "valid_cells": rep.valid_cells})
    out = _out_dir(args)
    write_csv(out / "maximal_run.csv", rows)
    print(f"maximal-run: worst domination ratio {worst:.6g} over {args.fields} fields")
    return 0


def cmd_weak_type(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    cfg = config["suites"]["maximal"]
    sp = make_space(1, 0)
    wide = mx.GridModel(sp=sp, v_half=float(cfg["wide_v_half"]), s_half=5.0,
                        n_v=int(cfg["wide_n_v"]), n_s=int(cfg["wide_n_s"]))
    mid = wide.n_s // 2
    rows = []
    for k in cfg["separation_ks"]:
        centers = []
        for i in range(int(k)):
            pos = (i - (k - 1) / 2) * 110.0
            j = int(np.argmin(np.abs(wide.v_axis - pos)))
            centers.append(make_point(sp, [wide.v_axis[j]], (), wide.s_axis[mid]))
        f = mx.indicator_field(wide, [mx.BallSpec(wide, c, 1.0) for c in centers])
        rows.extend(mx.weak_type_sweep([(str(k), f)],
                                       [1.0, 2 ** 0.5, 2.0, 2 ** 1.5, 4.0]))
    out = _out_dir(args)
    write_csv(out / "weak_type.csv", rows)
    base = rows[0]["ratio"]
    ok = all(base / 2 <= row["ratio"] <= 2 * base for row in rows)
    print(f"weak-type: ratios {[round(r['ratio'], 4) for r in rows]} "
          f"{'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def cmd_covering(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    if args.families:
        config["suites"]["covering"]["n_families"] = args.families
    return _run_suites(["covering"], config, _out_dir(args))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rank1ks",
        description="Verification experiments for rank-one symmetric space "
                    "convolution and maximal-operator bounds.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("--out", default="artifacts", help="output directory")
        p.add_argument("--config", default=None, help="JSON config overriding defaults")
        if seed:
            p.add_argument("--seed", type=int, default=None,
                           help="seed controlling all randomness (default 7)")

    p = sub.add_parser("space-info", help="print rho and the radial density table")
    p.add_argument("--m1", type=int, required=True)
    p.add_argument("--m2", type=int, default=0)
    p.add_argument("--t", default="0..5..0.25", help="radial grid a..b..step")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_space_info)

    p = sub.add_parser("kernel-table", help="kernel and comparator on a (t, s) grid")
    p.add_argument("--m1", type=int, required=True)
    p.add_argument("--m2", type=int, default=0)
    p.add_argument("--t", default="0..6..0.05")
    p.add_argument("--s", default="-3..3..0.05")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--out", default="artifacts")
    p.set_defaults(fn=cmd_kernel_table)

    p = sub.add_parser("abel", help="transform of a ball indicator over shifts")
    p.add_argument("--m1", type=int, required=True)
    p.add_argument("--m2", type=int, default=0)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--s", default=None, help="shift grid a..b..step")
    p.add_argument("--out", default="artifacts")
    p.set_defaults(fn=cmd_abel)

    p = sub.add_parser("lorentz-norm", help="Lorentz quasinorm of weighted samples")
    p.add_argument("--values", required=True, help="comma separated values")
    p.add_argument("--weights", default=None, help="comma separated weights")
    p.add_argument("--p", default="2")
    p.add_argument("--q", default="1", help="number or 'inf'")
    p.set_defaults(fn=cmd_lorentz_norm)

    p = sub.add_parser("rearrange-check", help="rearrangement verification suite")
    common(p)
    p.set_defaults(fn=cmd_rearrange_check)

    p = sub.add_parser("trilinear", help="one trilinear Monte Carlo evaluation")
    p.add_argument("--m1", type=int, default=2)
    p.add_argument("--m2", type=int, default=0)
    p.add_argument("--f-radius", type=float, default=1.0)
    p.add_argument("--g-radius", type=float, default=1.0)
    p.add_argument("--h-radius", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=1_000_000)
    common(p)
    p.set_defaults(fn=cmd_trilinear)

    p = sub.add_parser("chain-verify", help="inequality chain on random models")
    p.add_argument("--models", type=int, default=None)
    common(p)
    p.set_defaults(fn=cmd_chain_verify)

    p = sub.add_parser("theorem8", help="general-profile bound suite")
    common(p)
    p.set_defaults(fn=cmd_theorem8)

    p = sub.add_parser("maximal-run", help="maximal operators on random fields")
    p.add_argument("--m1", type=int, default=1)
    p.add_argument("--v-half", type=float, default=30.0)
    p.add_argument("--s-half", type=float, default=6.0)
    p.add_argument("--n-v", type=int, default=512)
    p.add_argument("--n-s", type=int, default=192)
    p.add_argument("--fields", type=int, default=5)
    common(p)
    p.set_defaults(fn=cmd_maximal_run)

    p = sub.add_parser("weak-type", help="separation family weak-norm sweep")
    common(p)
    p.set_defaults(fn=cmd_weak_type)

    p = sub.add_parser("covering", help="greedy covering selection suite")
    p.add_argument("--families", type=int, default=None)
    common(p)
    p.set_defaults(fn=cmd_covering)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", default="all",
                   help="'all' or comma separated suite names "
                        f"({', '.join(verification.SUITES)})")
    common(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("report", help="summarize a previous verify run")
    p.add_argument("--out", default="artifacts")
    p.set_defaults(fn=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
