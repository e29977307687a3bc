"""Command-line front end: generation, metrics, optimization, experiments.

Every stochastic subcommand takes ``--seed``; when omitted, a seed is drawn
once, printed, and embedded in the output so the run can be replayed
exactly.  Numeric output is deterministic given flags plus seed.  Exit
codes: 0 success, 1 runtime error (bad file, singular configuration),
2 usage error.
"""
from __future__ import annotations

import argparse
import json
import secrets
import sys

import numpy as np

from . import experiments as X
from . import kernels as K
from . import plots, reports
from .core import PointSet, PointSetFormatError, read_pointset, write_pointset
from .generators import (equal_area_partition, polytope,
                         randomized_equal_area, random_uniform, spiral)
from .harmonics import design_strength, harmonic_defect_profile
from .optimize import (Coulomb, DistanceSum, KernelEnergy, LogEnergy,
                       OptOptions, optimize)
from .quality import (FRANKE_MEAN, SobolevSpace, cap_l2_discrepancy,
                      cap_l2_discrepancy_direct, cap_linf_discrepancy_estimate,
                      franke, qmc_integrate, wce_harmonic, worst_case_error)


class UsageError(ValueError):
    pass


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    seed = secrets.randbits(32)
    print(f"seed: {seed}")
    return seed


def _kernel_spec(kernel: str, d: int, s: float | None, trunc: int | None = None):
    if kernel == "cf":
        if d != 2 or (s is not None and abs(s - 1.5) > 1e-12):
            raise UsageError("--kernel cf implies d=2 and s=1.5")
        spec = K.CuiFreeden()
    elif kernel == "gd":
        if s is None:
            raise UsageError("--kernel gd needs --s")
        spec = K.GeneralizedDistance(d, s)
    elif kernel == "canonical":
        if s is None:
            raise UsageError("--kernel canonical needs --s")
        spec = K.Canonical(d, s)
    else:
        raise UsageError(f"unknown kernel {kernel!r}")
    if trunc is not None:
        spec = K.Truncated(spec, trunc)
    return spec


def _emit(args, kind: str, rows: list, meta: dict | None = None) -> None:
    fmt = getattr(args, "format", "text")
    out = getattr(args, "output", None)
    if fmt == "json":
        text = reports.render_json(kind, rows, meta=meta)
    elif fmt == "csv":
        text = reports.render_csv(kind, rows)
    else:
        text = reports.render_text(kind, rows)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _parse_float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


# -- subcommands ------------------------------------------------------------

def cmd_gen(args) -> int:
    kind = args.kind
    if kind == "random":
        seed = _resolve_seed(args)
        ps = random_uniform(args.d, args.n, seed)
    elif kind == "spiral":
        ps = spiral(args.n)
    elif kind == "equal-area":
        ps = equal_area_partition(args.n).centers("median")
    elif kind == "randomized-equal-area":
        seed = _resolve_seed(args)
        ps = randomized_equal_area(args.n, seed)
    elif kind == "polytope":
        ps = polytope(args.polytope)
    else:
        raise UsageError(f"unknown generator kind {kind!r}")
    write_pointset(ps, args.output)
    print(f"wrote {ps.n} points (d={ps.dim}) to {args.output}")
    return 0


def cmd_wce(args) -> int:
    ps = read_pointset(args.input)
    spec = _kernel_spec(args.kernel, ps.dim, args.s)
    space = SobolevSpace(ps.dim, spec.s, spec)
    rep = worst_case_error(space, ps)
    row = rep.to_dict()
    meta = None
    if args.ell_max:
        har = wce_harmonic(space, ps, args.ell_max)
        meta = {"harmonic_partial": har.partial_sum,
                "harmonic_tail_bound": har.tail_bound,
                "harmonic_corrected": har.corrected,
                "ell_max": har.ell_max}
        print(f"harmonic cross-check (ell_max={args.ell_max}): "
              f"partial={har.partial_sum:.12e} "
              f"corrected={har.corrected:.12e} "
              f"tail_bound={har.tail_bound:.3e}", file=sys.stderr)
    _emit(args, "wce_report", [row], meta=meta)
    return 0


def cmd_disc(args) -> int:
    ps = read_pointset(args.input)
    if args.l2:
        print(f"cap_l2 {cap_l2_discrepancy(ps)!r}")
    elif args.l2_direct:
        seed = _resolve_seed(args)
        est = cap_l2_discrepancy_direct(ps, n_centers=args.centers,
                                        n_theta=args.theta_nodes, seed=seed)
        print(f"cap_l2_direct {est.discrepancy!r} "
              f"sq_estimate {est.sq_estimate!r} sq_stderr {est.sq_stderr!r}")
    else:
        seed = _resolve_seed(args)
        val = cap_linf_discrepancy_estimate(ps, n_extra_centers=args.extra_centers,
                                            seed=seed)
        print(f"cap_linf_lower_bound {val!r}")
    return 0


def cmd_design_check(args) -> int:
    ps = read_pointset(args.input)
    strength = design_strength(ps, args.t_max, args.tol)
    defects = harmonic_defect_profile(ps, args.t_max)
    print(f"strength {strength}")
    for ell, val in enumerate(defects, start=1):
        print(f"defect[{ell}] {val:.6e}")
    return 0


def cmd_opt(args) -> int:
    seed = _resolve_seed(args)
    d = args.d
    if args.objective == "distance":
        obj = DistanceSum(d, args.s if args.s is not None else (d + 1) / 2)
    elif args.objective == "coulomb":
        obj = Coulomb(d)
    elif args.objective == "log-energy":
        obj = LogEnergy(d)
    elif args.objective.startswith("kernel-"):
        spec = _kernel_spec(args.objective.removeprefix("kernel-"), d, args.s,
                            trunc=args.trunc)
        obj = KernelEnergy(spec)
    else:
        raise UsageError(f"unknown objective {args.objective!r}")
    opts = OptOptions(max_iter=args.max_iter, grad_tol=args.grad_tol,
                      restarts=args.restarts, seed=seed)
    result = optimize(obj, args.n, seed, opts)
    write_pointset(result.points, args.output)
    summary = {"objective": args.objective, "n": args.n, "d": d, "seed": seed,
               "objective_value": result.objective_value,
               "iterations": result.iterations, "grad_norm": result.grad_norm,
               "restarts_used": result.restarts_used}
    if args.result_json:
        with open(args.result_json, "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
    print(json.dumps(summary))
    return 0


def cmd_fit(args) -> int:
    import csv as _csv

    with open(args.input, encoding="utf-8") as fh:
        rows = list(_csv.DictReader(fh))
    if not rows:
        raise UsageError(f"{args.input}: empty table")
    try:
        pairs = [(float(r[args.n_col]), float(r[args.value_col])) for r in rows]
    except KeyError as exc:
        raise UsageError(f"{args.input}: missing column {exc}") from None
    fit = X.decay_fit(pairs, series=args.input)
    _emit(args, "fit", [{"family": args.series or args.input, "s": args.s,
                         "alpha": fit.alpha, "beta": fit.beta,
                         "residual": fit.residual}])
    if args.plot:
        ns = [p[0] for p in pairs]
        vals = [p[1] for p in pairs]
        plots.save_decay_figure(args.plot, {args.series or "data": (ns, vals)},
                                fits={args.series or "data": fit})
    return 0


def cmd_expect(args) -> int:
    seed = _resolve_seed(args)
    n_grid = _parse_int_list(args.n)
    rows = []
    fits = {}
    if args.model == "random":
        spec = _kernel_spec(args.kernel, args.d, args.s)
        space = SobolevSpace(args.d, spec.s, spec)
        reps = [X.random_baseline(space, n, args.trials, seed + 17 * i)
                for i, n in enumerate(n_grid)]
        rows = [{"kernel": r.kernel, "s": r.s, "n": r.n,
                 "predicted": r.predicted, "estimated": r.estimated,
                 "stderr": r.std_error, "z": r.z_score} for r in reps]
        if len(n_grid) >= 3:
            fits["random"] = X.decay_fit(
                [(r.n, r.estimated ** 0.5) for r in reps], series="random")
    else:
        if args.s is None:
            raise UsageError("--model equal-area needs --s")
        reps = [X.stratified_baseline(args.s, n, args.trials, seed + 17 * i)
                for i, n in enumerate(n_grid)]
        rows = [{"kernel": f"gd(s={args.s:g})", "s": args.s, "n": r.n,
                 "predicted": None, "estimated": r.estimated,
                 "stderr": r.std_error, "z": None} for r in reps]
        if len(n_grid) >= 3:
            fits["equal-area"] = X.decay_fit(
                [(r.n, r.rms) for r in reps], series="randomized-equal-area")
    _emit(args, "expectation", rows, meta={"seed": seed, "trials": args.trials})
    for name, fit in fits.items():
        print(f"fit[{name}]: alpha={fit.alpha:.6g} beta={fit.beta:.4f} "
              f"residual={fit.residual:.3g}", file=sys.stderr)
    if args.plot and fits:
        series = {name: ([r["n"] for r in rows],
                         [r["estimated"] ** 0.5 for r in rows])
                  for name in fits}
        plots.save_decay_figure(args.plot, series, fits=fits,
                                ylabel="rms worst-case error")
    return 0


def cmd_integrate(args) -> int:
    if args.function == "franke":
        f, exact = franke, FRANKE_MEAN
    else:
        c = args.const_value
        f, exact = (lambda pts: np.full(pts.shape[0], c)), c
    if args.study:
        seed = _resolve_seed(args)
        fams = X.standard_families(seed)
        unknown = [x for x in args.families.split(",") if x not in fams]
        if unknown:
            raise UsageError(f"unknown families: {unknown}")
        chosen = {name: fams[name] for name in args.families.split(",")}
        n_grid = _parse_int_list(args.n_grid)
        rows = X.franke_study(chosen, n_grid) if args.function == "franke" else [
            {"family": name, "n": n, "error": abs(qmc_integrate(f, build(n)) - exact)}
            for name, build in chosen.items() for n in n_grid]
        _emit(args, "franke", rows, meta={"seed": seed, "exact": exact})
        if args.plot:
            series = plots.rows_to_series(rows, "error")
            fits = {name: X.decay_fit([(n, e) for n, e in zip(*vals)], series=name)
                    for name, vals in series.items()
                    if len(vals[0]) >= 3 and min(vals[1]) > 0}
            plots.save_decay_figure(args.plot, series, fits=fits,
                                    ylabel="integration error")
        return 0
    if not args.input:
        raise UsageError("integrate needs a point-set file (or --study)")
    ps = read_pointset(args.input)
    value = qmc_integrate(f, ps)
    print(f"value {value!r}")
    print(f"exact {exact!r}")
    print(f"error {abs(value - exact)!r}")
    return 0


def cmd_sstar(args) -> int:
    seed = _resolve_seed(args)
    fams = X.standard_families(seed)
    names = args.families.split(",")
    unknown = [x for x in names if x not in fams]
    if unknown:
        raise UsageError(f"unknown families: {unknown}")
    chosen = {name: fams[name] for name in names}
    s_grid = _parse_float_list(args.s_grid)
    n_grid = _parse_int_list(args.n_grid)
    table = X.saturation_table(chosen, s_grid, n_grid)
    prefix = args.output_prefix
    if prefix:
        writer = reports.write_json if args.format == "json" else reports.write_csv
        ext = "json" if args.format == "json" else "csv"
        writer(f"{prefix}-wce.{ext}", "wce", table.wce_rows)
        writer(f"{prefix}-fit.{ext}", "fit", table.fit_rows)
        writer(f"{prefix}-sstar.{ext}", "sstar", table.star_rows)
        print(f"wrote {prefix}-{{wce,fit,sstar}}.{ext}")
    else:
        sys.stdout.write(reports.render_text("fit", table.fit_rows))
        sys.stdout.write(reports.render_text("sstar", table.star_rows))
    if args.plot:
        for s in s_grid:
            rows = [r for r in table.wce_rows if r["s"] == s]
            series = plots.rows_to_series(rows, "wce")
            fits = {r["family"]: X.FitReport(r["alpha"], r["beta"],
                                             min(n_grid), max(n_grid),
                                             r["residual"])
                    for r in table.fit_rows if r["s"] == s}
            out = args.plot.replace(".png", f"-s{s:g}.png") \
                if len(s_grid) > 1 else args.plot
            plots.save_decay_figure(out, series, fits=fits,
                                    title=f"worst-case error, s={s:g}",
                                    ylabel="worst-case error")
    return 0


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sphqmc", description=__doc__)
    p.add_argument("--threads", type=int, default=0,
                   help="cap BLAS threads (0 = library default)")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a point set")
    g.add_argument("--kind", required=True,
                   choices=["random", "spiral", "equal-area",
                            "randomized-equal-area", "polytope"])
    g.add_argument("--n", type=int, default=0)
    g.add_argument("--d", type=int, default=2)
    g.add_argument("--seed", type=int)
    g.add_argument("--polytope", default="octahedron",
                   choices=["tetrahedron", "octahedron", "cube", "icosahedron"])
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_gen)

    w = sub.add_parser("wce", help="worst-case integration error of a point set")
    w.add_argument("input")
    w.add_argument("--kernel", required=True, choices=["cf", "gd", "canonical"])
    w.add_argument("--s", type=float)
    w.add_argument("--ell-max", type=int, default=0,
                   help="also run the harmonic-route cross-check to this degree")
    w.add_argument("--format", choices=["text", "csv", "json"], default="text")
    w.add_argument("-o", "--output")
    w.set_defaults(func=cmd_wce)

    di = sub.add_parser("disc", help="spherical cap discrepancies")
    di.add_argument("input")
    mode = di.add_mutually_exclusive_group(required=True)
    mode.add_argument("--l2", action="store_true")
    mode.add_argument("--l2-direct", action="store_true")
    mode.add_argument("--linf-est", action="store_true")
    di.add_argument("--centers", type=int, default=100_000)
    di.add_argument("--theta-nodes", type=int, default=64)
    di.add_argument("--extra-centers", type=int, default=0)
    di.add_argument("--seed", type=int)
    di.set_defaults(func=cmd_disc)

    dc = sub.add_parser("design-check", help="largest exact polynomial degree")
    dc.add_argument("input")
    dc.add_argument("--t-max", type=int, required=True)
    dc.add_argument("--tol", type=float, default=None)
    dc.set_defaults(func=cmd_design_check)

    o = sub.add_parser("opt", help="optimize a pair energy")
    o.add_argument("--objective", required=True,
                   choices=["distance", "coulomb", "log-energy",
                            "kernel-cf", "kernel-gd", "kernel-canonical"])
    o.add_argument("--n", type=int, required=True)
    o.add_argument("--d", type=int, default=2)
    o.add_argument("--s", type=float)
    o.add_argument("--trunc", type=int,
                   help="truncation degree (needed for kernel-canonical)")
    o.add_argument("--restarts", type=int, default=8)
    o.add_argument("--max-iter", type=int, default=500)
    o.add_argument("--grad-tol", type=float, default=1e-6)
    o.add_argument("--seed", type=int)
    o.add_argument("-o", "--output", required=True)
    o.add_argument("--result-json")
    o.set_defaults(func=cmd_opt)

    f = sub.add_parser("fit", help="power-law fit of an (n, value) table")
    f.add_argument("input")
    f.add_argument("--n-col", default="n")
    f.add_argument("--value-col", default="value")
    f.add_argument("--series")
    f.add_argument("--s", type=float, default=None)
    f.add_argument("--format", choices=["text", "csv", "json"], default="text")
    f.add_argument("-o", "--output")
    f.add_argument("--plot")
    f.set_defaults(func=cmd_fit)

    e = sub.add_parser("expect", help="expected squared error baselines")
    e.add_argument("--model", required=True, choices=["random", "equal-area"])
    e.add_argument("--kernel", default="cf", choices=["cf", "gd", "canonical"])
    e.add_argument("--s", type=float)
    e.add_argument("--d", type=int, default=2)
    e.add_argument("--n", required=True,
                   help="point count, or a comma list for a decay study")
    e.add_argument("--trials", type=int, default=100)
    e.add_argument("--seed", type=int)
    e.add_argument("--format", choices=["text", "csv", "json"], default="text")
    e.add_argument("-o", "--output")
    e.add_argument("--plot")
    e.set_defaults(func=cmd_expect)

    i = sub.add_parser("integrate", help="equal-weight integration of a test function")
    i.add_argument("input", nargs="?")
    i.add_argument("--function", required=True, choices=["franke", "const"])
    i.add_argument("--const-value", type=float, default=1.0)
    i.add_argument("--study", action="store_true",
                   help="run over families and an n grid instead of one file")
    i.add_argument("--families", default="random,spiral,equal-area")
    i.add_argument("--n-grid", default="16,64,256,1024,4096")
    i.add_argument("--seed", type=int)
    i.add_argument("--format", choices=["text", "csv", "json"], default="text")
    i.add_argument("-o", "--output")
    i.add_argument("--plot")
    i.set_defaults(func=cmd_integrate)

    s = sub.add_parser("sstar", help="saturation-smoothness table")
    s.add_argument("--families", default="spiral,equal-area,distance,random")
    s.add_argument("--s-grid", default="1.25,1.5,2,2.5,3,3.5,4,4.5")
    s.add_argument("--n-grid", default="16,36,100,256,576,1024")
    s.add_argument("--seed", type=int)
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    s.add_argument("--output-prefix")
    s.add_argument("--plot")
    s.set_defaults(func=cmd_sstar)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "threads", None):
            # results do not depend on the thread count; this only caps the
            # BLAS pools behind the matrix products
            from threadpoolctl import threadpool_limits
            with threadpool_limits(limits=args.threads):
                return args.func(args)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (PointSetFormatError, OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
