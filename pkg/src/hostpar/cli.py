"""Command-line interface.

Single-point analysis, curve emission, orbit/attractor export, parameter
scans, rasters, and bundled figure datasets. All outputs are deterministic
for fixed flags; exit codes are 0 on success, 2 on domain/contract errors,
3 on numeric failures.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__, boundaries, dynamics, equilibria, io, stability, sweep
from ._accel import backend_name
from .errors import ContractError, DomainError, NumericError
from .models import ModelSpec, State

FIGURE_IDS = ("3a", "3b", "3c", "3d", "4", "5", "6", "7", "8", "9", "10", "11")


def _spec_from_args(args) -> ModelSpec:
    if (args.r is None) == (args.R0 is None):
        raise DomainError("give exactly one of --r or --R0")
    return ModelSpec.from_index(args.model, b=args.b, r=args.r, R0=args.R0)


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _spec_doc(spec: ModelSpec) -> dict:
    return {"model": spec.index, "growth": spec.growth.name.lower(),
            "parasitism": spec.parasitism.name.lower(),
            "r": spec.r, "R0": spec.R0, "b": spec.b,
            "degenerate": spec.degenerate}


def _classification_doc(cls) -> dict:
    doc = {
        "state": {"x": cls.record.state.x, "y": cls.record.state.y},
        "kind": cls.record.kind,
        "provenance": cls.record.provenance,
        "residual": cls.record.residual,
        "degenerate": cls.record.degenerate,
        "tangent": cls.record.tangent,
        "verdict": cls.verdict,
        "eigenvalues": list(cls.eigenvalues),
        "moduli": list(cls.moduli),
    }
    if cls.jury is not None:
        doc["jury"] = {"tau": cls.jury.tau, "delta": cls.jury.delta,
                       "j1": cls.jury.j1, "j2": cls.jury.j2, "j3": cls.jury.j3,
                       "verdict": cls.jury.verdict,
                       "failing": list(cls.jury.failing),
                       "marginal": list(cls.jury.marginal)}
    if cls.hint is not None:
        doc["bifurcation_hint"] = {"kind": cls.hint.kind,
                                   "residual": cls.hint.residual,
                                   "eigenvalues": list(cls.hint.eigenvalues)}
    return doc


def _all_equilibria(spec: ModelSpec):
    records = list(equilibria.boundary_equilibria(spec))
    records.extend(equilibria.coexistence(spec))
    return records


def cmd_analyze(args) -> int:
    spec = _spec_from_args(args)
    records = _all_equilibria(spec)
    classes = [stability.classify_equilibrium(spec, rec) for rec in records]
    verdict = boundaries.region_verdict(spec)
    doc = {
        "spec": _spec_doc(spec),
        "equilibria": [_classification_doc(c) for c in classes],
        "region": {
            "stable": verdict.stable,
            "failing_conditions": list(verdict.failing_conditions),
            "n_coexistence": verdict.n_coexistence,
            "stable_equilibrium_index": verdict.stable_equilibrium_index,
            "degenerate": verdict.degenerate,
        },
    }
    _emit(args, io.json_text(doc, schema="analyze"))
    return 0


def cmd_equilibria(args) -> int:
    spec = _spec_from_args(args)
    records = _all_equilibria(spec)
    if args.format == "csv":
        rows = [(rec.kind.value, rec.state.x, rec.state.y, rec.residual,
                 rec.provenance.value, rec.tangent) for rec in records]
        _emit(args, io.csv_text(
            ("kind", "x", "y", "residual", "provenance", "tangent"), rows))
    else:
        doc = {"spec": _spec_doc(spec), "equilibria": [
            {"kind": rec.kind, "x": rec.state.x, "y": rec.state.y,
             "residual": rec.residual, "provenance": rec.provenance,
             "degenerate": rec.degenerate, "tangent": rec.tangent}
            for rec in records]}
        _emit(args, io.json_text(doc, schema="equilibria"))
    return 0


def cmd_jury(args) -> int:
    spec = _spec_from_args(args)
    records = equilibria.coexistence(spec)
    docs = []
    for rec in records:
        rep = stability.jury_report(spec, rec)
        docs.append({"x": rec.state.x, "y": rec.state.y, "tau": rep.tau,
                     "delta": rep.delta, "j1": rep.j1, "j2": rep.j2,
                     "j3": rep.j3, "verdict": rep.verdict,
                     "failing": list(rep.failing),
                     "marginal": list(rep.marginal)})
    _emit(args, io.json_text({"spec": _spec_doc(spec), "reports": docs},
                             schema="jury"))
    return 0


def cmd_boundary(args) -> int:
    rng = None
    if args.lo is not None or args.hi is not None:
        if args.lo is None or args.hi is None:
            raise DomainError("give both --lo and --hi or neither")
        rng = (args.lo, args.hi)
    curve = boundaries.curve(args.model, args.jury, rng, args.n)
    _emit(args, io.curve_csv_text(curve))
    return 0


def cmd_simulate(args) -> int:
    spec = _spec_from_args(args)
    orb = dynamics.simulate(spec, State(args.x0, args.y0),
                            transient=args.transient, n=args.steps)
    if args.format == "json":
        doc = {"spec": _spec_doc(spec),
               "initial": {"x": args.x0, "y": args.y0},
               "transient": args.transient,
               "flags": orb.flags,
               "samples": orb.samples}
        _emit(args, io.json_text(doc, schema="orbit"))
    else:
        _emit(args, io.orbit_csv_text(orb.samples, t0=args.transient + 1))
    return 0


def cmd_classify(args) -> int:
    spec = _spec_from_args(args)
    rep = dynamics.classify_attractor(spec, State(args.x0, args.y0),
                                      budget=args.budget)
    doc = {"spec": _spec_doc(spec),
           "initial": {"x": args.x0, "y": args.y0},
           "class": rep.kind,
           "lyapunov_max": rep.lyapunov_max,
           "period": rep.period,
           "modulation_period": rep.modulation_period,
           "diameter": rep.diameter,
           "center": list(rep.center),
           "final": {"x": rep.final.x, "y": rep.final.y},
           "flags": rep.flags,
           "thresholds": rep.thresholds}
    _emit(args, io.json_text(doc, schema="attractor"))
    return 0


def cmd_cycle(args) -> int:
    spec = _spec_from_args(args)
    po = dynamics.refine_cycle(spec, [(args.x0, args.y0)], args.period)
    doc = {"spec": _spec_doc(spec), "period": po.period,
           "points": po.points, "multipliers": list(po.multipliers),
           "moduli": [abs(m) for m in po.multipliers],
           "stability": po.stability, "residual": po.residual}
    _emit(args, io.json_text(doc, schema="cycle"))
    return 0


def cmd_lyapunov(args) -> int:
    spec = _spec_from_args(args)
    est = dynamics.lyapunov_max(spec, State(args.x0, args.y0),
                                transient=args.transient, n=args.steps)
    doc = {"spec": _spec_doc(spec), "lyapunov_max": est.value,
           "transient": args.transient, "n": args.steps, "flags": est.flags}
    _emit(args, io.json_text(doc, schema="lyapunov"))
    return 0


def cmd_basin(args) -> int:
    spec = _spec_from_args(args)
    grid = dynamics.BasinGrid(x_range=(args.x_lo, args.x_hi),
                              y_range=(args.y_lo, args.y_hi),
                              nx=args.nx, ny=args.ny)
    # attractor menu: classify the fixed fan of starts, dedupe by class+center
    menu = []
    for s in sweep.DEFAULT_INITIALS:
        rep = dynamics.classify_attractor(spec, State(*s), budget=args.budget)
        if any(rep.kind is m.kind
               and abs(rep.center[0] - m.center[0]) < 0.05
               and abs(rep.center[1] - m.center[1]) < 0.05 for m in menu):
            continue
        menu.append(rep)
    labels = dynamics.basin_sample(spec, grid, menu, budget=args.budget)
    xs = np.linspace(args.x_lo, args.x_hi, args.nx)
    ys = np.linspace(args.y_lo, args.y_hi, args.ny)
    rows = []
    for iy in range(args.ny):
        for ix in range(args.nx):
            rows.append((xs[ix], ys[iy], int(labels[iy, ix])))
    legend = [{"index": i, "class": m.kind, "center": list(m.center)}
              for i, m in enumerate(menu)]
    if args.format == "json":
        _emit(args, io.json_text({"spec": _spec_doc(spec), "legend": legend,
                                  "labels": labels}, schema="basin"))
    else:
        _emit(args, io.csv_text(("x", "y", "attractor"), rows))
        sys.stderr.write(io.json_text({"legend": legend}, schema="basin-legend"))
    return 0


def cmd_scan(args) -> int:
    config = sweep.SweepConfig(
        model=args.model, param=args.param, start=args.start, stop=args.stop,
        count=args.count, fixed_r=args.r, fixed_b=args.b,
        policy=args.policy, transient=args.transient, tail=args.tail,
        initials=tuple((s, t) for s, t in
                       zip(args.init[::2], args.init[1::2])) if args.init
        else ((0.5, 0.3),),
    )
    result = sweep.bifurcation_scan(config, workers=args.threads)
    if args.coord in ("x", "y"):
        _emit(args, result.to_plot_csv_text(args.coord))
    else:
        _emit(args, result.to_csv_text())
    return 0


def cmd_region(args) -> int:
    raster = sweep.region_scan(args.model, (args.g_lo, args.g_hi),
                               (args.b_lo, args.b_hi), (args.nx, args.ny),
                               workers=args.threads, refine=not args.no_refine)
    _emit(args, raster.to_csv_text())
    return 0


# ---------------------------------------------------------------------------
# bundled figure datasets
# ---------------------------------------------------------------------------

CLOUD_ITERATIONS = 100_000   # orbit clouds: total iterations ...
CLOUD_POINTS = 30_000        # ... with this many retained


def _orbit_cloud(spec, init, outdir, name):
    orb = dynamics.simulate(spec, init,
                            transient=CLOUD_ITERATIONS - CLOUD_POINTS,
                            n=CLOUD_POINTS)
    path = outdir / name
    path.write_text(io.orbit_csv_text(
        orb.samples, t0=CLOUD_ITERATIONS - CLOUD_POINTS + 1), encoding="utf-8")
    return path


def _figure_region(model, outdir, tag):
    growth = (1.0, 10.0) if model in (1, 3) else (0.0, 4.0)
    brange = (0.05, 10.0) if model in (1, 3) else (0.05, 4.0)
    raster = sweep.region_scan(model, growth, brange, (128, 128))
    files = [outdir / f"fig{tag}_region_model{model}.csv"]
    files[0].write_text(raster.to_csv_text(), encoding="utf-8")
    for jury in (1, 2, 3):
        try:
            curve = boundaries.curve(model, jury)
        except DomainError:
            continue
        p = outdir / f"fig{tag}_curve_model{model}_jury{jury}.csv"
        p.write_text(io.curve_csv_text(curve), encoding="utf-8")
        files.append(p)
    # the closing b = 1 and r = 0 (R0 = 1) lines
    for line, name in zip(boundaries.boundary_lines(model, growth[1], brange[1]),
                          ("b1", "r0")):
        p = outdir / f"fig{tag}_line_model{model}_{name}.csv"
        p.write_text(io.curve_csv_text(line), encoding="utf-8")
        files.append(p)
    return files


def _cycle_branch_rows(b, r_values, seed_pt, rows):
    """Continue a 2-cycle of the overcompensatory/fractional model along r,
    appending (r, x, y, stability) rows; stops when the cycle leaves the
    first quadrant, merges with the equilibrium, or Newton fails."""
    seed = tuple(seed_pt)
    for r in r_values:
        spec = ModelSpec.from_index(2, b=b, r=float(r))
        try:
            po = dynamics.refine_cycle(spec, [seed], 2)
        except NumericError:
            break
        if np.min(po.points) < -1e-9 or np.max(po.points[:, 1]) < 1e-9:
            break  # left the interior (axis cycles have their own branch)
        rec = equilibria.coexistence_closed_form(spec)
        if rec is not None:
            amp = float(np.hypot(po.points[:, 0] - rec.state.x,
                                 po.points[:, 1] - rec.state.y).max())
            if amp < 1e-7:
                break
        seed = (float(po.points[0, 0]), float(po.points[0, 1]))
        for q in po.points:
            rows.append((float(r), float(q[0]), float(q[1]),
                         po.stability.value))


def _figure_4(outdir):
    files = []
    r_grid = np.linspace(1.6, 3.2, 321)
    for b in (1.1, 1.3, 1.5):
        for direction in ("up", "down"):
            start, stop = (1.6, 3.2) if direction == "up" else (3.2, 1.6)
            config = sweep.SweepConfig(model=2, param="r", start=start,
                                       stop=stop, count=321, fixed_b=b,
                                       policy="inherit", transient=4000,
                                       tail=128, record=("tail",))
            result = sweep.bifurcation_scan(config)
            p = outdir / f"fig4_b{b}_{direction}.csv"
            p.write_text(result.to_csv_text(), encoding="utf-8")
            files.append(p)
        # branch diagram: equilibrium, interior 2-cycles, axis 2-cycle
        eq_rows = []
        for r in r_grid:
            spec = ModelSpec.from_index(2, b=b, r=float(r))
            rec = equilibria.coexistence_closed_form(spec)
            if rec is None:
                continue
            rep = stability.jury_report(spec, rec)
            eq_rows.append((float(r), rec.state.x, rec.state.y,
                            rep.verdict.value))
        p = outdir / f"fig4_b{b}_equilibrium_branch.csv"
        p.write_text(io.csv_text(("r", "x", "y", "stability"), eq_rows),
                     encoding="utf-8")
        files.append(p)

        # seed interior 2-cycles on both sides of the flip: the pair below
        # it when subcritical, the newborn stable cycle above it when
        # supercritical (it collides with the axis cycle not far above)
        r_star, _, _ = boundaries.curve_point_at(2, 2, b=b)
        seeds = []
        for r_probe in (r_star - 5e-4, r_star + 5e-4, r_star + 0.02):
            spec_probe = ModelSpec.from_index(2, b=b, r=r_probe)
            rec_probe = equilibria.coexistence_closed_form(spec_probe)
            for po in dynamics.flip_cycles_near(spec_probe, rec_probe):
                if np.all(po.points[:, 1] > 1e-6):
                    seeds.append((r_probe, tuple(po.points[0])))
        # refine the grid near the flip: the subcritical unstable window is
        # narrower than the base grid spacing
        r_all = np.unique(np.concatenate(
            [r_grid, np.linspace(r_star - 0.006, r_star + 0.006, 49)]))
        cyc_rows = []
        for r_seed, pt in seeds:
            _cycle_branch_rows(b, r_all[r_all >= r_seed], pt, cyc_rows)
            _cycle_branch_rows(b, r_all[r_all <= r_seed][::-1], pt, cyc_rows)
        cyc_rows = sorted(set(cyc_rows))
        p = outdir / f"fig4_b{b}_cycle_branches.csv"
        p.write_text(io.csv_text(("r", "x", "y", "stability"), cyc_rows),
                     encoding="utf-8")
        files.append(p)

        axis_rows = []
        seed = (1.7, 0.0)
        for r in r_grid[r_grid > 2.001]:
            spec = ModelSpec.from_index(2, b=b, r=float(r))
            try:
                po = dynamics.refine_cycle(spec, [seed], 2)
            except NumericError:
                continue
            seed = (float(po.points[0, 0]), 0.0)
            for q in po.points:
                axis_rows.append((float(r), float(q[0]), 0.0,
                                  po.stability.value))
        p = outdir / f"fig4_b{b}_axis_cycle_branch.csv"
        p.write_text(io.csv_text(("r", "x", "y", "stability"), axis_rows),
                     encoding="utf-8")
        files.append(p)
    return files


def _figure_5(outdir):
    files = []
    for b in (3.0, 3.5, 4.0, 4.41, 5.0, 5.5, 6.0, 6.5, 7.0):
        spec = ModelSpec.from_index(3, b=b, R0=2.0)
        files.append(_orbit_cloud(spec, State(0.5, 0.3), outdir,
                                  f"fig5_b{b}.csv"))
    return files


def _figure_6(outdir):
    config = sweep.SweepConfig(model=3, param="b", start=2.0, stop=8.5,
                               count=651, fixed_r=float(np.log(2.0)),
                               policy="inherit", transient=4000, tail=200,
                               record=("tail",))
    result = sweep.bifurcation_scan(config)
    p = outdir / "fig6_model3_R0_2.csv"
    p.write_text(result.to_csv_text(), encoding="utf-8")
    return [p]


def _figure_7(outdir):
    files = []
    for r, starts in ((2.92, ((0.8, 0.7), (0.3, 0.4))),
                      (2.9205, ((0.8, 0.7), (0.3, 0.4)))):
        spec = ModelSpec.from_index(2, b=1.9, r=r)
        for s in starts:
            files.append(_orbit_cloud(spec, State(*s), outdir,
                                      f"fig7_r{r}_from_{s[0]}_{s[1]}.csv"))
        rec = equilibria.coexistence_closed_form(spec)
        meta = outdir / f"fig7_r{r}_equilibrium.json"
        meta.write_text(io.json_text(
            {"r": r, "b": 1.9, "equilibrium": {"x": rec.state.x, "y": rec.state.y}},
            schema="figure7"), encoding="utf-8")
        files.append(meta)
    return files


def _figure_8(outdir):
    from ._kernels import growth

    files = []
    r = 2.5
    for b in (0.959, 0.96, 0.9615, 0.98, 1.05, 1.6):
        spec = ModelSpec.from_index(4, b=b, r=r)
        host = equilibria.nullcline_samples(
            spec, equilibria.NullclineKind.HOST, (0.0, 1.0), 256)
        # parasitoid nullcline exists where b x g(x) >= 1; find that window
        xs = np.linspace(1e-3, 1.3, 1024)
        ok = b * xs * np.array([growth(1, r, float(x)) for x in xs]) >= 1.0
        para_pts = np.empty((0, 2))
        if ok.any():
            x_lo = float(xs[ok][0])
            x_hi = float(xs[ok][-1])
            para_pts = equilibria.nullcline_samples(
                spec, equilibria.NullclineKind.PARASITOID,
                (x_lo, x_hi), 256).points
        base = outdir / f"fig8_b{b}"
        hpath = Path(str(base) + "_host_nullcline.csv")
        hpath.write_text(io.csv_text(("x", "y"), host.points), encoding="utf-8")
        ppath = Path(str(base) + "_parasitoid_nullcline.csv")
        ppath.write_text(io.csv_text(("x", "y"), para_pts), encoding="utf-8")
        records = equilibria.coexistence_numeric(spec)
        classes = [stability.classify_equilibrium(spec, rec) for rec in records]
        jpath = Path(str(base) + "_equilibria.json")
        jpath.write_text(io.json_text(
            {"r": r, "b": b,
             "equilibria": [_classification_doc(c) for c in classes]},
            schema="figure8"), encoding="utf-8")
        files.extend([hpath, ppath, jpath])
        spec_orbit = dynamics.simulate(spec, State(0.5, 0.3),
                                       transient=20_000, n=2_000)
        opath = Path(str(base) + "_attractor.csv")
        opath.write_text(io.orbit_csv_text(spec_orbit.samples, t0=20_001),
                         encoding="utf-8")
        files.append(opath)
    return files


def _figure_9(outdir):
    config = sweep.SweepConfig(model=4, param="b", start=0.94, stop=1.7,
                               count=381, fixed_r=2.5, policy="inherit",
                               transient=4000, tail=200,
                               record=("tail", "equilibria"))
    result = sweep.bifurcation_scan(config)
    p = outdir / "fig9_model4_r2.5.csv"
    p.write_text(result.to_csv_text(), encoding="utf-8")
    eq_rows = []
    for pt in result.points:
        spec = config.spec_at(pt.value)
        for rec in equilibria.coexistence_numeric(spec):
            rep = stability.jury_report(spec, rec)
            eq_rows.append((pt.value, rec.state.x, rec.state.y,
                            rep.verdict.value, rec.tangent))
    p2 = outdir / "fig9_equilibria_branches.csv"
    p2.write_text(io.csv_text(("b", "x", "y", "verdict", "tangent"), eq_rows),
                  encoding="utf-8")
    return [p, p2]


def _figure_10(outdir):
    # equilibrium branches plus the unstable 2-cycle continued in b
    r = 2.5
    bs = np.linspace(0.9555, 1.0, 90)
    rows = []
    cycle_rows = []
    seed = None
    for b in bs:
        spec = ModelSpec.from_index(4, b=float(b), r=r)
        records = equilibria.coexistence_numeric(spec)
        for rec in records:
            rep = stability.jury_report(spec, rec)
            rows.append((float(b), rec.state.x, rec.state.y,
                         rep.verdict.value, rec.tangent))
        if records and not records[-1].tangent:
            upper = records[-1]
            if seed is None:
                pairs = dynamics.flip_cycles_near(spec, upper)
                unstable = [po for po in pairs
                            if po.stability is stability.StabilityVerdict.UNSTABLE]
                if unstable:
                    seed = unstable[0].points[0]
            else:
                try:
                    po = dynamics.refine_cycle(spec, [seed], 2)
                    amp = float(np.hypot(po.points[:, 0] - upper.state.x,
                                         po.points[:, 1] - upper.state.y).max())
                    if amp > 1e-7:
                        seed = po.points[0]
                        for q in po.points:
                            cycle_rows.append((float(b), q[0], q[1]))
                    else:
                        seed = None
                except NumericError:
                    seed = None
    p = outdir / "fig10_equilibria_branches.csv"
    p.write_text(io.csv_text(("b", "x", "y", "verdict", "tangent"), rows),
                 encoding="utf-8")
    p2 = outdir / "fig10_unstable_2cycle.csv"
    p2.write_text(io.csv_text(("b", "x", "y"), cycle_rows), encoding="utf-8")
    return [p, p2]


def _figure_11(outdir):
    spec = ModelSpec.from_index(4, b=2.2, r=2.3)
    return [_orbit_cloud(spec, State(0.5, 0.5), outdir, "fig11_attractor.csv")]


def cmd_reproduce_figure(args) -> int:
    if args.id not in FIGURE_IDS:
        raise DomainError(
            f"unknown figure id {args.id!r}; expected one of {FIGURE_IDS}")
    outdir = Path(args.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    if args.id in ("3a", "3b", "3c", "3d"):
        model = {"3a": 1, "3b": 2, "3c": 3, "3d": 4}[args.id]
        files = _figure_region(model, outdir, args.id)
    else:
        files = {"4": _figure_4, "5": _figure_5, "6": _figure_6,
                 "7": _figure_7, "8": _figure_8, "9": _figure_9,
                 "10": _figure_10, "11": _figure_11}[args.id](outdir)
    for f in files:
        sys.stdout.write(f"{f}\n")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_spec_args(p, need_b=True):
    p.add_argument("--model", type=int, required=True, choices=(1, 2, 3, 4),
                   help="1: fractional/fractional, 2: exponential/fractional, "
                        "3: fractional/exponential, 4: exponential/exponential")
    p.add_argument("--r", type=float, default=None,
                   help="intrinsic growth rate, r >= 0")
    p.add_argument("--R0", type=float, default=None,
                   help="net reproductive rate, R0 = exp(r) >= 1")
    if need_b:
        p.add_argument("--b", type=float, required=True,
                       help="composite parameter a*c*K > 0")


def _add_common(p):
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int, default=0,
                   help="recorded in provenance; all computations here are "
                        "deterministic")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hostpar",
        description="Discrete-time host-parasitoid maps: equilibria, Jury "
                    "stability, bifurcation boundaries, orbits, basins. "
                    f"Numeric backend: {backend_name()}.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="equilibria + Jury + region verdict")
    _add_spec_args(p)
    _add_common(p)
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("equilibria", help="all equilibria with residuals")
    _add_spec_args(p)
    _add_common(p)
    p.set_defaults(fn=cmd_equilibria)

    p = sub.add_parser("jury", help="Jury reports at coexistence equilibria")
    _add_spec_args(p)
    _add_common(p)
    p.set_defaults(fn=cmd_jury)

    p = sub.add_parser("boundary", help="analytic stability-boundary curve (CSV)")
    p.add_argument("--model", type=int, required=True, choices=(2, 3, 4))
    p.add_argument("--jury", type=int, required=True, choices=(1, 2, 3))
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--lo", type=float, default=None,
                   help="internal-variable range start (u for model 2, else y)")
    p.add_argument("--hi", type=float, default=None)
    _add_common(p)
    p.set_defaults(fn=cmd_boundary)

    p = sub.add_parser("simulate", help="orbit export")
    _add_spec_args(p)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--y0", type=float, required=True)
    p.add_argument("--transient", type=int, default=10_000)
    p.add_argument("--steps", type=int, default=10_000)
    _add_common(p)
    p.set_defaults(fn=cmd_simulate, format="csv")

    p = sub.add_parser("classify", help="attractor classification")
    _add_spec_args(p)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--y0", type=float, required=True)
    p.add_argument("--budget", type=int, default=100_000)
    _add_common(p)
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("cycle", help="Newton-refine an n-cycle from a seed")
    _add_spec_args(p)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--y0", type=float, required=True)
    p.add_argument("--period", type=int, required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_cycle)

    p = sub.add_parser("lyapunov", help="largest Lyapunov exponent")
    _add_spec_args(p)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--y0", type=float, required=True)
    p.add_argument("--transient", type=int, default=10_000)
    p.add_argument("--steps", type=int, default=100_000)
    _add_common(p)
    p.set_defaults(fn=cmd_lyapunov)

    p = sub.add_parser("basin", help="basin-of-attraction grid")
    _add_spec_args(p)
    p.add_argument("--x-lo", type=float, default=0.0)
    p.add_argument("--x-hi", type=float, default=1.5)
    p.add_argument("--y-lo", type=float, default=0.0)
    p.add_argument("--y-hi", type=float, default=3.0)
    p.add_argument("--nx", type=int, default=256)
    p.add_argument("--ny", type=int, default=256)
    p.add_argument("--budget", type=int, default=4096)
    _add_common(p)
    p.set_defaults(fn=cmd_basin, format="csv")

    p = sub.add_parser("scan", help="1-D bifurcation scan")
    p.add_argument("--model", type=int, required=True, choices=(1, 2, 3, 4))
    p.add_argument("--param", required=True, choices=("b", "r", "R0"))
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--r", type=float, default=None, help="fixed r")
    p.add_argument("--b", type=float, default=None, help="fixed b")
    p.add_argument("--policy", choices=("inherit", "reset"), default="inherit")
    p.add_argument("--transient", type=int, default=2000)
    p.add_argument("--tail", type=int, default=256)
    p.add_argument("--coord", choices=("x", "y", "both"), default="both",
                   help="'x'/'y' emits the plot schema param,x_or_y,class")
    p.add_argument("--init", type=float, nargs="*", default=None,
                   help="initial states as x1 y1 x2 y2 ...")
    _add_common(p)
    p.set_defaults(fn=cmd_scan, format="csv")

    p = sub.add_parser("region", help="2-D stability raster")
    p.add_argument("--model", type=int, required=True, choices=(1, 2, 3, 4))
    p.add_argument("--g-lo", type=float, required=True,
                   help="growth-parameter range start (R0 for models 1/3, r else)")
    p.add_argument("--g-hi", type=float, required=True)
    p.add_argument("--b-lo", type=float, required=True)
    p.add_argument("--b-hi", type=float, required=True)
    p.add_argument("--nx", type=int, default=128)
    p.add_argument("--ny", type=int, default=128)
    p.add_argument("--no-refine", action="store_true")
    _add_common(p)
    p.set_defaults(fn=cmd_region, format="csv")

    p = sub.add_parser("reproduce-figure",
                       help="write the bundled benchmark figure datasets")
    p.add_argument("id", choices=FIGURE_IDS)
    _add_common(p)
    p.set_defaults(fn=cmd_reproduce_figure)

    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (DomainError, ContractError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except NumericError as exc:
        sys.stderr.write(f"numeric failure: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
