"""Command-line entry point: ``gcmodel <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 validation error, 3 numerical
failure. Failures also print one JSON object on standard error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import warnings

import numpy as np

from . import analytic, numeric
from .calib import (Experiment, FitSettings, conversion_factor, estimate_baseline, fit_all)
from .compare import compare_solvers, time_window
from .config import ConfigError, RunConfig, load_config, load_experimental_csv
from .flow import FlowField
from .quadrature import QuadratureError
from .scales import DomainError, molar_to_ppb, nondimensionalize, ppb_to_molar

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _header(cfg: RunConfig, unit: str, regime: str, solver: str, extra: str = "") -> str:
    lines = [f"# gcmodel {cfg.name or 'run'}",
             f"# unit={unit} regime={regime} solver={solver} config_sha256={cfg.digest}"]
    if extra:
        lines.append(f"# {extra}")
    return "\n".join(lines) + "\n"


def _write_table(path, header, columns, data):
    with open(path, "w", newline="\n") as fh:
        fh.write(header)
        fh.write(",".join(columns) + "\n")
        np.savetxt(fh, data, delimiter=",", fmt="%.10e")


def _groups(cfg: RunConfig):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return nondimensionalize(cfg.geometry, cfg.conditions, cfg.analytes, cfg.reference)


def _flow(cfg, g, regime):
    return FlowField(g.pL_hat, g.L_hat) if regime == "variable" else FlowField.uniform(g.L_hat)


def _t_end_seconds(cfg, g, flow):
    if cfg.grid.t_end is not None:
        return cfg.grid.t_end
    return max(time_window(p, flow.outlet_omega) for p in g.analytes()) * g.time_scale


def cmd_simulate(args, cfg: RunConfig) -> int:
    regime = args.regime or cfg.regime
    solver = args.solver or cfg.solver
    if solver == "both":
        solver = "analytic"
    g = _groups(cfg)
    flow = _flow(cfg, g, regime)
    t_sec = np.linspace(0.0, _t_end_seconds(cfg, g, flow), cfg.grid.points)
    t_hat = t_sec / g.time_scale
    times = cfg.grid.snapshot_times if args.times is None else args.times
    snap_hat = [t / g.time_scale for t in times]
    out = args.out or cfg.output_dir
    os.makedirs(out, exist_ok=True)

    if solver == "analytic":
        chrom = analytic.chromatogram(g.analytes(), flow, t_hat, regime, g.names, cfg.tolerance)
        x = np.linspace(0.0, g.L_hat, cfg.grid.profile_points)
        for t_s, th in zip(times, snap_hat):
            c = np.array([analytic.profile(p, flow, x, th, regime, cfg.tolerance) for p in g.analytes()])
            _write_table(os.path.join(out, f"snapshot_t{t_s:g}s.csv"),
                         _header(cfg, "dimensionless", regime, solver, f"t_seconds={t_s!r} t_hat={th!r}"),
                         ["x_hat"] + [f"c_{n}" for n in g.names], np.column_stack([x, c.T]))
    else:
        grid = numeric.Grid(cfg.grid.N_x, g.L_hat, float(t_hat[-1]))
        res = numeric.simulate(grid, g.analytes(), flow, g.Pe_inv, t_hat, snap_hat, g.names)
        chrom = res.chromatogram
        for t_s, snap in zip(times, res.snapshots):
            snap.to_csv(os.path.join(out, f"snapshot_t{t_s:g}s.csv"),
                        _header(cfg, "dimensionless", regime, solver, f"t_seconds={t_s!r}"))
    values = np.array([g.concentration(chrom.values[i], i) for i in range(len(g))])
    path = os.path.join(out, f"chromatogram_{regime}_{solver}.csv")
    _write_table(path, _header(cfg, "mol/m3", regime, solver), ["t_seconds", *g.names],
                 np.column_stack([t_sec, values.T]))
    print(path)
    return EXIT_OK


def cmd_compare(args, cfg: RunConfig) -> int:
    regime = args.regime or cfg.regime
    g = _groups(cfg)
    flow = _flow(cfg, g, regime)
    rows = compare_solvers(g, flow, cfg.grid.N_x, cfg.grid.points, cfg.tolerance)
    report = {"config_sha256": cfg.digest, "regime": regime, "N_x": cfg.grid.N_x,
              "analytes": [r.as_dict() for r in rows],
              "max_peak_time_rel_error": max(r.peak_time_error for r in rows),
              "max_peak_height_rel_error": max(r.peak_height_error for r in rows),
              "max_abs_diff": max(r.max_abs_diff for r in rows),
              "max_rms_diff": max(r.rms_diff for r in rows),
              "min_undershoot": min(r.undershoot for r in rows)}
    out = args.out or cfg.output_dir
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, "compare_report.json"), "w", newline="\n") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"{'analyte':<14}{'t_peak rel':>12}{'height rel':>12}{'max |diff|':>12}{'rms':>12}{'mass':>10}")
    for r in rows:
        print(f"{r.name:<14}{r.peak_time_error:>12.3e}{r.peak_height_error:>12.3e}"
              f"{r.max_abs_diff:>12.3e}{r.rms_diff:>12.3e}{r.mass_audit:>10.2e}")
    return EXIT_OK


def _factors(cfg: RunConfig) -> dict:
    c = cfg.conditions
    missing = [a.name for a in cfg.analytes if a.name not in cfg.calibration]
    if missing:
        raise ConfigError(f"analyte:{missing[0]}.calibration: required for this command")
    return {n: float(conversion_factor(v, cfg.concentration_per_ppb, c.injection_time,
                                       c.inlet_pressure, c.outlet_pressure))
            for n, v in cfg.calibration.items()}


def _load_data(args, cfg):
    path = args.data or cfg.fit.data
    if path is None:
        raise ConfigError("fit.data: no experimental chromatogram given")
    return load_experimental_csv(path, cfg.fit.windows, cfg.fit.exclusions)


def cmd_calibrate(args, cfg: RunConfig) -> int:
    c = cfg.conditions
    rows = []
    data = _load_data(args, cfg) if (args.data or cfg.fit.data) else None
    baseline = 0.0
    if data is not None and cfg.fit.baseline_window:
        baseline = estimate_baseline(data, cfg.fit.baseline_window)
    for a in cfg.analytes:
        if data is not None and any(w.label == a.name for w in data.windows):
            w = data.window(a.name)
            t, y = data.select(w.t_start, w.t_end)
            area = float(np.trapezoid(y - baseline, t))
            f = conversion_factor(area, a.inlet_concentration, c.injection_time,
                                  c.inlet_pressure, c.outlet_pressure)
        elif a.name in cfg.calibration:
            area = cfg.calibration[a.name]
            f = conversion_factor(area, cfg.concentration_per_ppb, c.injection_time,
                                  c.inlet_pressure, c.outlet_pressure)
        else:
            raise ConfigError(f"analyte:{a.name}.calibration: no calibration value or data window")
        rows.append((a.name, area, float(f), baseline))
    out = args.out or cfg.output_dir
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, "calibration.csv")
    with open(path, "w", newline="\n") as fh:
        fh.write(_header(cfg, "a.u.", cfg.regime, "calibrate"))
        fh.write("name,peak_area,conversion_factor,baseline\n")
        for r in rows:
            fh.write(f"{r[0]},{r[1]:.10e},{r[2]:.10e},{r[3]:.10e}\n")
    for r in rows:
        print(f"{r[0]:<14} A={r[1]:.5g}  f={r[2]:.5e} a.u./(mol/m3)  baseline={r[3]:.5g}")
    return EXIT_OK


def cmd_fit(args, cfg: RunConfig) -> int:
    data = _load_data(args, cfg)
    factors = _factors(cfg)
    baseline = estimate_baseline(data, cfg.fit.baseline_window) if cfg.fit.baseline_window else None
    settings = FitSettings(n_starts=args.starts or cfg.fit.n_starts, n_trial=cfg.fit.n_trial,
                           ka_bounds=cfg.fit.ka_bounds, kd_bounds=cfg.fit.kd_bounds,
                           seed=cfg.seed, regime=cfg.regime, tol=cfg.tolerance)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        experiment = Experiment(cfg.geometry, cfg.conditions)
    wanted = [a for a in cfg.analytes if any(w.label == a.name for w in data.windows)]
    if not wanted:
        raise ConfigError("window: no [window:<analyte>] sections declared")
    result = fit_all(experiment, wanted, data, factors, baseline, settings,
                     reference=next((i for i, a in enumerate(wanted)
                                     if a.name == cfg.analytes[cfg.reference].name), 0))
    rows = result.rows()
    out = args.out or cfg.output_dir
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, "fit_results.json"), "w", newline="\n") as fh:
        json.dump({"config_sha256": cfg.digest, "results": rows}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    text = [f"{'analyte':<14}{'k_a [1/s]':>12}{'k_d [1/s]':>12}{'K':>10}{'beta':>8}"
            f"{'SSE':>12}{'R2':>8}  converged"]
    for r in rows:
        text.append(f"{r['name']:<14}{r['k_a']:>12.5g}{r['k_d']:>12.5g}{r['K']:>10.5g}"
                    f"{r['beta']:>8.4f}{r['SSE']:>12.5g}{r['R2']:>8.4f}  {r['converged']}")
    with open(os.path.join(out, "fit_results.txt"), "w", newline="\n") as fh:
        fh.write("\n".join(text) + "\n")
    print("\n".join(text))
    return EXIT_OK


def cmd_convert(args) -> int:
    if args.ppb is not None:
        _need(args, "T", "p")
        print(f"{ppb_to_molar(args.ppb, args.T, args.p):.6e} mol/m3")
    elif args.molar is not None and args.factor is None:
        _need(args, "T", "p")
        print(f"{molar_to_ppb(args.molar, args.T, args.p):.6g} ppb")
    elif args.au is not None:
        _need(args, "factor")
        print(f"{(args.au - args.baseline) / args.factor:.6e} mol/m3")
    elif args.molar is not None:
        print(f"{args.molar * args.factor + args.baseline:.6g} a.u.")
    else:
        raise UsageError("convert needs one of --ppb, --molar or --au")
    return EXIT_OK


def _need(args, *names):
    for n in names:
        if getattr(args, n) is None:
            raise UsageError(f"--{n} is required for this conversion")
    if getattr(args, "factor", None) is not None and args.factor <= 0:
        raise DomainError("conversion factor must be positive")


def _times(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad time list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gcmodel", description="Gas chromatography column models")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="outlet chromatogram and column snapshots")
    p.add_argument("--config", required=True)
    p.add_argument("--regime", choices=("variable", "constant"))
    p.add_argument("--solver", choices=("analytic", "fd"))
    p.add_argument("--times", type=_times, help="snapshot times in seconds, comma separated")
    p.add_argument("--out")

    p = sub.add_parser("compare", help="analytic versus finite-difference report")
    p.add_argument("--config", required=True)
    p.add_argument("--regime", choices=("variable", "constant"))
    p.add_argument("--out")

    p = sub.add_parser("fit", help="fit k_a, k_d per analyte to a chromatogram")
    p.add_argument("--config", required=True)
    p.add_argument("--data")
    p.add_argument("--starts", type=int)
    p.add_argument("--out")

    p = sub.add_parser("calibrate", help="detector conversion factors")
    p.add_argument("--config", required=True)
    p.add_argument("--data")
    p.add_argument("--out")

    p = sub.add_parser("convert", help="unit conversions")
    p.add_argument("--ppb", type=float)
    p.add_argument("--molar", type=float, help="mol/m3")
    p.add_argument("--au", type=float)
    p.add_argument("--T", type=float, help="temperature [K]")
    p.add_argument("--p", type=float, help="pressure [Pa]")
    p.add_argument("--factor", type=float, help="a.u. per mol/m3")
    p.add_argument("--baseline", type=float, default=0.0)
    return parser


_COMMANDS = {"simulate": cmd_simulate, "compare": cmd_compare, "fit": cmd_fit,
             "calibrate": cmd_calibrate}


def _fail(code, kind, message):
    sys.stderr.write(json.dumps({"error": kind, "code": code, "message": str(message)}) + "\n")
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "convert":
            return cmd_convert(args)
        cfg = load_config(args.config)
        return _COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", exc)
    except (ConfigError, DomainError, KeyError) as exc:
        return _fail(EXIT_VALIDATION, "validation", exc)
    except (QuadratureError, numeric.StabilityError, FloatingPointError) as exc:
        return _fail(EXIT_NUMERICAL, "numerical", exc)


if __name__ == "__main__":
    sys.exit(main())
