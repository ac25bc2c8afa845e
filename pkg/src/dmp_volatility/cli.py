"""Command-line entry point: ``python -m dmp_volatility <subcommand>``.

Every subcommand writes CSV (or JSON) into ``--out`` together with a
``<name>.meta.json`` sidecar that lists column units and the settings used.
Exit codes: 0 success, 2 configuration or data error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .calibration import (ModelConfig, base_calibration, build_economies, build_table, calibrate_mu,
                          config_to_dict, load_config, monthly_to_daily, solve_h_max)
from .decomposition import decompose, default_y_grid, sweep_y, upsilon
from .data_io import (DEFAULT_RANGE, SERIES, SNAPSHOT_DIR, assemble, fetch_series, parse_range,
                      read_combined_csv)
from .equilibrium import solve_theta
from .errors import DataError, ModelError
from .estimation import (bound_series, build_sample, elasticity_series, fit_nls, naive_predict,
                         regime_dummies, smear_predict)
from .flows import adjust_series, solvable, write_flows_csv
from .model import DRW, wage_firm_side, wage_worker_side

EXIT_OK, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3
LITERATURE_GAMMA = 1.27


class ConfigError(Exception):
    pass


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    x = float(x)
    return "" if math.isnan(x) else repr(x)


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _write_meta(path: Path, args, cfg: ModelConfig, units: dict, **extra) -> None:
    meta = {
        "file": path.name,
        "command": args.command,
        "package_version": __version__,
        "columns": units,
        "config": config_to_dict(cfg),
        "days_per_month": cfg.targets.days_per_month,
        "days_per_month_note": "inferred: 30-day months reproduce the reported calibration",
    }
    meta.update(extra)
    Path(str(path) + ".meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def _load_cfg(args) -> ModelConfig:
    if args.config is None:
        cfg = ModelConfig()
    else:
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            cfg = load_config(path)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
        except (ValueError, TypeError) as exc:
            # tomllib errors carry "(at line N, column M)" in the message
            raise ConfigError(f"{path}: {exc}") from None
    if args.gamma is not None:
        cfg.gamma = args.gamma
    return cfg


# ---------------------------------------------------------------- model commands

def cmd_table(args, cfg: ModelConfig, out: Path) -> int:
    rows = []
    for preset in cfg.economies:
        try:
            rows += build_table(cfg.targets, cfg.gamma, (preset,), cfg.high_h)
        except ModelError as exc:
            print(f"error: economy {preset.name}: {type(exc).__name__}: {exc}", file=sys.stderr)
            return EXIT_DATA
    header = ("economy", "c", "h", "ell", "eta_theta_y", "eta_w_y")
    path = out / "table_model_results.csv"
    _write_csv(path, header, [(r.economy, r.c, r.h, r.ell, r.eta_theta_y, r.eta_w_y) for r in rows])
    _write_meta(path, args, cfg, {
        "economy": "label", "c": "output per day per vacancy", "h": "output (one-off, firm)",
        "ell": "output (one-off, worker)", "eta_theta_y": "elasticity", "eta_w_y": "elasticity"})
    print(f"{'economy':<10}{'c':>12}{'h':>8}{'ell':>8}{'eta_theta_y':>13}{'eta_w_y':>10}")
    for r in rows:
        print(f"{r.economy:<10}{r.c:>12.6g}{r.h:>8.3f}{r.ell:>8.3f}{r.eta_theta_y:>13.3f}{r.eta_w_y:>10.3f}")
    return EXIT_OK


def _y_grid(args):
    return default_y_grid(args.y_min, args.y_max, args.y_step)


def cmd_sweep(args, cfg: ModelConfig, out: Path) -> int:
    econ = build_economies(cfg.targets, cfg.gamma, cfg.economies, cfg.high_h)
    grid = _y_grid(args)
    days = cfg.targets.days_per_month
    sweeps = {name: sweep_y(e.cal, e.tech, grid, days) for name, e in econ.items()}
    header, units = ["y"], {"y": "output per day"}
    for name in econ:
        for col, unit in (("theta", "vacancies per unemployed"),
                          ("u", "fraction of labor force, monthly transition probabilities"),
                          ("u_daily", "fraction of labor force, daily model steady state"),
                          ("w", "output per day"), ("flag", "error tag")):
            header.append(f"{col}_{name}")
            units[f"{col}_{name}"] = unit
    rows = []
    for i, y in enumerate(grid):
        row = [float(y)]
        for name in econ:
            p = sweeps[name][i]
            row += [p.theta, p.u, p.u_daily, p.w, p.flag]
        rows.append(row)
    path = out / "fig_ur_dynamics.csv"
    _write_csv(path, header, rows)
    _write_meta(path, args, cfg, units)
    n_bad = sum(1 for s in sweeps.values() for p in s if p.flag)
    print(f"wrote {path} ({len(grid)} productivity levels, {len(econ)} economies, {n_bad} infeasible points)")
    return EXIT_OK


def cmd_bounds(args, cfg: ModelConfig, out: Path) -> int:
    """Upper bound on the first factor along each economy's productivity sweep."""
    econ = build_economies(cfg.targets, cfg.gamma, cfg.economies, cfg.high_h)
    grid = _y_grid(args)
    header, units = ["y"], {"y": "output per day"}
    for name in econ:
        for col, unit in (("theta", "vacancies per unemployed"),
                          ("bound", f"ratio, matching elasticity with gamma={args.bound_gamma}"),
                          ("upsilon", "ratio, model matching function")):
            header.append(f"{col}_{name}")
            units[f"{col}_{name}"] = unit
    rows = []
    for y in grid:
        row = [float(y)]
        for e in econ.values():
            cal = e.cal.replace(y=float(y))
            try:
                th = solve_theta(cal, e.tech).theta_star
                row += [th, bound_series(args.bound_gamma, th), upsilon(cal, e.tech, th)]
            except ModelError:
                row += [math.nan] * 3
        rows.append(row)
    path = out / "fig_bound_indexed_y.csv"
    _write_csv(path, header, rows)
    _write_meta(path, args, cfg, units, bound_gamma=args.bound_gamma)
    print(f"wrote {path}")
    return EXIT_OK


def cmd_calibrate(args, cfg: ModelConfig, out: Path) -> int:
    t = cfg.targets
    daily = monthly_to_daily(t)
    mu = calibrate_mu(t, cfg.gamma)
    tech = DRW(mu, cfg.gamma)
    base = base_calibration(t)
    econ = build_economies(t, cfg.gamma, cfg.economies, cfg.high_h)
    result = {
        "daily": daily._asdict(),
        "mu": mu,
        "gamma": cfg.gamma,
        "implied_unemployment": t.implied_unemployment,
        "h_max": solve_h_max(base, tech, t.theta_star),
        "economies": {n: asdict(e.cal) for n, e in econ.items()},
    }
    path = out / "calibration.json"
    path.write_text(json.dumps(result, indent=2, sort_keys=True) + "\n")
    _write_meta(path, args, cfg, {"daily": "per day", "mu": "matching efficiency", "h_max": "output"})
    print(json.dumps(result, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_solve(args, cfg: ModelConfig, out: Path) -> int:
    econ = build_economies(cfg.targets, cfg.gamma, cfg.economies, cfg.high_h)
    report = {}
    for name, e in econ.items():
        sol = solve_theta(e.cal, e.tech, tol=args.tol)
        d = decompose(e.cal, e.tech, sol.theta_star)
        report[name] = {
            "theta_star": sol.theta_star, "theta_bar": sol.theta_bar,
            "uniqueness": sol.uniqueness.value, "iterations": sol.iterations,
            "residual": sol.residual, **asdict(d),
        }
    path = out / "solve.json"
    path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    _write_meta(path, args, cfg, {"theta_star": "vacancies per unemployed"})

    # job creation by firms and by workers in (theta, w) space, baseline economy
    base = next(iter(econ.values()))
    ell = args.w_tight_ell
    grid = np.geomspace(0.1, 3.0, 300)
    rows = [(th, wage_firm_side(base.cal, base.tech, th), wage_worker_side(base.cal, base.tech, th),
             wage_worker_side(base.cal.replace(ell=ell), base.tech, th)) for th in grid]
    wpath = out / "fig_w_tight.csv"
    header = ("theta", "w_firm", "w_worker", "w_worker_ell")
    _write_csv(wpath, header, rows)
    _write_meta(wpath, args, cfg, {"theta": "vacancies per unemployed", "w_firm": "output per day",
                                   "w_worker": "output per day",
                                   "w_worker_ell": f"output per day, worker cost ell={ell}"},
                economy=base.name)
    for name, r in report.items():
        print(f"{name:<10} theta*={r['theta_star']:.9f}  theta_bar={r['theta_bar']:.6g}  {r['uniqueness']}")
    return EXIT_OK


# ---------------------------------------------------------------- data commands

def _load_data(args, cfg: ModelConfig):
    start, end = parse_range(args.range) if args.range else DEFAULT_RANGE
    source = args.data or cfg.extra.get("data")
    if source is not None and Path(source).is_file():
        series = read_combined_csv(source)
    else:
        snap = Path(source) if source is not None else SNAPSHOT_DIR
        series = {fid: fetch_series(spec, cache_dir=args.cache, offline=args.offline, snapshot_dir=snap)
                  for fid, spec in SERIES.items()}
    return assemble(series, start, end)


def _adjusted(args, cfg):
    data = _load_data(args, cfg)
    rates = adjust_series(data.months)
    return data, rates


def cmd_adjust(args, cfg: ModelConfig, out: Path) -> int:
    data, rates = _adjusted(args, cfg)
    ok = solvable(rates)
    path = out / "flows_adjusted.csv"
    write_flows_csv(rates, path)
    _write_meta(path, args, cfg, {
        "date": "YYYY-MM", "s_corrected": "monthly probability", "s_approx": "monthly probability",
        "s_uncorrected": "monthly probability", "f_corrected": "monthly probability",
        "f_uncorrected": "hires per unemployed (may exceed 1)", "varsigma": "per month (Poisson rate)",
        "varphi": "per month (Poisson rate)", "flag": "error tags"},
        labor_force_note="labor force = PAYEMS + UNEMPLOY; establishment and household surveys differ")
    share = sum(ok) / len(ok)
    print(f"wrote {path}: {sum(ok)}/{len(ok)} months solved")
    if share < 0.5:
        print(f"error: only {share:.0%} of months solvable", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def cmd_estimate(args, cfg: ModelConfig, out: Path) -> int:
    data, rates = _adjusted(args, cfg)
    sample = build_sample(rates, data.vacancies, data.unemployment)
    res = fit_nls(sample, tol=args.tol_gamma, dummies=not args.no_dummies, gamma_fixed=args.gamma_fixed)
    summary = res.to_dict()
    dates = sample.dates
    theta = np.asarray(data.theta)
    f = np.array([r.f_t for r in rates])
    flags = [r.flag for r in rates]
    g, c = regime_dummies(dates)
    if not res.dummies:
        g, c = np.zeros_like(g), np.zeros_like(c)
    valid = np.isfinite(theta) & (theta > 0)
    th = np.where(valid, theta, np.nan)
    pred_s = np.where(valid, smear_predict(res, np.where(valid, theta, 1.0), g, c), np.nan)
    pred_n = np.where(valid, naive_predict(res, np.where(valid, theta, 1.0), g, c), np.nan)
    eta = np.where(valid, elasticity_series(res.gamma, np.where(valid, theta, 1.0)), np.nan)
    b_hat = np.where(valid, bound_series(res.gamma, np.where(valid, theta, 1.0)), np.nan)
    b_lit = np.where(valid, bound_series(args.bound_gamma, np.where(valid, theta, 1.0)), np.nan)
    obs = th[valid]
    summary.update({
        "eta_range": [float(np.nanmin(eta)), float(np.nanmax(eta))],
        "bound_range": [float(np.nanmin(b_hat)), float(np.nanmax(b_hat))],
        "bound_range_literature_gamma": [float(np.nanmin(b_lit)), float(np.nanmax(b_lit))],
        "literature_gamma": args.bound_gamma,
        "theta_range": [float(obs.min()), float(obs.max())],
        "max_rel_gap_smear_vs_naive": float(np.nanmax(np.abs(pred_s / pred_n - 1.0))),
        "range": [dates[0], dates[-1]],
    })
    path = out / "estimation.json"
    path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    _write_meta(path, args, cfg, {"alpha": "log efficiency", "gamma": "DRW curvature",
                                  "psi": "log shift 2007-12..2020-01", "xi": "log shift from 2020-02"})

    figs = {
        "fig_estimated_find.csv": (
            ("date", "f_corrected", "f_predicted", "flag"),
            {"f_corrected": "monthly probability", "f_predicted": "monthly probability (smearing)"},
            zip(dates, f, pred_s, flags)),
        "fig_tight_vs_find.csv": (
            ("date", "theta", "f_corrected", "f_predicted", "flag"),
            {"theta": "vacancies per unemployed", "f_corrected": "monthly probability",
             "f_predicted": "monthly probability (smearing)"},
            zip(dates, th, f, pred_s, flags)),
        "fig_tight_vs_lfind.csv": (
            ("date", "theta", "log_f_corrected", "log_f_predicted", "flag"),
            {"theta": "vacancies per unemployed", "log_f_corrected": "log monthly probability",
             "log_f_predicted": "log monthly probability (linear predictor)"},
            zip(dates, th, np.log(np.where(f > 0, f, np.nan)), np.log(pred_n), flags)),
        "fig_elasticity_matching.csv": (
            ("date", "theta", "eta_mu_u"),
            {"theta": "vacancies per unemployed", "eta_mu_u": f"elasticity, gamma={res.gamma:.6g}"},
            zip(dates, th, eta)),
        "fig_bound.csv": (
            ("date", "theta", "bound_gamma_hat"),
            {"theta": "vacancies per unemployed", "bound_gamma_hat": f"ratio, gamma={res.gamma:.6g}"},
            zip(dates, th, b_hat)),
        "fig_bound_hi.csv": (
            ("date", "theta", "bound_gamma_hat", "bound_gamma_literature"),
            {"theta": "vacancies per unemployed", "bound_gamma_hat": f"ratio, gamma={res.gamma:.6g}",
             "bound_gamma_literature": f"ratio, gamma={args.bound_gamma}"},
            zip(dates, th, b_hat, b_lit)),
    }
    order = np.argsort(obs)
    figs["fig_bound_tightness.csv"] = (
        ("theta", "bound_gamma_hat", "bound_gamma_literature", "bound_cobb_douglas"),
        {"theta": "vacancies per unemployed (observed, sorted)", "bound_gamma_hat": "ratio",
         "bound_gamma_literature": "ratio", "bound_cobb_douglas": "ratio, exponent 0.5"},
        zip(obs[order], b_hat[valid][order], b_lit[valid][order], np.full(len(obs), 2.0)))
    for name, (header, units, rows) in figs.items():
        units = {"date": "YYYY-MM", "flag": "error tags", **units}
        _write_csv(out / name, header, rows)
        _write_meta(out / name, args, cfg, {k: units[k] for k in header})

    print(f"gamma={res.gamma:.6f} alpha={res.alpha:.6f} psi={res.psi:.6f} xi={res.xi:.6f} "
          f"ssr={res.ssr:.6g} smear={res.smear_factor:.6f} n={res.n_obs}")
    return EXIT_OK


COMMANDS = {
    "table": (cmd_table, "reproduce the model results table"),
    "sweep": (cmd_sweep, "steady-state unemployment across productivity levels"),
    "bounds": (cmd_bounds, "matching-elasticity bound across productivity levels"),
    "adjust": (cmd_adjust, "correct monthly flows for time aggregation and cumulative hires"),
    "estimate": (cmd_estimate, "estimate the matching function and write figure data"),
    "calibrate": (cmd_calibrate, "daily parameters and vacancy costs for each economy"),
    "solve": (cmd_solve, "solve and decompose each economy; job-creation curves"),
}


def _common_flags(suppress: bool) -> argparse.ArgumentParser:
    # global flags are accepted before or after the subcommand; the copy on the
    # subparsers must not overwrite values given before it, hence SUPPRESS
    common = argparse.ArgumentParser(add_help=False)

    def d(value):
        return argparse.SUPPRESS if suppress else value

    common.add_argument("--config", default=d(None), help="JSON or TOML configuration file")
    common.add_argument("--out", default=d("."), help="output directory (created if absent)")
    common.add_argument("--offline", action="store_true", default=d(False), help="never touch the network")
    common.add_argument("--gamma", type=float, default=d(None), help="override the DRW curvature of the model")
    common.add_argument("--range", default=d(None), help="months to use, YYYY-MM:YYYY-MM")
    common.add_argument("--tol", type=float, default=d(1e-12), help="root-finding tolerance on theta")
    return common


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dmp_volatility", description=__doc__.splitlines()[0],
                                parents=[_common_flags(False)])
    common = _common_flags(True)
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_, parents=[common])
        if name in ("sweep", "bounds"):
            sp.add_argument("--y-min", type=float, default=0.97)
            sp.add_argument("--y-max", type=float, default=1.03)
            sp.add_argument("--y-step", type=float, default=0.001)
        if name in ("bounds", "estimate"):
            sp.add_argument("--bound-gamma", type=float, default=LITERATURE_GAMMA,
                            help="curvature used for the comparison bound")
        if name in ("adjust", "estimate"):
            sp.add_argument("--data", help="combined CSV (date,payems,unemploy,jtshil,jtsjol,unrate) "
                                           "or a directory of FRED CSV files")
            sp.add_argument("--cache", help="cache directory for fetched series")
        if name == "estimate":
            sp.add_argument("--gamma-fixed", type=float, help="skip the search and use this gamma")
            sp.add_argument("--no-dummies", action="store_true", help="drop the regime shifters")
            sp.add_argument("--tol-gamma", type=float, default=1e-8)
        if name == "solve":
            sp.add_argument("--w-tight-ell", type=float, default=4.488,
                            help="worker-paid cost for the shifted job-creation curve")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    func = COMMANDS[args.command][0]
    try:
        cfg = _load_cfg(args)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        return func(args, cfg, out)
    except (ConfigError, DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ModelError as exc:
        code = EXIT_DATA if exc.__class__.__name__ in ("InvalidCalibration", "MisalignedSeries") else EXIT_NUMERIC
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
