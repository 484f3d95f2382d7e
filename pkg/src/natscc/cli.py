"""Command-line front end: ``natscc <subcommand> [-c CONFIG] [-o OUTDIR] [--set KEY=VALUE ...]``."""

from __future__ import annotations

import argparse
import csv
import json
import platform
import sys
import time
from importlib import metadata
from pathlib import Path

import numpy as np

from . import figures
from .config import Settings, load_settings
from .errors import ConfigError, NatSccError
from .impacts import bma_weights, fit_functions, load_meta, write_fit_report
from .liability import _order, blame_matrix, historical_debt, write_debt, write_liability
from .scc import SccTable, WorldTrajectory, compute_scc, config_hash, run_baseline, scc_growth, scc_path
from .sensitivity import run_grid, write_grid

SUBCOMMANDS = ("run", "scc", "scc-path", "liability", "debt", "fit", "sensitivity", "emit-figures")


def _f(x) -> str:
    return repr(float(x))


def write_trajectory(traj: WorldTrajectory, path) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["country", "year", "population_millions", "income_per_capita_usd", "gdp_gross_usd",
                    "emissions_mtc", "impact_fraction", "gdp_net_usd", "damages_usd"])
        for k in _order(traj.countries):
            c = traj.countries[k]
            for j, y in enumerate(traj.years):
                w.writerow([c, int(y), _f(traj.population[k, j]), _f(traj.income[k, j]), _f(traj.gdp_gross[k, j]),
                            _f(traj.emissions[k, j]), _f(traj.impact_fraction[k, j]), _f(traj.gdp_net[k, j]),
                            _f(traj.damages[k, j])])
    return path


def write_climate(traj: WorldTrajectory, path) -> Path:
    path = Path(path)
    cum = traj.cumulative_emissions
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["year", "global_emissions_gtc", "cumulative_emissions_gtc", "concentration_ppm",
                    "temperature_c", "global_impact_fraction"])
        for j, y in enumerate(traj.years):
            w.writerow([int(y), _f(traj.global_emissions[j]), _f(cum[j]), _f(traj.concentration[j]),
                        _f(traj.temperature[j]), _f(traj.global_impact[j])])
    return path


def write_scc(tables: list[SccTable], path) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["country", "scc_usd2005_per_tc", "pulse_year", "global_scc", "config_hash"])
        order = _order(tables[0].countries)
        for k in order:
            for t in sorted(tables, key=lambda t: t.pulse_year):
                w.writerow([t.countries[k], _f(t.scc[k]), t.pulse_year, _f(t.global_scc), t.config_hash])
    return path


def write_scc_growth(first: SccTable, last: SccTable, path) -> Path:
    path = Path(path)
    g = scc_growth(first, last)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["country", "first_year", "last_year", "annual_growth"])
        for k in _order(first.countries):
            w.writerow([first.countries[k], first.pulse_year, last.pulse_year, _f(g[k])])
    return path


# -- subcommands ------------------------------------------------------------


def cmd_run(settings: Settings, out: Path, args, notes):
    traj = run_baseline(settings.run)
    files = [write_trajectory(traj, out / "trajectory.csv"), write_climate(traj, out / "climate.csv")]
    cum, T = traj.cumulative_emissions, traj.temperature
    r2 = float(np.corrcoef(cum, T)[0, 1] ** 2)
    return files, {"peak_temperature_c": float(T.max()), "temperature_cumulative_emissions_r2": r2}


def cmd_scc(settings: Settings, out: Path, args, notes):
    table = compute_scc(settings.run)
    return [write_scc([table], out / "scc.csv")], {"global_scc": table.global_scc, **table.diagnostics}


def cmd_scc_path(settings: Settings, out: Path, args, notes):
    base = run_baseline(settings.run)
    years = sorted(set(settings.scc_path_years))
    tables = scc_path(settings.run, years, base)
    files = [write_scc(tables, out / "scc_path.csv")]
    if len(tables) >= 2:
        files.append(write_scc_growth(tables[0], tables[-1], out / "scc_growth.csv"))
    return files, {"global_scc": {t.pulse_year: t.global_scc for t in tables}}


def cmd_liability(settings: Settings, out: Path, args, notes):
    base = run_baseline(settings.run)
    table = compute_scc(settings.run, base)
    state = base.state(table.pulse_year)
    rep = blame_matrix(table, state.emissions, state.gdp_gross, table.pulse_year)
    files = [write_scc([table], out / "scc.csv"), write_liability(rep, out / "liability.csv")]
    return files, {"evaluation_year": rep.evaluation_year, "max_harm_over_gdp": rep.max_gross_liability(),
                   "sum_net_liability_usd": float(np.sum(rep.net_liability))}


def cmd_debt(settings: Settings, out: Path, args, notes):
    ledger = historical_debt(settings.run, first_year=settings.debt_first_year,
                             evaluation_year=settings.debt_year)
    files = list(write_debt(ledger, out / "debt.csv", out / "marginal_debt.csv"))
    return files, {"marginal_debt_first_year": float(ledger.marginal_global[0]),
                   "marginal_debt_last_year": float(ledger.marginal_global[-1])}


def cmd_fit(settings: Settings, out: Path, args, notes):
    if settings.meta_path is None:
        raise ConfigError("fit needs meta_data in the config")
    data = load_meta(settings.meta_path)
    fits = fit_functions(data)
    for f in fits:
        if not f.converged:
            notes.append(f"fit of {f.form.form} did not converge: {f.message}")
    bma = bma_weights(fits, data.n)
    return [write_fit_report(fits, bma, out / "fit.csv")], {"n_observations": data.n}


def cmd_sensitivity(settings: Settings, out: Path, args, notes):
    grid = run_grid(settings.grid_axes, settings.run, settings.grid_mode, None, settings.load_scenario)
    for p in grid.points:
        if not p.ok:
            notes.append(f"grid point {p.index} ({p.axis}={p.value}) skipped: {p.error}")
    files = list(write_grid(grid, out / "sensitivity.csv", out / "grid_summary.csv"))
    return files, {"grid_points": len(grid.points), "skipped": sum(not p.ok for p in grid.points)}


def cmd_emit_figures(settings: Settings, out: Path, args, notes):
    files, n = figures.emit_figures(settings, out)
    notes.extend(n)
    return files, {"figure_files": len(files)}


COMMANDS = {
    "run": cmd_run,
    "scc": cmd_scc,
    "scc-path": cmd_scc_path,
    "liability": cmd_liability,
    "debt": cmd_debt,
    "fit": cmd_fit,
    "sensitivity": cmd_sensitivity,
    "emit-figures": cmd_emit_figures,
}


# -- plumbing ---------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the config-error status."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(json.dumps({"error": "config", "message": message}), file=sys.stderr)
        raise SystemExit(ConfigError.exit_code)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="natscc", description="National social cost of carbon, liabilities and climate debt.")
    sub = ap.add_subparsers(dest="command", metavar="SUBCOMMAND", parser_class=_Parser)
    sub.required = True
    helps = {
        "run": "simulate the baseline; write trajectory.csv and climate.csv",
        "scc": "national and global SCC for the configured pulse year",
        "scc-path": "SCCs for each of scc_path_years and their growth",
        "liability": "blame matrix and net liability",
        "debt": "historical climate debt with interest",
        "fit": "fit the impact functions to meta_data and report BMA weights",
        "sensitivity": "run the configured sensitivity grid",
        "emit-figures": "write plot data for every figure and table",
    }
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("-c", "--config", type=Path, default=None, help="run-config TOML (default: shipped)")
        p.add_argument("-o", "--output", type=Path, default=Path("natscc-out"), help="output directory")
        p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config value (repeatable; grid axes as grid.NAME=[...])")
    return ap


def _versions() -> dict:
    out = {"python": platform.python_version()}
    for dist in ("artifact", "numpy", "scipy"):
        try:
            out[dist] = metadata.version(dist)
        except metadata.PackageNotFoundError:
            out[dist] = None
    return out


def write_manifest(path, **record) -> Path:
    path = Path(path)
    path.write_text(json.dumps(record, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    return path


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    started = time.perf_counter()
    out: Path = args.output
    try:
        settings = load_settings(args.config, args.overrides)
        loaded = time.perf_counter()
        out.mkdir(parents=True, exist_ok=True)
        notes: list[str] = []
        files, summary = COMMANDS[args.command](settings, out, args, notes)
        done = time.perf_counter()
        write_manifest(
            out / "manifest.json",
            subcommand=args.command,
            config_path=str(args.config) if args.config else "(shipped default)",
            overrides=args.overrides,
            config_hash=settings.hash(),
            run_config_hash=config_hash(settings.run),
            config=settings.describe(),
            versions=_versions(),
            timings_s={"load": loaded - started, "compute": done - loaded},
            files=sorted(Path(f).name for f in files),
            summary=summary,
            notes=notes,
        )
    except NatSccError as exc:
        print(json.dumps({"error": exc.category, "message": str(exc)}), file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(json.dumps({"error": "data", "message": str(exc)}), file=sys.stderr)
        return 3
    for f in files:
        print(f)
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
