"""Tidy plot data: one CSV per figure or table.

Nothing here draws; each writer produces a header row and rows ordered by
country code (then year), ready for any external plotter.
"""

from __future__ import annotations

import csv
from dataclasses import replace
from pathlib import Path

import numpy as np

from .economy import CountryYearState
from .impacts import FORMS, TABLE_LIKELIHOODS, TABLE_SCC, single, table_bma, table_form
from .liability import _order, blame_matrix, historical_debt
from .scc import SccTable, compute_scc, run_baseline, scc_growth
from .sensitivity import GridResult, run_grid
from .units import PERSONS_PER_MILLION, TC_PER_MTC

FIG1_WARMING = np.round(np.arange(-1.0, 6.0 + 1e-9, 0.1), 10)
A2_ELASTICITIES = (0.36, -0.36, -1.44)
TABLE_PRTP = 0.01


def _f(x) -> str:
    return repr(float(x))


def _writer(path):
    fh = open(path, "w", newline="", encoding="utf-8")
    return fh, csv.writer(fh, lineterminator="\n")


def emit_carbon_efficiency(states: CountryYearState, scc: SccTable, path) -> tuple[Path, list[str], int]:
    """GDP per tonne of carbon next to each national SCC.

    Returns the path, notes on omitted countries, and the number of countries
    whose SCC exceeds their carbon efficiency.
    """
    path = Path(path)
    notes = []
    violations = 0
    sccs = scc.as_dict()
    fh, w = _writer(path)
    with fh:
        w.writerow(["country", "gdp_usd", "emissions_mtc", "carbon_efficiency_usd_per_tc", "scc_usd2005_per_tc",
                    "scc_exceeds_efficiency"])
        for k in _order(states.countries):
            c = states.countries[k]
            m = float(states.emissions[k])
            if not m > 0:
                notes.append(f"carbon efficiency: {c} omitted, emissions are {m!r} MtC")
                continue
            eff = float(states.gdp_gross[k]) / (m * TC_PER_MTC)
            over = sccs[c] > eff
            violations += int(over)
            w.writerow([c, _f(states.gdp_gross[k]), _f(m), _f(eff), _f(sccs[c]), "1" if over else "0"])
    if violations:
        notes.append(f"carbon efficiency: {violations} countries have an SCC above their carbon efficiency")
    return path, notes, violations


def impact_functions_csv(path) -> Path:
    forms = list(FORMS)
    bma = table_bma()
    fh, w = _writer(path)
    with fh:
        w.writerow(["warming_c", *forms, "bma"])
        for T in FIG1_WARMING:
            w.writerow([_f(T), *(_f(table_form(f).percent(T)) for f in forms), _f(bma.percent(T))])
    return Path(path)


def impact_table_csv(settings, path) -> Path:
    """Coefficients, the published likelihoods, weights, and SCCs recomputed here."""
    cfg = settings.run.with_(prtp=TABLE_PRTP)
    base_year = settings.scc_path_years[0]
    bma = table_bma()
    weights = bma.weights
    width = max(len(FORMS[f].table_params) for f in FORMS)
    fh, w = _writer(path)
    with fh:
        w.writerow(["form", *[f"param{k + 1}" for k in range(width)], "likelihood_pct", "bma_weight",
                    "published_scc_usd_per_tc", "global_scc_usd2005_per_tc"])
        for name in FORMS:
            form = table_form(name)
            run = cfg.with_(impact=single(form))
            scc = compute_scc(run, pulse_year=base_year).global_scc
            ps = [repr(p) for p in form.params] + [""] * (width - len(form.params))
            w.writerow([name, *ps, repr(TABLE_LIKELIHOODS[name]), _f(weights.get(name, 0.0)),
                        repr(TABLE_SCC[name]), _f(scc)])
        bscc = compute_scc(cfg.with_(impact=bma), pulse_year=base_year).global_scc
        w.writerow(["bma", *[""] * width, "", _f(1.0), "", _f(bscc)])
    return Path(path)


def emit_figures(settings, outdir, workers=None) -> tuple[list[Path], list[str]]:
    """Write every figure and table file into ``outdir``; return paths and notes."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    cfg = settings.run
    files: list[Path] = []
    notes: list[str] = []
    base = run_baseline(cfg)
    scc = compute_scc(cfg, base)
    state = base.state(scc.pulse_year)
    rep = blame_matrix(scc, state.emissions, state.gdp_gross, scc.pulse_year)
    order = _order(rep.countries)

    files.append(impact_functions_csv(outdir / "fig_1_impact_functions.csv"))
    files.append(impact_table_csv(settings, outdir / "table_1_impact_functions.csv"))

    fh, w = _writer(outdir / "fig_2_blame.csv")
    with fh:
        w.writerow(["country", "income_per_capita_usd", "harm_done_over_gdp", "damage_suffered_over_gdp"])
        for k in order:
            w.writerow([rep.countries[k], _f(state.income_per_capita[k]), _f(rep.harm_over_gdp[k]),
                        _f(rep.damage_over_gdp[k])])
    files.append(outdir / "fig_2_blame.csv")

    fh, w = _writer(outdir / "fig_3_net_liability.csv")
    with fh:
        w.writerow(["country", "income_per_capita_usd", "net_liability_usd", "net_liability_over_gdp"])
        for k in order:
            w.writerow([rep.countries[k], _f(state.income_per_capita[k]), _f(rep.net_liability[k]),
                        _f(rep.net_over_gdp[k])])
    files.append(outdir / "fig_3_net_liability.csv")

    fh, w = _writer(outdir / "table_net_liability.csv")
    with fh:
        w.writerow(["country", "emissions_mtc", "gdp_usd", "scc_usd2005_per_tc", "harm_done_usd",
                    "damage_suffered_usd", "net_liability_usd"])
        for k in order:
            w.writerow([rep.countries[k], _f(rep.emissions[k]), _f(rep.gdp[k]), _f(rep.scc[k]),
                        _f(rep.harm_done[k]), _f(rep.damage_suffered[k]), _f(rep.net_liability[k])])
    files.append(outdir / "table_net_liability.csv")

    if settings.grid_axes:
        grid = run_grid(settings.grid_axes, cfg, settings.grid_mode, workers, settings.load_scenario)
        files += sensitivity_panels(grid, outdir)
        notes += [f"sensitivity point {p.index} ({p.axis}={p.value}) skipped: {p.error}"
                  for p in grid.points if not p.ok]
    else:
        notes.append("no grid axes configured; sensitivity panels not written")

    y0, y1 = settings.scc_path_years[0], settings.evaluation_year_late
    s0, s1 = compute_scc(cfg, base, pulse_year=y0), compute_scc(cfg, base, pulse_year=y1)
    r0 = blame_matrix(s0, base.state(y0).emissions, base.state(y0).gdp_gross, y0)
    r1 = blame_matrix(s1, base.state(y1).emissions, base.state(y1).gdp_gross, y1)
    name = f"fig_6_liability_{y0}_{y1}.csv"
    fh, w = _writer(outdir / name)
    with fh:
        w.writerow(["country", f"net_liability_over_gdp_{y0}", f"net_liability_over_gdp_{y1}",
                    f"net_liability_usd_{y0}", f"net_liability_usd_{y1}"])
        for k in order:
            w.writerow([rep.countries[k], _f(r0.net_over_gdp[k]), _f(r1.net_over_gdp[k]),
                        _f(r0.net_liability[k]), _f(r1.net_liability[k])])
    files.append(outdir / name)

    if cfg.history is not None:
        ledger = historical_debt(cfg, first_year=settings.debt_first_year,
                                 evaluation_year=settings.debt_year, workers=workers)
        inc = base.income[:, base.index(settings.debt_year)]
        gross, net = ledger.gross_debt, ledger.net_debt
        fh, w = _writer(outdir / "fig_7_debt.csv")
        with fh:
            w.writerow(["country", "income_per_capita_usd", "gross_debt_over_gdp", "net_debt_over_gdp",
                        "gross_debt_usd", "net_debt_usd"])
            for k in _order(ledger.countries):
                w.writerow([ledger.countries[k], _f(inc[k]), _f(gross[k] / ledger.gdp[k]),
                            _f(net[k] / ledger.gdp[k]), _f(gross[k]), _f(net[k])])
        files.append(outdir / "fig_7_debt.csv")
        fh, w = _writer(outdir / "fig_a9_marginal_debt.csv")
        with fh:
            w.writerow(["emission_year", "marginal_debt_usd_per_tc"])
            for t, d in zip(ledger.emission_years, ledger.marginal_global):
                w.writerow([int(t), _f(d)])
        files.append(outdir / "fig_a9_marginal_debt.csv")
    else:
        notes.append("no historical emissions configured; debt figures not written")

    fh, w = _writer(outdir / "fig_a1_scc_population.csv")
    with fh:
        w.writerow(["country", "population_millions", "scc_usd2005_per_tc"])
        for k in order:
            w.writerow([rep.countries[k], _f(state.population[k]), _f(scc.scc[k])])
    files.append(outdir / "fig_a1_scc_population.csv")

    by_eps = []
    for eps in A2_ELASTICITIES:
        alt = cfg.with_(downscaling=replace(cfg.downscaling, income_elasticity=eps))
        by_eps.append(compute_scc(alt))
    fh, w = _writer(outdir / "fig_a2_scc_income.csv")
    with fh:
        w.writerow(["country", "income_per_capita_usd", *(f"scc_eps_{e!r}" for e in A2_ELASTICITIES)])
        for k in order:
            w.writerow([rep.countries[k], _f(state.income_per_capita[k]), *(_f(t.scc[k]) for t in by_eps)])
    files.append(outdir / "fig_a2_scc_income.csv")

    path, n, violations = emit_carbon_efficiency(state, scc, outdir / "fig_a3_carbon_efficiency.csv")
    files.append(path)
    notes += n

    fh, w = _writer(outdir / "fig_a6_shares.csv")
    with fh:
        w.writerow(["country", "emission_share", "scc_share", "share_gap", "net_liability_usd"])
        es, ss, gap = rep.emission_shares(), rep.scc_shares(), rep.share_gap()
        for k in order:
            w.writerow([rep.countries[k], _f(es[k]), _f(ss[k]), _f(gap[k]), _f(rep.net_liability[k])])
    files.append(outdir / "fig_a6_shares.csv")

    if cfg.scenario.convergence:
        on = cfg.with_(convergence=None)
        off = cfg.with_(convergence=False)
        s_on, s_off = compute_scc(on), compute_scc(off)
        fh, w = _writer(outdir / "fig_a7_convergence_delta.csv")
        with fh:
            w.writerow(["country", "income_per_capita_usd", "scc_convergence", "scc_no_convergence", "delta"])
            for k in order:
                w.writerow([rep.countries[k], _f(state.income_per_capita[k]), _f(s_on.scc[k]), _f(s_off.scc[k]),
                            _f(s_off.scc[k] - s_on.scc[k])])
        files.append(outdir / "fig_a7_convergence_delta.csv")
    else:
        notes.append("scenario has no income convergence to switch off; convergence delta not written")

    g = scc_growth(s0, s1)
    inc0 = base.income[:, base.index(y0)]
    fh, w = _writer(outdir / "fig_a8_scc_growth.csv")
    with fh:
        w.writerow(["country", "income_per_capita_usd", f"scc_{y0}", f"scc_{y1}", "annual_growth"])
        for k in order:
            w.writerow([rep.countries[k], _f(inc0[k]), _f(s0.scc[k]), _f(s1.scc[k]), _f(g[k])])
    files.append(outdir / "fig_a8_scc_growth.csv")
    return files, notes


def sensitivity_panels(grid: GridResult, outdir) -> list[Path]:
    """Net liability (fig 4) and SCC shares (fig 5) for every grid point."""
    outdir = Path(outdir)
    out = []
    for name, cols, getter in (
        ("fig_4_sensitivity_net_liability.csv", ["net_liability_over_gdp", "net_liability_usd"],
         lambda r, k: (r.net_over_gdp[k], r.net_liability[k])),
        ("fig_5_sensitivity_shares.csv", ["scc_share", "emission_share"],
         lambda r, k: (r.scc_shares()[k], r.emission_shares()[k])),
    ):
        fh, w = _writer(outdir / name)
        with fh:
            w.writerow(["point", "axis", "value", "country", "income_per_capita_usd", *cols])
            for p in grid.points:
                if not p.ok:
                    continue
                r = p.liability
                inc = r.gdp / _population(p)
                for k in _order(r.countries):
                    w.writerow([p.index, p.axis, p.value, r.countries[k], _f(inc[k]), *map(_f, getter(r, k))])
        out.append(outdir / name)
    return out


def _population(point) -> np.ndarray:
    s = point.config.effective_scenario()
    j = s.year_index(point.liability.evaluation_year)
    return s.population[:, j] * PERSONS_PER_MILLION


__all__ = ["emit_figures", "emit_carbon_efficiency", "impact_functions_csv", "impact_table_csv",
           "sensitivity_panels"]
