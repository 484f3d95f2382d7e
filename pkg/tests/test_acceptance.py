"""Acceptance criteria 1-13.

Each test records one PASS/FAIL/SKIP line, printed in the terminal summary.
Criterion 13 needs published inputs: point NATSCC_PUBLISHED_DATA at a
directory holding ``scenario.csv``, ``history.csv`` and ``meta.csv`` in the
formats of the shipped synthetic files.
"""

import math
import os
import time
from contextlib import contextmanager
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from natscc.impacts import (
    FORMS,
    TABLE_LIKELIHOODS,
    DownscalingParams,
    MetaDataset,
    bma_weights,
    downscale,
    evaluate_impact,
    fit_functions,
    load_meta,
    resolve_impact,
    single,
    table_bma,
    table_form,
)
from natscc.liability import blame_matrix, historical_debt, liability_from_run
from natscc.scc import SccTable, compute_scc, marginal_damages, run_baseline, run_pulse
from natscc.scenario import load_historical, load_scenario
from natscc.sensitivity import run_grid, write_grid

from conftest import ACCEPTANCE_RESULTS

EPSILONS = (0.36, 0.0, -0.36, -0.72, -1.44)


@contextmanager
def criterion(n: int):
    """Record PASS or FAIL for criterion ``n``; the body sets ``detail`` via the yielded list."""
    detail: list[str] = []
    try:
        yield detail
    except pytest.skip.Exception:
        ACCEPTANCE_RESULTS[n] = ("SKIP", "; ".join(detail))
        print(f"criterion {n}: SKIP")
        raise
    except BaseException as exc:
        ACCEPTANCE_RESULTS[n] = ("FAIL", "; ".join(detail + [f"{type(exc).__name__}: {exc}"])[:300])
        print(f"criterion {n}: FAIL")
        raise
    ACCEPTANCE_RESULTS[n] = ("PASS", "; ".join(detail))
    print(f"criterion {n}: PASS {'; '.join(detail)}")


@pytest.fixture(scope="module")
def grid(settings):
    return run_grid(settings.grid_axes, settings.run, settings.grid_mode, 1, settings.load_scenario)


def test_criterion_01_impact_point_values():
    with criterion(1) as d:
        checks = [("Parabolic", 1.0, -0.00532), ("Linear", 2.0, -0.0158), ("Threshold", -0.30, 0.0),
                  ("Quadratic", 0.0, 0.0)]
        for name, T, want in checks:
            got = float(evaluate_impact(table_form(name), T))
            assert abs(got - want) <= 1e-12, (name, got)
        d.append("4 point values within 1e-12")


def test_criterion_02_bma_recovery():
    with criterion(2) as d:
        t0 = time.perf_counter()
        T = np.arange(0.5, 5.01, 0.5)
        data = MetaDataset(T, -0.17 * T ** 2)
        fits = fit_functions(data)
        w = bma_weights(fits, data.n).weights
        q = next(f for f in fits if f.form.form == "Quadratic")
        elapsed = time.perf_counter() - t0
        assert abs(-q.form.params[0] - 0.17) <= 1e-6
        top = max(w.values())
        assert w["Quadratic"] >= top - 1e-12, w
        tied = sorted(k for k, v in w.items() if v >= top - 1e-12)
        assert elapsed < 1.0
        d.append(f"coefficient {-q.form.params[0]!r}; top weight {w['Quadratic']:.3f} shared by {','.join(tied)}; "
                 f"{elapsed:.2f}s")


def test_criterion_03_lindahl_sum(settings, grid):
    with criterion(3) as d:
        runs = [p.scc for p in grid.points if p.ok]
        runs += [compute_scc(settings.run.with_(downscaling=DownscalingParams(e))) for e in EPSILONS]
        worst = 0.0
        for t in runs:
            rel = abs(math.fsum(t.scc) - t.global_scc) / abs(t.global_scc)
            worst = max(worst, rel)
        assert worst <= 1e-9
        d.append(f"{len(runs)} runs, worst relative gap {worst:.1e}")


def test_criterion_04_downscaling_conservation(baseline):
    with criterion(4) as d:
        worst = 0.0
        for eps in EPSILONS:
            p = DownscalingParams(income_elasticity=eps)
            for year in (1950, 2010, 2015, 2100, 2300):
                state = baseline.state(year)
                g = float(baseline.global_impact[baseline.index(year)])
                i = downscale(g, state, p)
                lhs, rhs = math.fsum(i * state.gdp_gross), g * math.fsum(state.gdp_gross)
                worst = max(worst, abs(lhs - rhs) / abs(rhs))
        assert worst <= 1e-9
        d.append(f"5 elasticities x 5 years, worst relative gap {worst:.1e}")


def test_criterion_05_zero_sum_liability(settings, grid):
    with criterion(5) as d:
        toy = blame_matrix(SccTable(("AAA", "BBB"), np.array([1.0, 3.0]), 4.0, 2015), [10.0, 5.0], [1e9, 1e9])
        assert tuple(toy.net_liability) == (25e6, -25e6)
        reports = [p.liability for p in grid.points if p.ok]
        worst = 0.0
        for rep in reports:
            L = rep.net_liability
            worst = max(worst, abs(math.fsum(L)) / math.fsum(abs(x) for x in L))
        assert worst <= 1e-9
        d.append(f"toy L = (+25, -25) M$ exactly; {len(reports)} reports, worst {worst:.1e}")


def test_criterion_06_share_sign_law(grid):
    with criterion(6) as d:
        n = 0
        for p in grid.points:
            if not p.ok:
                continue
            rep = p.liability
            assert np.all(np.sign(rep.net_liability) == np.sign(rep.share_gap())), p.value
            n += len(rep.countries)
        d.append(f"{n} country-runs agree in sign")


def test_criterion_07_monotonicity(config, baseline):
    with criterion(7) as d:
        t0 = time.perf_counter()
        prtp = [compute_scc(config.with_(prtp=r)).global_scc for r in (0.01, 0.015, 0.03)]
        assert prtp[0] > prtp[1] > prtp[2], prtp
        cs = [compute_scc(config.with_(climate=replace(config.climate, climate_sensitivity=c))).global_scc
              for c in (1.5, 3.0, 4.5)]
        assert cs[0] <= cs[1] <= cs[2], cs
        low = config.with_(prtp=0.01)
        howard = compute_scc(low.with_(impact=resolve_impact("howard"))).global_scc
        expo = compute_scc(low.with_(impact=resolve_impact("Exponential"))).global_scc
        alternatives = [name for name in FORMS if name in TABLE_LIKELIHOODS and
                        name not in ("QuadraticBarrage", "QuadraticHoward", "HazardWeitzman")]
        members = [compute_scc(low.with_(impact=single(table_form(n)))).global_scc for n in alternatives]
        avg = math.fsum(members) / len(members)
        elapsed = time.perf_counter() - t0
        assert howard > avg > expo, (howard, avg, expo)
        assert elapsed < 30.0
        d.append(f"prtp {prtp[0]:.2f}>{prtp[1]:.2f}>{prtp[2]:.2f}; cs {cs[0]:.2f}<={cs[1]:.2f}<={cs[2]:.2f}; "
                 f"Howard {howard:.1f} > average of {len(members)} {avg:.1f} > Exponential {expo:.2f}; "
                 f"{elapsed:.1f}s")


def test_criterion_08_pulse_marginality(config, baseline):
    with criterion(8) as d:
        a = compute_scc(config, baseline, pulse_size=1.0)
        b = compute_scc(config, baseline, pulse_size=10.0)
        rel = np.max(np.abs(a.scc - b.scc) / np.abs(b.scc))
        assert abs(a.global_scc - b.global_scc) <= 0.01 * abs(b.global_scc)
        assert rel <= 0.01
        d.append(f"largest national gap {rel:.1e}")


def test_criterion_09_matthews_linearity(baseline):
    with criterion(9) as d:
        r2 = np.corrcoef(baseline.cumulative_emissions, baseline.temperature)[0, 1] ** 2
        assert r2 > 0.95
        d.append(f"R^2 {r2:.3f}")


def test_criterion_10_debt_shape(config):
    with criterion(10) as d:
        ledger = historical_debt(config)
        D = ledger.marginal_global
        assert ledger.emission_years[0] == 1960 and ledger.emission_years[-1] == 2015
        assert np.all(np.diff(D) < 0)
        base = run_baseline(config)
        dd = marginal_damages(base, run_pulse(config, 2015), config.pulse_size * 1e6)
        single_year = math.fsum(dd[:, base.index(2015)])
        assert D[-1] == pytest.approx(single_year, rel=1e-12)
        d.append(f"D(1960) {D[0]:.2f} > ... > D(2015) {D[-1]:.3f} $/tC")


def test_criterion_11_order_of_magnitude(config, baseline):
    with criterion(11) as d:
        t0 = time.perf_counter()
        state = baseline.state(2010)
        gdp, em = state.gdp_gross.sum() / 1e12, state.emissions.sum() / 1e3
        assert 54 <= gdp <= 66 and 9 <= em <= 11, (gdp, em)
        scc = compute_scc(config.with_(prtp=0.01, emuc=1.5, impact=table_bma())).global_scc
        elapsed = time.perf_counter() - t0
        assert 2.0 <= scc <= 50.0
        assert elapsed < 10.0
        d.append(f"world GDP {gdp:.1f} T$, emissions {em:.2f} GtC; BMA SCC {scc:.2f} $/tC; {elapsed:.1f}s")


def test_criterion_12_determinism(settings, tmp_path):
    with criterion(12) as d:
        t0 = time.perf_counter()
        a = run_grid(settings.grid_axes, settings.run, settings.grid_mode, None, settings.load_scenario)
        elapsed = time.perf_counter() - t0
        b = run_grid(settings.grid_axes, settings.run, settings.grid_mode, None, settings.load_scenario)
        fa = write_grid(a, tmp_path / "a.csv", tmp_path / "ag.csv")
        fb = write_grid(b, tmp_path / "b.csv", tmp_path / "bg.csv")
        assert fa[0].read_bytes() == fb[0].read_bytes()
        assert fa[1].read_bytes() == fb[1].read_bytes()
        assert elapsed < 60.0
        n = len(settings.run.scenario.countries)
        d.append(f"{len(a.points)} grid points, {n} countries, {len(settings.run.scenario.years)} years; "
                 f"byte-identical; {elapsed:.2f}s")


PUBLISHED = os.environ.get("NATSCC_PUBLISHED_DATA")


def test_criterion_13_published_data(settings):
    with criterion(13) as d:
        if not PUBLISHED:
            d.append("NATSCC_PUBLISHED_DATA not set")
            pytest.skip("published scenario, emissions and meta-analysis data not supplied")
        root = Path(PUBLISHED)
        meta = load_meta(root / "meta.csv")
        fits = fit_functions(meta)
        w = bma_weights(fits, meta.n).weights
        order = sorted(TABLE_LIKELIHOODS, key=TABLE_LIKELIHOODS.get, reverse=True)
        fitted_order = sorted(order, key=lambda k: w.get(k, 0.0), reverse=True)
        assert fitted_order == order, fitted_order

        cfg = settings.run.with_(scenario=load_scenario(root / "scenario.csv"),
                                 history=load_historical(root / "history.csv"))
        base = run_baseline(cfg)
        table = compute_scc(cfg, base)
        rep = liability_from_run(cfg, table, base)
        net = dict(zip(rep.countries, rep.net_liability / 1e9))
        assert net["CHN"] == pytest.approx(8.07, rel=0.10), net["CHN"]
        assert net["JPN"] == pytest.approx(-1.72, rel=0.10), net["JPN"]
        assert rep.max_gross_liability() <= 0.0058
        ledger = historical_debt(cfg)
        assert ledger.marginal_global[0] == pytest.approx(25.0, rel=0.25)
        d.append(f"CHN {net['CHN']:.2f}, JPN {net['JPN']:.2f} bn$/yr; D(1960) {ledger.marginal_global[0]:.1f}")
