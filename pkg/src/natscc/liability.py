"""Blame matrices, net liability and historical climate debt."""

from __future__ import annotations

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError
from .scc import RunConfig, SccTable, marginal_damages, ramsey_rates, run_baseline, run_pulse
from .scenario import HistoricalEmissions
from .units import TC_PER_MTC

DEBT_FIRST_YEAR = 1960
DEBT_YEAR = 2015


def _aligned(countries, values, what):
    if isinstance(values, dict):
        if set(values) != set(countries):
            extra = sorted(set(values) ^ set(countries))
            raise DataError(f"{what} covers a different set of countries: {extra[:5]}")
        return np.array([values[c] for c in countries], dtype=float)
    arr = np.asarray(values, dtype=float)
    if arr.shape != (len(countries),):
        raise DataError(f"{what} has {arr.shape} entries for {len(countries)} countries")
    return arr


def _cross_others(a: np.ndarray, b: np.ndarray) -> list[Fraction]:
    """Exact a_c * sum_{i != c} b_i for every c.

    Rational arithmetic keeps harm and damage exact until the final rounding,
    so when the two are mathematically equal they round to the same float and
    the net liability is exactly zero.
    """
    fb = [Fraction(float(x)) for x in b]
    total = sum(fb, Fraction(0))
    return [Fraction(float(x)) * (total - y) for x, y in zip(a, fb)]


def _round(values) -> np.ndarray:
    return np.array([float(v) for v in values])


@dataclass(frozen=True)
class LiabilityReport:
    countries: tuple[str, ...]
    evaluation_year: int
    emissions: np.ndarray  # MtC/yr
    scc: np.ndarray  # USD/tC
    gdp: np.ndarray  # USD/yr
    harm_done: np.ndarray  # USD/yr, H_c
    damage_suffered: np.ndarray  # USD/yr, D_c
    net_liability: np.ndarray  # USD/yr, L_c = H_c - D_c

    @property
    def harm_over_gdp(self):
        return self.harm_done / self.gdp

    @property
    def damage_over_gdp(self):
        return self.damage_suffered / self.gdp

    @property
    def net_over_gdp(self):
        return self.net_liability / self.gdp

    def emission_shares(self):
        """Share of world emissions; all zero when nobody emits."""
        total = self.emissions.sum()
        return self.emissions / total if total > 0 else np.zeros_like(self.emissions)

    def scc_shares(self):
        """Share of the global SCC; all zero when the global SCC is zero."""
        total = self.scc.sum()
        return self.scc / total if total != 0 else np.zeros_like(self.scc)

    def share_gap(self):
        """Emission share minus SCC share; carries the sign of net liability."""
        return self.emission_shares() - self.scc_shares()

    def net_by_shares(self):
        """Net liability rebuilt from the share decomposition, USD/yr."""
        return self.scc.sum() * self.emissions.sum() * TC_PER_MTC * self.share_gap()

    def max_gross_liability(self) -> float:
        return float(np.max(self.harm_over_gdp))


def blame_matrix(scc: SccTable, emissions, gdp, evaluation_year: int | None = None) -> LiabilityReport:
    """Harm done to others, damage suffered from others, and their difference.

    ``emissions`` (MtC/yr) and ``gdp`` (USD/yr) are arrays aligned with
    ``scc.countries`` or mappings keyed by country code.
    """
    countries = scc.countries
    m = _aligned(countries, emissions, "emissions")
    y = _aligned(countries, gdp, "gdp")
    if np.any(y <= 0):
        raise DataError("GDP must be positive to normalize liabilities")
    s = np.asarray(scc.scc, dtype=float)
    m_tc = m * TC_PER_MTC
    harm = _round(_cross_others(m_tc, s))
    damage = _round(_cross_others(s, m_tc))
    return LiabilityReport(
        countries=countries,
        evaluation_year=scc.pulse_year if evaluation_year is None else int(evaluation_year),
        emissions=m,
        scc=s,
        gdp=y,
        harm_done=harm,
        damage_suffered=damage,
        net_liability=harm - damage,
    )


def liability_from_run(config: RunConfig, scc: SccTable, baseline) -> LiabilityReport:
    state = baseline.state(scc.pulse_year)
    return blame_matrix(scc, state.emissions, state.gdp_gross)


# -- historical debt ----------------------------------------------------------


@dataclass(frozen=True)
class DebtLedger:
    countries: tuple[str, ...]
    emission_years: np.ndarray
    evaluation_year: int
    marginal: np.ndarray  # (n_countries, n_emission_years) USD per tC owed to each country by 1 tC emitted in t
    emissions: np.ndarray  # (n_countries, n_emission_years) MtC
    gdp: np.ndarray  # evaluation-year GDP, USD

    @property
    def marginal_global(self) -> np.ndarray:
        """D_t: compounded global damage per tonne emitted in year t, USD/tC."""
        return self.marginal.sum(axis=0)

    @property
    def marginal_sum(self) -> np.ndarray:
        """Per-country sum over emission years of the compounded marginal damage, USD/tC."""
        return self.marginal.sum(axis=1)

    @property
    def _tc(self):
        return self.emissions * TC_PER_MTC

    @property
    def gross_debt(self) -> np.ndarray:
        """Compounded damage everywhere caused by each country's emissions, USD."""
        return (self._tc * self.marginal_global).sum(axis=1)

    def _accumulate(self, a, b) -> np.ndarray:
        totals = [Fraction(0)] * len(self.countries)
        for t in range(a.shape[1]):
            totals = [x + y for x, y in zip(totals, _cross_others(a[:, t], b[:, t]))]
        return _round(totals)

    @property
    def harm_done(self) -> np.ndarray:
        """Compounded damage caused to other countries, USD."""
        return self._accumulate(self._tc, self.marginal)

    @property
    def damage_suffered(self) -> np.ndarray:
        """Compounded damage suffered from other countries' emissions, USD."""
        return self._accumulate(self.marginal, self._tc)

    @property
    def net_debt(self) -> np.ndarray:
        return self.harm_done - self.damage_suffered


def _marginal_debt_row(args):
    config, base, year, evaluation_year, compound = args
    pulsed = run_pulse(config, year)
    dd = marginal_damages(base, pulsed, config.pulse_size * TC_PER_MTC)
    j0, j1 = base.index(year), base.index(evaluation_year)
    return (dd[:, j0:j1 + 1] * compound[:, j0:j1 + 1]).sum(axis=1)


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("NATSCC_WORKERS", "1")))
    except ValueError:
        raise ConfigError("NATSCC_WORKERS must be an integer") from None


def historical_debt(config: RunConfig, hist: HistoricalEmissions | None = None,
                    first_year: int = DEBT_FIRST_YEAR, evaluation_year: int = DEBT_YEAR,
                    workers: int | None = None) -> DebtLedger:
    """Damages to the evaluation year from emissions since ``first_year``, with interest.

    Past damages are not discounted; they are compounded forward at each
    country's Ramsey rate along the realized income path.
    """
    hist = hist if hist is not None else config.history
    if hist is None:
        raise DataError("historical debt needs historical emissions")
    if not hist.covers(first_year, evaluation_year):
        raise DataError(
            f"historical emissions cover {hist.start_year}-{hist.end_year}, need {first_year}-{evaluation_year}"
        )
    config = config.with_(history=hist)
    base = run_baseline(config)
    compound = ramsey_rates(base, config.prtp, config.emuc).compound_factors(evaluation_year)
    years = list(range(first_year, evaluation_year + 1))
    jobs = [(config, base, t, evaluation_year, compound) for t in years]
    workers = default_workers() if workers is None else workers
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_marginal_debt_row, jobs))
    else:
        rows = [_marginal_debt_row(j) for j in jobs]
    marginal = np.column_stack(rows)
    idx = [hist.countries.index(c) for c in base.countries]
    h0 = hist.start_year
    emissions = hist.emissions[idx][:, first_year - h0:evaluation_year - h0 + 1]
    return DebtLedger(
        countries=base.countries,
        emission_years=np.array(years),
        evaluation_year=evaluation_year,
        marginal=marginal,
        emissions=emissions,
        gdp=base.gdp_gross[:, base.index(evaluation_year)],
    )


# -- output -----------------------------------------------------------------


def _order(countries):
    return sorted(range(len(countries)), key=lambda k: countries[k])


def write_liability(report: LiabilityReport, path) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["country", "harm_done_usd", "damage_suffered_usd", "net_liability_usd", "net_liability_over_gdp"])
        for k in _order(report.countries):
            w.writerow([report.countries[k], repr(float(report.harm_done[k])), repr(float(report.damage_suffered[k])),
                        repr(float(report.net_liability[k])), repr(float(report.net_over_gdp[k]))])
    return path


def write_debt(ledger: DebtLedger, path, marginal_path) -> tuple[Path, Path]:
    path, marginal_path = Path(path), Path(marginal_path)
    gross, net = ledger.gross_debt, ledger.net_debt
    harm, dmg, msum = ledger.harm_done, ledger.damage_suffered, ledger.marginal_sum
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["country", "gross_debt_usd", "net_debt_usd", "harm_done_usd", "damage_suffered_usd",
                    "marginal_debt_sum_usd_per_tc"])
        for k in _order(ledger.countries):
            w.writerow([ledger.countries[k], *(repr(float(a[k])) for a in (gross, net, harm, dmg, msum))])
    with open(marginal_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["emission_year", "marginal_debt_usd_per_tc"])
        for t, d in zip(ledger.emission_years, ledger.marginal_global):
            w.writerow([int(t), repr(float(d))])
    return path, marginal_path
