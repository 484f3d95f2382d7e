"""Exogenous-path economy: output, income and emissions per country.

Gross output follows the scenario (population times per-capita income).
Climate impacts reduce net output in the year they occur and never feed back
into later gross output or emissions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, NumericalAbort
from .scenario import Scenario
from .units import PERSONS_PER_MILLION, TC_PER_MTC


@dataclass(frozen=True)
class CountryYearState:
    """One year of the economy, arrays aligned with ``countries``."""

    countries: tuple[str, ...]
    year: int
    population: np.ndarray  # millions
    gdp_gross: np.ndarray  # USD-2005/yr
    gdp_net: np.ndarray
    income_per_capita: np.ndarray  # USD-2005/person/yr
    emissions: np.ndarray  # MtC/yr
    impact_fraction: np.ndarray  # negative = damage


def check_impacts(impact_fraction, where="") -> None:
    impact_fraction = np.asarray(impact_fraction)
    if np.any(impact_fraction <= -1.0) or not np.all(np.isfinite(impact_fraction)):
        worst = float(np.nanmin(impact_fraction))
        raise NumericalAbort(f"impacts of {worst:.3g} x GDP annihilate the economy{where}")


def gross_output(scenario: Scenario) -> np.ndarray:
    return scenario.gdp


def emissions_from_output(gdp_gross, carbon_intensity) -> np.ndarray:
    """MtC/yr from USD/yr and tC/USD."""
    return np.asarray(gdp_gross) * np.asarray(carbon_intensity) / TC_PER_MTC


def advance_economy(scenario: Scenario, year: int, impacts=None) -> CountryYearState:
    j = scenario.year_index(year)
    gross = scenario.gdp[:, j]
    if impacts is None:
        impacts = np.zeros(len(scenario.countries))
    impacts = np.asarray(impacts, dtype=float)
    if impacts.shape != gross.shape:
        raise DataError(f"expected {gross.shape[0]} impact values, got {impacts.shape}")
    check_impacts(impacts, f" in {year}")
    return CountryYearState(
        countries=scenario.countries,
        year=int(year),
        population=scenario.population[:, j].copy(),
        gdp_gross=gross.copy(),
        gdp_net=gross * (1.0 + impacts),
        income_per_capita=scenario.income[:, j].copy(),
        emissions=emissions_from_output(gross, scenario.carbon_intensity[:, j]),
        impact_fraction=impacts,
    )


def world_growth_rate(states: CountryYearState, prev: CountryYearState) -> np.ndarray:
    """Per-capita income growth of each country between ``prev`` and ``states``."""
    if states.countries != prev.countries:
        raise DataError("country sets differ between years")
    return states.income_per_capita / prev.income_per_capita - 1.0


def world_income(states: CountryYearState) -> float:
    """World average per-capita income, USD-2005/person/yr."""
    return float(states.gdp_gross.sum() / (states.population.sum() * PERSONS_PER_MILLION))


def world_income_growth(states: CountryYearState, prev: CountryYearState) -> float:
    """Growth of world average income built from country growth rates.

    World per-capita growth is the output-share-weighted mean of each country's
    combined income and population growth, deflated by world population growth.
    """
    g = world_growth_rate(states, prev)
    n = states.population / prev.population - 1.0
    share = prev.gdp_gross / prev.gdp_gross.sum()
    n_world = states.population.sum() / prev.population.sum() - 1.0
    return float(np.sum(share * (1.0 + g) * (1.0 + n)) / (1.0 + n_world) - 1.0)
