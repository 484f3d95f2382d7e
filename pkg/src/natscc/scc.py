"""Baseline runs, Ramsey discounting and pulse-based social costs of carbon."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import economy
from .climate import ClimateParams, simulate_climate
from .errors import ConfigError, DataError, NumericalAbort
from .impacts import T_MAX, T_MIN, BmaImpact, DownscalingParams, calibrate_vulnerability, downscale_panel, table_bma
from .scenario import HistoricalEmissions, Scenario, apply_convergence
from .units import MTC_PER_GTC, TC_PER_MTC


@dataclass(frozen=True)
class RunConfig:
    scenario: Scenario
    prtp: float = 0.015
    emuc: float = 1.5
    climate: ClimateParams = field(default_factory=ClimateParams)
    impact: BmaImpact = field(default_factory=table_bma)
    downscaling: DownscalingParams = field(default_factory=DownscalingParams)
    pulse_year: int = 2010
    pulse_size: float = 10.0  # MtC
    horizon_year: int | None = None  # default: scenario end
    convergence: bool | None = None  # None: use the scenario as stored
    convergence_from_year: int = 2010
    history: HistoricalEmissions | None = None

    def __post_init__(self):
        if not 0.0 <= self.prtp <= 0.10:
            raise ConfigError(f"prtp must lie in [0, 0.10], got {self.prtp}")
        if not 0.0 < self.emuc <= 5.0:
            raise ConfigError(f"emuc must lie in (0, 5], got {self.emuc}")
        if not self.pulse_size > 0:
            raise ConfigError(f"pulse_size must be > 0, got {self.pulse_size}")
        s = self.scenario
        if not s.start_year <= self.pulse_year < self.horizon:
            raise ConfigError(f"pulse_year {self.pulse_year} must lie in [{s.start_year}, {self.horizon})")
        if self.horizon > s.end_year:
            raise ConfigError(f"horizon_year {self.horizon} beyond scenario end {s.end_year}")
        if not s.start_year <= self.downscaling.calibration_year <= s.end_year:
            raise ConfigError(f"calibration_year {self.downscaling.calibration_year} outside the scenario")
        if self.convergence is True and not s.convergence:
            raise ConfigError(
                f"scenario {s.id!r} has no income convergence; it cannot be switched on, only off"
            )

    @property
    def horizon(self) -> int:
        return self.scenario.end_year if self.horizon_year is None else int(self.horizon_year)

    def with_(self, **changes) -> "RunConfig":
        return replace(self, **changes)

    def effective_scenario(self) -> Scenario:
        s = self.scenario
        if self.convergence is False and s.convergence:
            return apply_convergence(s, s.end_year - self.convergence_from_year, self.convergence_from_year)
        return s

    def describe(self) -> dict:
        """Every effective parameter, JSON-serializable (scenario data by digest)."""
        climate = asdict(self.climate)
        climate["box_lifetimes"] = [repr(x) for x in self.climate.box_lifetimes]
        return {
            "scenario": {"id": self.scenario.id, "digest": self.scenario.digest(),
                         "stored_convergence": self.scenario.convergence},
            "history": None if self.history is None else _history_digest(self.history),
            "prtp": self.prtp,
            "emuc": self.emuc,
            "climate": climate,
            "impact": {
                "name": self.impact.name,
                "scale": self.impact.scale,
                "members": [[f.form, list(f.params), w] for f, w in self.impact.members],
            },
            "downscaling": asdict(self.downscaling),
            "pulse_year": self.pulse_year,
            "pulse_size": self.pulse_size,
            "horizon_year": self.horizon,
            "convergence": self.scenario.convergence if self.convergence is None else self.convergence,
            "convergence_from_year": self.convergence_from_year,
        }


def _history_digest(h: HistoricalEmissions) -> str:
    m = hashlib.sha256()
    m.update(",".join(h.countries).encode())
    m.update(np.ascontiguousarray(h.years.astype(np.int64)).tobytes())
    m.update(np.ascontiguousarray(h.emissions).tobytes())
    return m.hexdigest()[:16]


def config_hash(config: RunConfig, exclude: tuple[str, ...] = ()) -> str:
    d = config.describe()
    for key in exclude:
        d.pop(key, None)
    blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


# -- trajectories -------------------------------------------------------------


@dataclass(frozen=True)
class WorldTrajectory:
    """Annual model state; per-country arrays are (n_countries, n_years)."""

    countries: tuple[str, ...]
    years: np.ndarray
    population: np.ndarray
    income: np.ndarray
    gdp_gross: np.ndarray
    emissions: np.ndarray  # MtC/yr by country
    global_emissions: np.ndarray  # GtC/yr, including any pulse
    box_masses: np.ndarray
    concentration: np.ndarray
    temperature: np.ndarray
    global_impact: np.ndarray  # fraction of world GDP, before downscaling
    impact_fraction: np.ndarray
    gdp_net: np.ndarray
    damages: np.ndarray  # USD/yr, = -impact_fraction * gdp_gross

    def index(self, year: int) -> int:
        j = int(year) - int(self.years[0])
        if not 0 <= j < len(self.years):
            raise DataError(f"year {year} outside trajectory {self.years[0]}-{self.years[-1]}")
        return j

    def state(self, year: int) -> economy.CountryYearState:
        j = self.index(year)
        return economy.CountryYearState(
            countries=self.countries,
            year=int(year),
            population=self.population[:, j],
            gdp_gross=self.gdp_gross[:, j],
            gdp_net=self.gdp_net[:, j],
            income_per_capita=self.income[:, j],
            emissions=self.emissions[:, j],
            impact_fraction=self.impact_fraction[:, j],
        )

    @property
    def cumulative_emissions(self) -> np.ndarray:
        """GtC since the start of the run."""
        return np.cumsum(self.global_emissions)


def country_emissions(config: RunConfig, scenario: Scenario) -> np.ndarray:
    """Scenario emissions, with recorded history substituted where available."""
    em = economy.emissions_from_output(scenario.gdp, scenario.carbon_intensity)
    h = config.history
    if h is None:
        return em
    if set(h.countries) != set(scenario.countries):
        missing = sorted(set(scenario.countries) ^ set(h.countries))
        raise DataError(f"historical emissions and scenario cover different countries: {missing[:5]}")
    first = max(h.start_year, scenario.start_year)
    last = min(h.end_year, scenario.end_year)
    if first > last:
        return em
    em = em.copy()
    rows = [h.countries.index(c) for c in scenario.countries]
    em[:, first - scenario.start_year:last - scenario.start_year + 1] = (
        h.emissions[rows][:, first - h.start_year:last - h.start_year + 1]
    )
    return em


def _simulate(config: RunConfig, scenario: Scenario, emissions: np.ndarray, pulse_year=None, pulse_mtc=0.0):
    years = scenario.years
    global_gtc = emissions.sum(axis=0) / MTC_PER_GTC
    if pulse_year is not None:
        global_gtc = global_gtc.copy()
        global_gtc[scenario.year_index(pulse_year)] += pulse_mtc / MTC_PER_GTC
    path = simulate_climate(global_gtc, config.climate)
    out = (path.temperature < T_MIN) | (path.temperature > T_MAX)
    if np.any(out):
        j = int(np.argmax(out))
        raise NumericalAbort(
            f"warming of {path.temperature[j]:.2f} degC in {years[j]} leaves the impact functions' range"
        )
    gdp = scenario.gdp
    global_impact = config.impact(path.temperature)
    ds = config.downscaling
    if ds.mode == "annual":
        impact = downscale_panel(global_impact, gdp, scenario.population, scenario.income, ds.income_elasticity)
    else:
        cal = calibrate_vulnerability(economy.advance_economy(scenario, ds.calibration_year), ds)
        impact = cal.apply(global_impact, scenario.income)
    bad = np.argwhere(~(impact > -1.0))
    if len(bad):
        i, j = bad[0]
        economy.check_impacts(impact[i, j], f" for {scenario.countries[i]} in {years[j]}")
    return WorldTrajectory(
        countries=scenario.countries,
        years=years,
        population=scenario.population,
        income=scenario.income,
        gdp_gross=gdp,
        emissions=emissions,
        global_emissions=global_gtc,
        box_masses=path.box_masses,
        concentration=path.concentration,
        temperature=path.temperature,
        global_impact=np.asarray(global_impact),
        impact_fraction=impact,
        gdp_net=gdp * (1.0 + impact),
        damages=-impact * gdp,
    )


def run_baseline(config: RunConfig) -> WorldTrajectory:
    s = config.effective_scenario()
    return _simulate(config, s, country_emissions(config, s))


def run_pulse(config: RunConfig, pulse_year: int, pulse_mtc: float | None = None) -> WorldTrajectory:
    """Baseline plus an extra ``pulse_mtc`` of global emissions in ``pulse_year``."""
    s = config.effective_scenario()
    size = config.pulse_size if pulse_mtc is None else pulse_mtc
    return _simulate(config, s, country_emissions(config, s), pulse_year, size)


# -- discounting --------------------------------------------------------------


@dataclass(frozen=True)
class DiscountSchedule:
    countries: tuple[str, ...]
    years: np.ndarray
    rates: np.ndarray  # (n_countries, n_years)

    def __post_init__(self):
        if np.any(1.0 + self.rates <= 0):
            raise DataError("discount rate at or below -100%")

    def discount_factors(self, from_year: int) -> np.ndarray:
        """prod_{u=from+1..s} 1/(1+r_u) for s >= from_year; zero before."""
        j0 = int(from_year) - int(self.years[0])
        out = np.zeros_like(self.rates)
        out[:, j0] = 1.0
        out[:, j0 + 1:] = np.cumprod(1.0 / (1.0 + self.rates[:, j0 + 1:]), axis=1)
        return out

    def compound_factors(self, to_year: int) -> np.ndarray:
        """prod_{u=s+1..to} (1+r_u) for s <= to_year; zero after."""
        j1 = int(to_year) - int(self.years[0])
        out = np.zeros_like(self.rates)
        out[:, j1] = 1.0
        if j1 > 0:
            growth = (1.0 + self.rates[:, 1:j1 + 1])[:, ::-1]
            out[:, :j1] = np.cumprod(growth, axis=1)[:, ::-1]
        return out


def ramsey_rates(traj: WorldTrajectory, prtp: float, emuc: float) -> DiscountSchedule:
    """r = prtp + emuc * g, with g the country's per-capita income growth."""
    inc = traj.income
    g = np.empty_like(inc)
    g[:, 1:] = inc[:, 1:] / inc[:, :-1] - 1.0
    g[:, 0] = g[:, 1]  # never used for discounting; keeps the schedule well-defined
    return DiscountSchedule(traj.countries, traj.years, prtp + emuc * g)


# -- SCC ----------------------------------------------------------------------


@dataclass(frozen=True)
class SccTable:
    countries: tuple[str, ...]
    scc: np.ndarray  # USD-2005 per tC
    global_scc: float
    pulse_year: int
    config_hash: str = ""
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        total = math.fsum(self.scc)
        if abs(total - self.global_scc) > 1e-9 * max(abs(total), abs(self.global_scc), 1e-300):
            raise ArithmeticError(f"national SCCs sum to {total!r}, global SCC is {self.global_scc!r}")

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.countries, map(float, self.scc)))


def marginal_damages(base: WorldTrajectory, pulsed: WorldTrajectory, pulse_tc: float) -> np.ndarray:
    """Extra damages per tonne, USD/tC per year, (n_countries, n_years)."""
    return (pulsed.damages - base.damages) / pulse_tc


def compute_scc(config: RunConfig, baseline: WorldTrajectory | None = None,
                pulse_year: int | None = None, pulse_size: float | None = None) -> SccTable:
    """National SCCs: discounted marginal damages after the pulse year, to the horizon."""
    base = run_baseline(config) if baseline is None else baseline
    p = config.pulse_year if pulse_year is None else int(pulse_year)
    size = config.pulse_size if pulse_size is None else float(pulse_size)
    if not base.years[0] <= p < config.horizon:
        raise ConfigError(f"pulse year {p} outside [{base.years[0]}, {config.horizon})")
    pulsed = run_pulse(config, p, size)
    dd = marginal_damages(base, pulsed, size * TC_PER_MTC)
    df = ramsey_rates(base, config.prtp, config.emuc).discount_factors(p)
    j0, j1 = base.index(p) + 1, base.index(config.horizon) + 1
    pv = dd[:, j0:j1] * df[:, j0:j1]
    national = pv.sum(axis=1)
    # global total accumulated year by year (other summation order) to cross-check the Lindahl sum
    global_scc = math.fsum(pv.sum(axis=0))
    last = pv[:, -10:].sum()
    diagnostics = {
        "truncation_last_decade_share": float(last / pv.sum()) if pv.sum() else 0.0,
        "temperature_at_pulse": float(base.temperature[base.index(p)]),
    }
    return SccTable(base.countries, national, global_scc, p, config_hash(replace(config, pulse_year=p, pulse_size=size)),
                    diagnostics)


def scc_path(config: RunConfig, years, baseline: WorldTrajectory | None = None) -> list[SccTable]:
    base = run_baseline(config) if baseline is None else baseline
    return [compute_scc(config, base, pulse_year=y) for y in years]


def scc_growth(first: SccTable, last: SccTable) -> np.ndarray:
    """Annualized growth of each national SCC between two pulse years."""
    span = last.pulse_year - first.pulse_year
    if span <= 0:
        raise ConfigError("scc growth needs an increasing pair of pulse years")
    with np.errstate(divide="ignore", invalid="ignore"):
        return (last.scc / first.scc) ** (1.0 / span) - 1.0
