"""Per-country exogenous scenarios and historical emissions.

A scenario is a pair of files: a CSV with one row per (country, year) and a
TOML sidecar with the same stem holding the scenario id, the convergence flag
and free-form notes.  See ``docs/scenario_format.md`` for the layout.
"""

from __future__ import annotations

import csv
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .errors import DataError
from .units import PERSONS_PER_MILLION

log = logging.getLogger(__name__)

SCENARIO_HEADER = (
    "country",
    "year",
    "population_millions",
    "income_per_capita_usd2005",
    "carbon_intensity_tc_per_usd",
)
HISTORY_HEADER = ("country", "year", "emissions_mtc")

MIN_SPAN_YEARS = 100
HISTORY_FIRST_YEAR = 1960

_ISO3 = re.compile(r"^[A-Z]{3}$")


@dataclass(frozen=True)
class CountryRecord:
    country_id: str
    name: str = ""

    def __post_init__(self):
        if not _ISO3.match(self.country_id):
            raise DataError(f"country code {self.country_id!r} is not three uppercase letters")


def _freeze(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Scenario:
    """Exogenous trajectories, arrays shaped (n_countries, n_years)."""

    id: str
    countries: tuple[str, ...]
    years: np.ndarray
    population: np.ndarray  # millions
    income: np.ndarray  # USD-2005 per person per year
    carbon_intensity: np.ndarray  # tC per USD-2005
    convergence: bool = True
    names: dict[str, str] = field(default_factory=dict)
    notes: str = ""

    def __post_init__(self):
        years = np.asarray(self.years, dtype=int)
        years.setflags(write=False)
        object.__setattr__(self, "years", years)
        object.__setattr__(self, "countries", tuple(self.countries))
        for name in ("population", "income", "carbon_intensity"):
            object.__setattr__(self, name, _freeze(getattr(self, name)))
        self.validate()

    @property
    def start_year(self) -> int:
        return int(self.years[0])

    @property
    def end_year(self) -> int:
        return int(self.years[-1])

    @property
    def gdp(self) -> np.ndarray:
        """Gross output, USD-2005 per year."""
        return self.population * PERSONS_PER_MILLION * self.income

    def year_index(self, year: int) -> int:
        if not self.start_year <= year <= self.end_year:
            raise DataError(f"year {year} outside scenario {self.id!r} ({self.start_year}-{self.end_year})")
        return int(year - self.start_year)

    def records(self) -> list[CountryRecord]:
        return [CountryRecord(c, self.names.get(c, "")) for c in self.countries]

    def validate(self) -> None:
        n_c, n_y = len(self.countries), len(self.years)
        if n_c == 0:
            raise DataError("scenario has no countries")
        if len(set(self.countries)) != n_c:
            raise DataError("duplicate country codes in scenario")
        for c in self.countries:
            CountryRecord(c)
        if np.any(np.diff(self.years) != 1):
            raise DataError("scenario years are not a contiguous annual grid")
        if self.end_year - self.start_year < MIN_SPAN_YEARS:
            raise DataError(
                f"scenario spans {self.start_year}-{self.end_year}; at least {MIN_SPAN_YEARS} years are needed"
            )
        for name in ("population", "income", "carbon_intensity"):
            a = getattr(self, name)
            if a.shape != (n_c, n_y):
                raise DataError(f"{name} has shape {a.shape}, expected {(n_c, n_y)}")
            if not np.all(np.isfinite(a)):
                i, j = np.argwhere(~np.isfinite(a))[0]
                raise DataError(f"{name} is not finite for {self.countries[i]} {self.years[j]}")
        for name, arr, strict in (
            ("population", self.population, True),
            ("per_capita_income", self.income, True),
            ("carbon_intensity", self.carbon_intensity, False),
        ):
            bad = arr <= 0 if strict else arr < 0
            if np.any(bad):
                i, j = np.argwhere(bad)[0]
                rel = "> 0" if strict else ">= 0"
                raise DataError(
                    f"{name} must be {rel}: {self.countries[i]} {self.years[j]} has {arr[i, j]!r}"
                )

    def replace(self, **changes) -> "Scenario":
        kw = dict(
            id=self.id,
            countries=self.countries,
            years=self.years,
            population=self.population,
            income=self.income,
            carbon_intensity=self.carbon_intensity,
            convergence=self.convergence,
            names=dict(self.names),
            notes=self.notes,
        )
        kw.update(changes)
        return Scenario(**kw)

    def digest(self) -> str:
        """Content hash of the numeric data (used in config hashes)."""
        import hashlib

        h = hashlib.sha256()
        h.update(",".join(self.countries).encode())
        for a in (self.years.astype(np.int64), self.population, self.income, self.carbon_intensity):
            h.update(np.ascontiguousarray(a).tobytes())
        return h.hexdigest()[:16]


@dataclass(frozen=True)
class HistoricalEmissions:
    countries: tuple[str, ...]
    years: np.ndarray
    emissions: np.ndarray  # MtC per year, (n_countries, n_years)

    def __post_init__(self):
        years = np.asarray(self.years, dtype=int)
        years.setflags(write=False)
        object.__setattr__(self, "years", years)
        object.__setattr__(self, "countries", tuple(self.countries))
        object.__setattr__(self, "emissions", _freeze(self.emissions))
        if np.any(np.diff(self.years) != 1):
            raise DataError("historical emission years are not contiguous")
        if len(self.years) and self.years[0] < HISTORY_FIRST_YEAR:
            raise DataError(f"historical emissions start before {HISTORY_FIRST_YEAR}")
        if self.emissions.shape != (len(self.countries), len(self.years)):
            raise DataError("historical emissions array has the wrong shape")
        bad = ~np.isfinite(self.emissions) | (self.emissions < 0)
        if np.any(bad):
            i, j = np.argwhere(bad)[0]
            raise DataError(f"emissions must be >= 0: {self.countries[i]} {self.years[j]}")

    @property
    def start_year(self) -> int:
        return int(self.years[0])

    @property
    def end_year(self) -> int:
        return int(self.years[-1])

    def covers(self, first: int, last: int) -> bool:
        return len(self.years) > 0 and self.start_year <= first and self.end_year >= last


# -- reading --------------------------------------------------------------


def _read_rows(path: Path, header: tuple[str, ...]):
    """Yield (line_number, fields) for each data row; header must match exactly."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if tuple(h.strip() for h in first) != header:
            raise DataError(f"{path}:1: expected header {','.join(header)!r}, got {','.join(first)!r}")
        for row in reader:
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(f"{path}:{reader.line_num}: expected {len(header)} fields, got {len(row)}")
            yield reader.line_num, row


def _parse_panel(path: Path, header: tuple[str, ...]):
    """Parse a country/year panel into {country: {year: tuple_of_floats}}."""
    panel: dict[str, dict[int, tuple[float, ...]]] = {}
    for line, row in _read_rows(path, header):
        code = row[0].strip()
        if not _ISO3.match(code):
            raise DataError(f"{path}:{line}: bad country code {code!r}")
        try:
            year = int(row[1])
            values = tuple(float(v) for v in row[2:])
        except ValueError as exc:
            raise DataError(f"{path}:{line}: malformed row ({exc})") from None
        by_year = panel.setdefault(code, {})
        if year in by_year:
            raise DataError(f"{path}:{line}: duplicate row for {code} {year}")
        by_year[year] = values
    if not panel:
        raise DataError(f"{path}: no data rows")
    return panel


def _panel_grid(path: Path, panel, what: str):
    first = min(min(d) for d in panel.values())
    last = max(max(d) for d in panel.values())
    years = np.arange(first, last + 1)
    countries = sorted(panel)
    for c in countries:
        missing = [y for y in years if y not in panel[c]]
        if missing:
            raise DataError(
                f"{path}: {what} for {c} is not contiguous {first}-{last}; missing year {missing[0]}"
                + (f" (+{len(missing) - 1} more)" if len(missing) > 1 else "")
            )
    return countries, years


def sidecar_path(csv_path) -> Path:
    return Path(csv_path).with_suffix(".toml")


def load_scenario(path) -> Scenario:
    """Load and validate a scenario CSV (plus its optional TOML sidecar)."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"scenario file not found: {path}")
    panel = _parse_panel(path, SCENARIO_HEADER)
    countries, years = _panel_grid(path, panel, "scenario")
    data = np.array([[panel[c][y] for y in years] for c in countries])  # (c, y, 3)

    meta = {}
    side = sidecar_path(path)
    if side.exists():
        with open(side, "rb") as fh:
            try:
                meta = tomllib.load(fh)
            except tomllib.TOMLDecodeError as exc:
                raise DataError(f"{side}: {exc}") from None
    # per-row invariants reported with the offending country/year before the generic check
    for k, label in ((0, "population"), (1, "per_capita_income")):
        bad = np.argwhere(data[:, :, k] <= 0)
        if len(bad):
            i, j = bad[0]
            raise DataError(f"{path}: {label} must be > 0 for {countries[i]} {years[j]}")
    return Scenario(
        id=str(meta.get("id", path.stem)),
        countries=countries,
        years=years,
        population=data[:, :, 0],
        income=data[:, :, 1],
        carbon_intensity=data[:, :, 2],
        convergence=bool(meta.get("convergence", True)),
        names={k: str(v) for k, v in meta.get("names", {}).items()},
        notes=str(meta.get("notes", "")),
    )


def load_historical(path) -> HistoricalEmissions:
    """Load historical emissions (MtC/yr). Rows before 1960 are dropped."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"historical emissions file not found: {path}")
    panel = _parse_panel(path, HISTORY_HEADER)
    dropped = 0
    for c in list(panel):
        early = [y for y in panel[c] if y < HISTORY_FIRST_YEAR]
        dropped += len(early)
        for y in early:
            del panel[c][y]
        if not panel[c]:
            del panel[c]
    if dropped:
        log.warning("%s: ignored %d rows before %d", path, dropped, HISTORY_FIRST_YEAR)
    if not panel:
        raise DataError(f"{path}: no historical emissions from {HISTORY_FIRST_YEAR} on")
    countries, years = _panel_grid(path, panel, "historical emissions")
    em = np.array([[panel[c][y][0] for y in years] for c in countries])
    bad = np.argwhere(em < 0)
    if len(bad):
        i, j = bad[0]
        raise DataError(f"{path}: emissions must be >= 0 for {countries[i]} {years[j]}")
    return HistoricalEmissions(countries, years, em)


# -- writing --------------------------------------------------------------


def _fmt(x: float) -> str:
    return repr(float(x))


def _toml_str(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def write_scenario(s: Scenario, path) -> Path:
    """Write the canonical CSV (sorted by country, then year) and its sidecar."""
    path = Path(path)
    order = np.argsort(np.array(s.countries))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SCENARIO_HEADER)
        for i in order:
            c = s.countries[i]
            for j, y in enumerate(s.years):
                w.writerow(
                    [c, int(y), _fmt(s.population[i, j]), _fmt(s.income[i, j]), _fmt(s.carbon_intensity[i, j])]
                )
    lines = [
        f"id = {_toml_str(s.id)}",
        f"convergence = {'true' if s.convergence else 'false'}",
        f"notes = {_toml_str(s.notes)}",
    ]
    if s.names:
        lines += ["", "[names]"] + [f"{c} = {_toml_str(s.names[c])}" for c in sorted(s.names)]
    sidecar_path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_historical(h: HistoricalEmissions, path) -> Path:
    path = Path(path)
    order = np.argsort(np.array(h.countries))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HISTORY_HEADER)
        for i in order:
            for j, y in enumerate(h.years):
                w.writerow([h.countries[i], int(y), _fmt(h.emissions[i, j])])
    return path


# -- transforms -----------------------------------------------------------


def growth_rates(income: np.ndarray) -> np.ndarray:
    """Year-on-year growth along the last axis; the first column is 0."""
    g = np.zeros_like(income, dtype=float)
    g[..., 1:] = income[..., 1:] / income[..., :-1] - 1.0
    return g


def apply_convergence(s: Scenario, horizon_years: int, from_year: int | None = None) -> Scenario:
    """Converge every country's per-capita growth rate onto the world rate.

    From ``from_year`` (default: scenario start) the growth rate of each country
    moves linearly from its own rate to the output-weighted world rate, reaching
    it after ``horizon_years``.  Each year incomes are rescaled by a common
    factor so that world output equals that of the input scenario.  Population
    and carbon intensity are untouched.
    """
    if horizon_years <= 0:
        raise DataError(f"horizon_years must be positive, got {horizon_years}")
    from_year = s.start_year if from_year is None else int(from_year)
    j0 = s.year_index(from_year)

    gdp = s.gdp
    world_gdp = gdp.sum(axis=0)
    g_own = growth_rates(s.income)
    weights = gdp[:, :-1] / world_gdp[:-1]
    g_world = np.zeros(len(s.years))
    g_world[1:] = (weights * g_own[:, 1:]).sum(axis=0)

    income = np.array(s.income, dtype=float)
    pop_persons = s.population * PERSONS_PER_MILLION
    for j in range(j0 + 1, len(s.years)):
        blend = min(1.0, (j - j0) / horizon_years)
        g = (1.0 - blend) * g_own[:, j] + blend * g_world[j]
        y = income[:, j - 1] * (1.0 + g)
        income[:, j] = y * (world_gdp[j] / (pop_persons[:, j] * y).sum())
    return s.replace(income=income, convergence=False, notes=(s.notes + f" [growth converged over {horizon_years}y from {from_year}]").strip())
