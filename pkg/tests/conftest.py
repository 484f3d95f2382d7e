from __future__ import annotations

import numpy as np
import pytest

from natscc.config import data_dir, load_settings
from natscc.scc import RunConfig, run_baseline
from natscc.scenario import HistoricalEmissions, Scenario, load_historical, load_scenario

ACCEPTANCE_RESULTS: dict[int, tuple[str, str]] = {}


def toy_scenario(n_countries=2, start=1950, end=2100, income=None, population=None, intensity=1e-4,
                 growth=0.02, convergence=True, sid="toy") -> Scenario:
    years = np.arange(start, end + 1)
    codes = [f"T{chr(65 + k // 26)}{chr(65 + k % 26)}" for k in range(n_countries)]
    inc0 = np.asarray(income if income is not None else np.linspace(1000, 30000, n_countries), dtype=float)
    pop0 = np.asarray(population if population is not None else np.full(n_countries, 50.0), dtype=float)
    t = years - start
    inc = inc0[:, None] * (1.0 + growth) ** t[None, :]
    pop = np.repeat(pop0[:, None], len(years), axis=1)
    ci = np.full((n_countries, len(years)), float(intensity))
    return Scenario(sid, codes, years, pop, inc, ci, convergence=convergence)


@pytest.fixture(scope="session")
def central() -> Scenario:
    return load_scenario(data_dir() / "synthetic_central.csv")


@pytest.fixture(scope="session")
def history() -> HistoricalEmissions:
    return load_historical(data_dir() / "synthetic_history.csv")


@pytest.fixture(scope="session")
def settings():
    return load_settings()


@pytest.fixture(scope="session")
def config(settings) -> RunConfig:
    return settings.run


@pytest.fixture(scope="session")
def baseline(config):
    return run_baseline(config)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_RESULTS):
        status, detail = ACCEPTANCE_RESULTS[k]
        terminalreporter.write_line(f"criterion {k:2d}: {status:4s} {detail}")
