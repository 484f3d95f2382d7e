"""Desk-scale synthetic scenarios shipped with the package.

Twenty fictional countries (user-assigned ISO codes XAA..XAT) spanning the
world income distribution, calibrated so that in 2010 world GDP is 60 trillion
USD-2005 and emissions are 10 GtC.  None of the numbers describe real countries.

Regenerate the shipped files with ``python -m natscc.synthetic <outdir>``.
"""

from __future__ import annotations

import argparse
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .scenario import HistoricalEmissions, Scenario, write_historical, write_scenario
from .units import PERSONS_PER_MILLION, TC_PER_GTC, TC_PER_MTC

START, END, BASE = 1950, 2300, 2010
WORLD_GDP_2010 = 60e12
WORLD_EMISSIONS_2010 = 10.0  # GtC

# code, name, population 2010 (M), income 2010 (relative), carbon intensity (relative), population growth 2010
COUNTRIES = [
    ("XAA", "Synthetic Aldora", 80, 350, 0.6, 0.028),
    ("XAB", "Synthetic Brevia", 45, 500, 0.6, 0.027),
    ("XAC", "Synthetic Caldis", 160, 800, 0.8, 0.025),
    ("XAD", "Synthetic Dunmar", 95, 1100, 0.9, 0.024),
    ("XAE", "Synthetic Elvaria", 1200, 1300, 1.1, 0.014),
    ("XAF", "Synthetic Fenwick", 240, 2000, 1.2, 0.013),
    ("XAG", "Synthetic Galdor", 150, 2600, 1.4, 0.012),
    ("XAH", "Synthetic Hestia", 1340, 3500, 3.0, 0.005),
    ("XAI", "Synthetic Ithaka", 200, 4200, 1.3, 0.011),
    ("XAJ", "Synthetic Jorvik", 110, 5500, 1.6, 0.010),
    ("XAK", "Synthetic Kresnia", 140, 7000, 3.5, -0.001),
    ("XAL", "Synthetic Lunara", 50, 9000, 1.8, 0.006),
    ("XAM", "Synthetic Morvia", 75, 11000, 1.5, 0.008),
    ("XAN", "Synthetic Nadir", 30, 14000, 3.0, 0.020),
    ("XAO", "Synthetic Orsova", 190, 6000, 0.9, 0.009),
    ("XAP", "Synthetic Pellam", 310, 42000, 0.75, 0.008),
    ("XAQ", "Synthetic Quorra", 127, 38000, 0.45, -0.001),
    ("XAR", "Synthetic Rhenis", 82, 35000, 0.5, 0.000),
    ("XAS", "Synthetic Savoy", 65, 33000, 0.35, 0.005),
    ("XAT", "Synthetic Tellur", 8, 55000, 0.25, 0.007),
]


@dataclass(frozen=True)
class Variant:
    id: str
    label: str
    frontier_growth: float = 0.018  # per-capita, 2010
    frontier_growth_long: float = 0.011
    catch_up: float = 0.005  # extra growth per unit log income gap to the richest
    decarbonization: float = 0.015  # 2010 rate of carbon-intensity decline
    decarbonization_long: float = 0.025
    population_scale: float = 1.0  # multiplies population growth rates


VARIANTS = {
    "synthetic_central": Variant("synthetic_central", "central synthetic scenario (default)"),
    "synthetic_low_growth": Variant(
        "synthetic_low_growth", "low growth, slow decarbonization (A2-like, synthetic)",
        frontier_growth=0.012, frontier_growth_long=0.008, catch_up=0.002,
        decarbonization=0.008, decarbonization_long=0.016, population_scale=1.5,
    ),
    "synthetic_high_growth": Variant(
        "synthetic_high_growth", "high growth, fossil-rich (SSP5-like, synthetic)",
        frontier_growth=0.024, frontier_growth_long=0.015, catch_up=0.008,
        decarbonization=0.012, decarbonization_long=0.03, population_scale=0.7,
    ),
}

PAST_GROWTH = 0.024
PAST_DECARBONIZATION = 0.010


def build(variant: Variant | str = "synthetic_central") -> Scenario:
    v = VARIANTS[variant] if isinstance(variant, str) else variant
    codes = [c[0] for c in COUNTRIES]
    pop0 = np.array([c[2] for c in COUNTRIES], dtype=float)
    inc0 = np.array([c[3] for c in COUNTRIES], dtype=float)
    ci0 = np.array([c[4] for c in COUNTRIES], dtype=float)
    n0 = np.array([c[5] for c in COUNTRIES], dtype=float)

    inc0 = inc0 * WORLD_GDP_2010 / np.sum(pop0 * PERSONS_PER_MILLION * inc0)
    gdp0 = pop0 * PERSONS_PER_MILLION * inc0
    ci0 = ci0 * WORLD_EMISSIONS_2010 * TC_PER_GTC / np.sum(gdp0 * ci0)

    years = np.arange(START, END + 1)
    nc, ny = len(codes), len(years)
    j0 = BASE - START
    pop = np.empty((nc, ny))
    inc = np.empty((nc, ny))
    ci = np.empty((nc, ny))
    pop[:, j0], inc[:, j0], ci[:, j0] = pop0, inc0, ci0

    for j in range(j0 + 1, ny):
        dt = years[j] - BASE
        frontier = v.frontier_growth_long + (v.frontier_growth - v.frontier_growth_long) * math.exp(-dt / 80.0)
        gap = np.log(inc[:, j - 1].max() / inc[:, j - 1])
        inc[:, j] = inc[:, j - 1] * (1.0 + frontier + v.catch_up * gap)
        pop[:, j] = pop[:, j - 1] * (1.0 + v.population_scale * n0 * math.exp(-dt / 40.0))
        d = v.decarbonization_long + (v.decarbonization - v.decarbonization_long) * math.exp(-dt / 50.0)
        ci[:, j] = ci[:, j - 1] * (1.0 - d)
    past_n = np.clip(n0, 0.004, None) + 0.004
    for j in range(j0 - 1, -1, -1):
        inc[:, j] = inc[:, j + 1] / (1.0 + PAST_GROWTH)
        pop[:, j] = pop[:, j + 1] / (1.0 + past_n)
        ci[:, j] = ci[:, j + 1] * (1.0 + PAST_DECARBONIZATION)

    # round to a fixed number of significant digits so the files stay readable
    pop, inc, ci = (np.array([[float(f"{x:.8g}") for x in row] for row in a]) for a in (pop, inc, ci))
    return Scenario(
        id=v.id,
        countries=codes,
        years=years,
        population=pop,
        income=inc,
        carbon_intensity=ci,
        convergence=True,
        names={c[0]: c[1] for c in COUNTRIES},
        notes=f"{v.label}; generated by natscc.synthetic; not real data",
    )


def build_history(s: Scenario, first: int = 1960, last: int = 2015) -> HistoricalEmissions:
    """Scenario emissions with a deterministic business-cycle wobble (+/-3%)."""
    j0, j1 = s.year_index(first), s.year_index(last)
    gdp = s.gdp[:, j0:j1 + 1]
    em = gdp * s.carbon_intensity[:, j0:j1 + 1] / TC_PER_MTC
    t = np.arange(first, last + 1)
    phase = np.arange(len(s.countries))[:, None] * 0.7
    em = em * (1.0 + 0.03 * np.sin(2 * np.pi * (t - first) / 9.0 + phase))
    em = np.array([[float(f"{x:.8g}") for x in row] for row in em])
    return HistoricalEmissions(s.countries, t, em)


def build_meta(n: int = 27) -> tuple[np.ndarray, np.ndarray]:
    """A synthetic meta-analysis: the published average curve plus deterministic scatter."""
    from .impacts import table_bma

    warming = np.round(np.linspace(0.5, 5.5, n), 2)
    base = table_bma().percent(warming)
    scatter = 0.6 * np.sin(np.arange(n) * 2.3) * (0.3 + warming / 5.0)
    return warming, np.round(base + scatter, 3)


def write_all(outdir) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for name in VARIANTS:
        s = build(name)
        written.append(write_scenario(s, outdir / f"{name}.csv"))
    central = build("synthetic_central")
    written.append(write_historical(build_history(central), outdir / "synthetic_history.csv"))
    w, i = build_meta()
    meta = outdir / "synthetic_meta.csv"
    meta.write_text("warming_c,impact_pct_gdp\n" + "".join(f"{float(a)!r},{float(b)!r}\n" for a, b in zip(w, i)))
    written.append(meta)
    return written


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("outdir", type=Path)
    args = ap.parse_args(argv)
    for p in write_all(args.outdir):
        print(p)


if __name__ == "__main__":
    main()
