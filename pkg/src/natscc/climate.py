"""Five-box carbon cycle and lagged temperature response."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericalAbort
from .units import PPM_TO_GTC

FUND_BOX_SHARES = (0.13, 0.20, 0.32, 0.25, 0.10)
FUND_BOX_LIFETIMES = (math.inf, 363.0, 74.0, 17.0, 2.0)


@dataclass(frozen=True)
class ClimateParams:
    climate_sensitivity: float = 3.0  # degC per doubling of CO2
    efolding_time: float = 40.0  # years
    box_shares: tuple[float, ...] = FUND_BOX_SHARES
    box_lifetimes: tuple[float, ...] = FUND_BOX_LIFETIMES
    preindustrial_concentration: float = 275.0  # ppm
    # state at the end of the year before the scenario starts
    initial_concentration: float = 310.0  # ppm
    initial_temperature: float = 0.3  # degC above preindustrial
    spinup_growth: float = 0.03  # per year, growth of the emissions that built the initial excess

    def __post_init__(self):
        object.__setattr__(self, "box_shares", tuple(float(x) for x in self.box_shares))
        object.__setattr__(self, "box_lifetimes", tuple(float(x) for x in self.box_lifetimes))
        if not self.climate_sensitivity > 0:
            raise ConfigError(f"climate_sensitivity must be > 0, got {self.climate_sensitivity}")
        if not self.efolding_time > 0:
            raise ConfigError(f"efolding_time must be > 0, got {self.efolding_time}")
        if len(self.box_shares) != len(self.box_lifetimes) or not self.box_shares:
            raise ConfigError("box_shares and box_lifetimes must have the same nonzero length")
        if any(s < 0 for s in self.box_shares) or abs(math.fsum(self.box_shares) - 1.0) > 1e-12:
            raise ConfigError(f"box_shares must be non-negative and sum to 1, got {self.box_shares}")
        if any(not lt > 0 for lt in self.box_lifetimes):
            raise ConfigError(f"box_lifetimes must be > 0, got {self.box_lifetimes}")
        if not self.preindustrial_concentration > 0:
            raise ConfigError("preindustrial_concentration must be > 0")
        if self.initial_concentration < self.preindustrial_concentration:
            raise ConfigError("initial_concentration below preindustrial is not supported")
        if not self.spinup_growth > 0:
            raise ConfigError("spinup_growth must be > 0")

    @property
    def decay(self) -> np.ndarray:
        """Per-year retention factor of each box; 1 for the permanent box."""
        return np.array([0.0 if lt == 0 else math.exp(-1.0 / lt) for lt in self.box_lifetimes])

    @property
    def shares(self) -> np.ndarray:
        return np.array(self.box_shares)


@dataclass(frozen=True)
class CarbonCycleState:
    box_masses: np.ndarray  # GtC above preindustrial, per box
    preindustrial_concentration: float = 275.0

    @property
    def concentration(self) -> float:
        return self.preindustrial_concentration + float(np.sum(self.box_masses)) / PPM_TO_GTC


def empty_state(params: ClimateParams) -> CarbonCycleState:
    return CarbonCycleState(np.zeros(len(params.box_shares)), params.preindustrial_concentration)


def initial_state(params: ClimateParams) -> CarbonCycleState:
    """Box masses matching ``initial_concentration``.

    The excess is split across boxes as it would be after an infinitely long
    spin-up on emissions growing at ``spinup_growth`` per year: with constant
    growth g, box j holds share_j / (1 - decay_j * exp(-g)) per unit of current
    emissions.
    """
    excess = (params.initial_concentration - params.preindustrial_concentration) * PPM_TO_GTC
    w = params.shares / (1.0 - params.decay * math.exp(-params.spinup_growth))
    return CarbonCycleState(excess * w / w.sum(), params.preindustrial_concentration)


def step_carbon(state: CarbonCycleState, params: ClimateParams, emissions: float) -> CarbonCycleState:
    """Advance one year; ``emissions`` in GtC/yr enter the boxes undecayed."""
    masses = state.box_masses * params.decay + params.shares * emissions
    return CarbonCycleState(masses, state.preindustrial_concentration)


def equilibrium_temperature(concentration: float, params: ClimateParams) -> float:
    if not concentration > 0:
        raise NumericalAbort(f"non-positive CO2 concentration {concentration}")
    return params.climate_sensitivity * math.log(concentration / params.preindustrial_concentration) / math.log(2.0)


def step_temperature(temperature: float, state: CarbonCycleState, params: ClimateParams) -> float:
    t_eq = equilibrium_temperature(state.concentration, params)
    return temperature + (t_eq - temperature) / params.efolding_time


@dataclass(frozen=True)
class ClimatePath:
    box_masses: np.ndarray  # (n_years, n_boxes)
    concentration: np.ndarray  # ppm
    temperature: np.ndarray  # degC


def simulate_climate(emissions_gtc, params: ClimateParams, state: CarbonCycleState | None = None,
                     temperature: float | None = None) -> ClimatePath:
    """Run the carbon cycle and temperature through an annual emission path.

    ``state`` and ``temperature`` describe the end of the year before the first
    entry of ``emissions_gtc``; they default to the configured initial state.
    """
    emissions_gtc = np.asarray(emissions_gtc, dtype=float)
    if state is None:
        state = initial_state(params)
    if temperature is None:
        temperature = params.initial_temperature
    n = len(emissions_gtc)
    masses = np.empty((n, len(params.box_shares)))
    conc = np.empty(n)
    temp = np.empty(n)
    # inlined step_carbon / step_temperature; the reference steps are tested against this loop
    decay, shares = params.decay, params.shares
    m = np.array(state.box_masses, dtype=float)
    c_pre = params.preindustrial_concentration
    scale = params.climate_sensitivity / math.log(2.0)
    inv_lag = 1.0 / params.efolding_time
    t = float(temperature)
    for k in range(n):
        m = m * decay + shares * emissions_gtc[k]
        c = c_pre + m.sum() / PPM_TO_GTC
        if not c > 0:
            raise NumericalAbort(f"non-positive CO2 concentration {c} at step {k}")
        t = t + (scale * math.log(c / c_pre) - t) * inv_lag
        masses[k] = m
        conc[k] = c
        temp[k] = t
    return ClimatePath(masses, conc, temp)
