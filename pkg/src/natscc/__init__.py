"""National social costs of carbon, net climate liabilities and historical climate debt.

A country-level integrated assessment model: exogenous per-country economies,
a five-box carbon cycle with a lagged temperature response, income-scaled
impacts, and Ramsey-discounted pulse experiments.  National SCCs feed a blame
matrix of harm done to and damage suffered from other countries, and a ledger
of historical climate debt with interest.
"""

from .config import Settings, load_settings
from .errors import ConfigError, DataError, FitError, NatSccError, NumericalAbort
from .liability import DebtLedger, LiabilityReport, blame_matrix, historical_debt, liability_from_run
from .scc import RunConfig, SccTable, WorldTrajectory, compute_scc, run_baseline, scc_path
from .scenario import HistoricalEmissions, Scenario, load_historical, load_scenario
from .sensitivity import GridResult, SensitivityAxis, run_grid

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DataError",
    "DebtLedger",
    "FitError",
    "GridResult",
    "HistoricalEmissions",
    "LiabilityReport",
    "NatSccError",
    "NumericalAbort",
    "RunConfig",
    "Scenario",
    "SccTable",
    "SensitivityAxis",
    "Settings",
    "WorldTrajectory",
    "blame_matrix",
    "compute_scc",
    "historical_debt",
    "liability_from_run",
    "load_historical",
    "load_scenario",
    "load_settings",
    "run_baseline",
    "run_grid",
    "scc_path",
]
