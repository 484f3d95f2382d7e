"""Run-config files (TOML) and command-line overrides.

Relative paths inside a config file are resolved against the file's directory;
paths given as overrides are resolved against the working directory.  A bare
name such as ``synthetic_low_growth`` also finds the scenarios shipped with the
package.
"""

from __future__ import annotations

import copy
import hashlib
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .climate import ClimateParams
from .errors import ConfigError, DataError
from .impacts import DownscalingParams, bma_weights, fit_functions, load_meta, resolve_impact
from .scc import RunConfig, config_hash
from .scenario import Scenario, load_historical, load_scenario
from .sensitivity import AXES, SensitivityAxis

TOP_KEYS = {
    "scenario": str,
    "history": str,
    "meta_data": str,
    "prtp": float,
    "emuc": float,
    "income_elasticity": float,
    "calibration_year": int,
    "downscaling_mode": str,
    "climate_sensitivity": float,
    "efolding_time": float,
    "box_shares": list,
    "box_lifetimes": list,
    "preindustrial_concentration": float,
    "initial_concentration": float,
    "initial_temperature": float,
    "spinup_growth": float,
    "impact": str,
    "impact_scale": float,
    "pulse_year": int,
    "pulse_size": float,
    "horizon_year": int,
    "convergence": bool,
    "convergence_from_year": int,
    "scc_path_years": list,
    "debt_first_year": int,
    "debt_year": int,
    "evaluation_year_late": int,
    "grid": dict,
}
GRID_KEYS = set(AXES) | {"mode"}

PATH_KEYS = ("scenario", "history", "meta_data")


def data_dir() -> Path:
    return Path(str(resources.files("natscc") / "data"))


def default_config_path() -> Path:
    return data_dir() / "default.toml"


def find_scenario(ref: str, base_dir: Path | None = None) -> Path:
    """Resolve a scenario reference: a path, or the stem of a shipped scenario."""
    p = Path(ref)
    candidates = [p] if p.is_absolute() else [(base_dir or Path.cwd()) / p, Path.cwd() / p]
    candidates.append(data_dir() / p)
    candidates.append(data_dir() / f"{ref}.csv")
    for c in candidates:
        if c.is_file():
            return c.resolve()
    raise DataError(f"scenario {ref!r} not found")


def _parse_value(text: str):
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text


def parse_overrides(items) -> dict:
    out: dict = {}
    for item in items or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not KEY=VALUE")
        key, text = item.split("=", 1)
        key = key.strip()
        value = _parse_value(text.strip())
        parts = key.split(".")
        node = out
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = value
    return out


def _check_keys(raw: dict) -> None:
    for key, value in raw.items():
        if key not in TOP_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        want = TOP_KEYS[key]
        if want is float and isinstance(value, int) and not isinstance(value, bool):
            continue
        if not isinstance(value, want) or (want is not bool and isinstance(value, bool)):
            raise ConfigError(f"config key {key!r} expects {want.__name__}, got {value!r}")
    for key in raw.get("grid", {}):
        if key not in GRID_KEYS:
            raise ConfigError(f"unknown grid key {key!r}")


@dataclass
class Settings:
    run: RunConfig
    raw: dict
    base_dir: Path
    scc_path_years: list[int] = field(default_factory=lambda: [2015, 2055])
    debt_first_year: int = 1960
    debt_year: int = 2015
    evaluation_year_late: int = 2055
    grid_axes: list[SensitivityAxis] = field(default_factory=list)
    grid_mode: str = "one-at-a-time"
    meta_path: Path | None = None

    def load_scenario(self, ref: str) -> Scenario:
        return load_scenario(find_scenario(ref, self.base_dir))

    def describe(self) -> dict:
        d = self.run.describe()
        d["options"] = {
            "scc_path_years": self.scc_path_years,
            "debt_first_year": self.debt_first_year,
            "debt_year": self.debt_year,
            "evaluation_year_late": self.evaluation_year_late,
            "grid_mode": self.grid_mode,
            "grid": {a.name: [str(v) for v in a.values] for a in self.grid_axes},
            "meta_data": _file_digest(self.meta_path) if self.meta_path else None,
        }
        return d

    def hash(self) -> str:
        blob = json.dumps(self.describe(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _file_digest(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]


def _merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in extra.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def load_settings(path=None, overrides=None) -> Settings:
    """Read a config file (default: the shipped one) and apply overrides."""
    path = Path(path) if path else default_config_path()
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    base_dir = path.resolve().parent
    # paths from the file are anchored at the file; paths from overrides at the cwd
    for key in PATH_KEYS:
        if key in raw and isinstance(raw[key], str):
            raw[key] = _anchor(raw[key], base_dir)
    extra = parse_overrides(overrides) if not isinstance(overrides, dict) else overrides
    for key in PATH_KEYS:
        if key in extra and isinstance(extra[key], str):
            extra[key] = _anchor(extra[key], Path.cwd())
    raw = _merge(raw, extra)
    _check_keys(raw)
    return settings_from_dict(raw, base_dir)


def _anchor(ref: str, base: Path) -> str:
    if not ref:
        return ref  # an empty path switches an optional input off
    p = Path(ref)
    if p.is_absolute():
        return str(p)
    q = base / p
    return str(q) if q.is_file() else ref


def settings_from_dict(raw: dict, base_dir: Path | None = None) -> Settings:
    base_dir = base_dir or Path.cwd()
    if "scenario" not in raw:
        raise ConfigError("config needs a 'scenario'")
    scenario = load_scenario(find_scenario(raw["scenario"], base_dir))
    history = None
    if raw.get("history"):
        history = load_historical(find_scenario(raw["history"], base_dir))

    climate_kw = {}
    for key in ("climate_sensitivity", "efolding_time", "preindustrial_concentration", "initial_concentration",
                "initial_temperature", "spinup_growth"):
        if key in raw:
            climate_kw[key] = float(raw[key])
    if "box_shares" in raw:
        climate_kw["box_shares"] = tuple(float(x) for x in raw["box_shares"])
    if "box_lifetimes" in raw:
        climate_kw["box_lifetimes"] = tuple(math.inf if str(x) == "inf" else float(x) for x in raw["box_lifetimes"])
    climate = ClimateParams(**climate_kw)

    meta_path = None
    if raw.get("meta_data"):
        meta_path = find_scenario(raw["meta_data"], base_dir)
    scale = float(raw.get("impact_scale", 1.0))
    impact_name = str(raw.get("impact", "bma"))
    if impact_name.lower() in ("bma-fitted", "bma_fitted", "fitted"):
        if meta_path is None:
            raise ConfigError("impact = 'bma-fitted' needs meta_data")
        data = load_meta(meta_path)
        impact = bma_weights(fit_functions(data), data.n, scale)
    else:
        impact = resolve_impact(impact_name, scale)

    downscaling = DownscalingParams(
        income_elasticity=float(raw.get("income_elasticity", -0.36)),
        calibration_year=int(raw.get("calibration_year", 2010)),
        mode=str(raw.get("downscaling_mode", "calibrated")),
    )
    conv = raw.get("convergence")
    run = RunConfig(
        scenario=scenario,
        prtp=float(raw.get("prtp", 0.015)),
        emuc=float(raw.get("emuc", 1.5)),
        climate=climate,
        impact=impact,
        downscaling=downscaling,
        pulse_year=int(raw.get("pulse_year", 2010)),
        pulse_size=float(raw.get("pulse_size", 10.0)),
        horizon_year=int(raw["horizon_year"]) if "horizon_year" in raw else None,
        convergence=None if conv is None or conv == scenario.convergence else bool(conv),
        convergence_from_year=int(raw.get("convergence_from_year", 2010)),
        history=history,
    )
    grid = dict(raw.get("grid", {}))
    mode = str(grid.pop("mode", "one-at-a-time"))
    axes = []
    for name in AXES:  # fixed order keeps grids reproducible regardless of file order
        if name in grid:
            values = grid[name]
            if not isinstance(values, list):
                raise ConfigError(f"grid.{name} must be a list")
            axes.append(SensitivityAxis(name, tuple(values)))
    return Settings(
        run=run,
        raw=raw,
        base_dir=base_dir,
        scc_path_years=[int(y) for y in raw.get("scc_path_years", [2015, 2055])],
        debt_first_year=int(raw.get("debt_first_year", 1960)),
        debt_year=int(raw.get("debt_year", 2015)),
        evaluation_year_late=int(raw.get("evaluation_year_late", 2055)),
        grid_axes=axes,
        grid_mode=mode,
        meta_path=meta_path,
    )


__all__ = ["Settings", "load_settings", "settings_from_dict", "parse_overrides", "config_hash", "find_scenario"]
