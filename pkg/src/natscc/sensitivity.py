"""Parameter sweeps over the model's main assumptions."""

from __future__ import annotations

import csv
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Sequence

from .errors import ConfigError, NatSccError
from .impacts import resolve_impact
from .liability import LiabilityReport, _order, default_workers, liability_from_run
from .scc import RunConfig, SccTable, compute_scc, config_hash, run_baseline
from .scenario import Scenario

AXES = (
    "scenario",
    "convergence",
    "prtp",
    "emuc",
    "income_elasticity",
    "climate_sensitivity",
    "impact_function",
    "impact_scale",
)


@dataclass(frozen=True)
class SensitivityAxis:
    name: str
    values: tuple

    def __post_init__(self):
        if self.name not in AXES:
            raise ConfigError(f"unknown sensitivity axis {self.name!r}; choose from {', '.join(AXES)}")
        object.__setattr__(self, "values", tuple(self.values))
        if not self.values:
            raise ConfigError(f"sensitivity axis {self.name!r} has no values")


def axis_value(config: RunConfig, name: str):
    """The base configuration's value on an axis, in the axis' own terms."""
    if name == "scenario":
        return config.scenario.id
    if name == "convergence":
        return config.scenario.convergence if config.convergence is None else config.convergence
    if name == "prtp":
        return config.prtp
    if name == "emuc":
        return config.emuc
    if name == "income_elasticity":
        return config.downscaling.income_elasticity
    if name == "climate_sensitivity":
        return config.climate.climate_sensitivity
    if name == "impact_function":
        return config.impact.name
    if name == "impact_scale":
        return config.impact.scale
    raise ConfigError(f"unknown axis {name!r}")


def same_value(name: str, a, b) -> bool:
    if name == "impact_function":
        return resolve_impact(str(a)).name == resolve_impact(str(b)).name
    if isinstance(a, bool) or isinstance(b, bool):
        return bool(a) == bool(b)
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return math.isclose(float(a), float(b), rel_tol=1e-12, abs_tol=0.0)
    return a == b


def apply_axis(config: RunConfig, name: str, value, load_scenario: Callable[[str], Scenario] | None = None) -> RunConfig:
    if name == "scenario":
        if isinstance(value, Scenario):
            return config.with_(scenario=value, history=None)
        if load_scenario is None:
            raise ConfigError("scenario axis needs a scenario loader")
        s = load_scenario(str(value))
        # recorded history belongs to one scenario's countries and calibration; other scenarios run without it
        history = config.history if s.id == config.scenario.id else None
        return config.with_(scenario=s, history=history)
    if name == "convergence":
        return config.with_(convergence=bool(value))
    if name == "prtp":
        return config.with_(prtp=float(value))
    if name == "emuc":
        return config.with_(emuc=float(value))
    if name == "income_elasticity":
        return config.with_(downscaling=replace(config.downscaling, income_elasticity=float(value)))
    if name == "climate_sensitivity":
        return config.with_(climate=replace(config.climate, climate_sensitivity=float(value)))
    if name == "impact_function":
        return config.with_(impact=resolve_impact(str(value), config.impact.scale))
    if name == "impact_scale":
        return config.with_(impact=config.impact.with_scale(float(value)))
    raise ConfigError(f"unknown axis {name!r}")


@dataclass(frozen=True)
class GridPoint:
    index: int
    axis: str
    value: str
    config: RunConfig | None
    config_hash: str = ""
    scc: SccTable | None = None
    liability: LiabilityReport | None = None
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error


@dataclass(frozen=True)
class GridResult:
    mode: str
    points: tuple[GridPoint, ...]

    @property
    def default(self) -> GridPoint:
        return self.points[0]

    def by_axis(self, axis: str) -> list[GridPoint]:
        """The default point plus every point that varies ``axis``."""
        return [self.default] + [p for p in self.points[1:] if p.axis == axis]


def _label(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _scenario_label(value, load_scenario):
    if isinstance(value, Scenario):
        return value.id
    return load_scenario(str(value)).id if load_scenario else str(value)


def _points(axes, base, mode, load_scenario):
    points = [(0, "default", "", base, "")]
    k = 1
    if mode == "one-at-a-time":
        for ax in axes:
            default = axis_value(base, ax.name)
            values = list(ax.values)
            if ax.name == "scenario":
                values = [_scenario_label(v, load_scenario) if not isinstance(v, Scenario) else v.id for v in values]
            if not any(same_value(ax.name, v, default) for v in values):
                raise ConfigError(f"axis {ax.name!r} does not contain the base value {default!r}")
            for v in ax.values:
                label = _scenario_label(v, load_scenario) if ax.name == "scenario" else v
                if same_value(ax.name, label, default):
                    continue
                try:
                    cfg = apply_axis(base, ax.name, v, load_scenario)
                    points.append((k, ax.name, _label(label), cfg, ""))
                except NatSccError as exc:
                    points.append((k, ax.name, _label(label), None, str(exc)))
                k += 1
    elif mode == "cartesian":
        names = [ax.name for ax in axes]
        for combo in itertools.product(*(ax.values for ax in axes)):
            labels = [
                _scenario_label(v, load_scenario) if n == "scenario" else v for n, v in zip(names, combo)
            ]
            if all(same_value(n, v, axis_value(base, n)) for n, v in zip(names, labels)):
                continue
            label = ";".join(f"{n}={_label(v)}" for n, v in zip(names, labels))
            try:
                cfg = base
                for n, v in zip(names, combo):
                    cfg = apply_axis(cfg, n, v, load_scenario)
                points.append((k, "cartesian", label, cfg, ""))
            except NatSccError as exc:
                points.append((k, "cartesian", label, None, str(exc)))
            k += 1
    else:
        raise ConfigError(f"unknown grid mode {mode!r}; use 'one-at-a-time' or 'cartesian'")
    return points


def evaluate_point(config: RunConfig):
    base = run_baseline(config)
    table = compute_scc(config, base)
    return table, liability_from_run(config, table, base)


def _run_one(config):
    try:
        return evaluate_point(config), ""
    except NatSccError as exc:
        return None, f"{exc.category}: {exc}"


def run_grid(axes: Sequence[SensitivityAxis], base: RunConfig, mode: str = "one-at-a-time",
             workers: int | None = None, load_scenario: Callable[[str], Scenario] | None = None) -> GridResult:
    """Evaluate the default point and every variant; results keep grid order."""
    specs = _points(list(axes), base, mode, load_scenario)
    runnable = [s for s in specs if s[3] is not None]
    workers = default_workers() if workers is None else workers
    if workers > 1 and len(runnable) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_one, [s[3] for s in runnable]))
    else:
        outcomes = [_run_one(s[3]) for s in runnable]
    done = {s[0]: o for s, o in zip(runnable, outcomes)}
    points = []
    for index, axis, value, cfg, err in specs:
        if cfg is None:
            points.append(GridPoint(index, axis, value, None, error=err))
            continue
        result, err = done[index]
        h = config_hash(cfg)
        if result is None:
            points.append(GridPoint(index, axis, value, cfg, h, error=err))
        else:
            points.append(GridPoint(index, axis, value, cfg, h, result[0], result[1]))
    return GridResult(mode, tuple(points))


def write_grid(result: GridResult, sensitivity_path, summary_path) -> tuple[Path, Path]:
    sensitivity_path, summary_path = Path(sensitivity_path), Path(summary_path)
    with open(sensitivity_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["point", "axis", "value", "config_hash", "country", "scc_usd2005_per_tc", "harm_done_usd",
                    "damage_suffered_usd", "net_liability_usd", "net_liability_over_gdp"])
        for p in result.points:
            if not p.ok:
                continue
            rep = p.liability
            for k in _order(rep.countries):
                w.writerow([p.index, p.axis, p.value, p.config_hash, rep.countries[k], repr(float(rep.scc[k])),
                            repr(float(rep.harm_done[k])), repr(float(rep.damage_suffered[k])),
                            repr(float(rep.net_liability[k])), repr(float(rep.net_over_gdp[k]))])
    with open(summary_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["point", "axis", "value", "config_hash", "status", "global_scc_usd2005_per_tc",
                    "sum_abs_net_liability_usd", "max_harm_over_gdp", "error"])
        for p in result.points:
            if p.ok:
                rep = p.liability
                w.writerow([p.index, p.axis, p.value, p.config_hash, "ok", repr(float(p.scc.global_scc)),
                            repr(math.fsum(abs(x) for x in rep.net_liability)), repr(rep.max_gross_liability()), ""])
            else:
                w.writerow([p.index, p.axis, p.value, p.config_hash, "skipped", "", "", "", p.error])
    return sensitivity_path, summary_path
