"""Global impact functions, their estimation and averaging, and national downscaling.

Impact functions take global warming T (degC above preindustrial) and return
the impact as a fraction of GDP; negative values are damages.  Coefficients are
stored in percent of GDP, as tabulated in the literature.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import least_squares

from .errors import ConfigError, DataError, FitError
from .units import PERCENT, PERSONS_PER_MILLION

log = logging.getLogger(__name__)

T_MIN, T_MAX = -1.0, 10.0


# -- functional forms -------------------------------------------------------


def _threshold(T, p):
    coef, shift, power = p
    x = np.maximum(T + shift, 0.0)
    return np.where(T > -shift, coef * x**power, 0.0)


def _piecewise(T, p):
    slope1, knot, slope2, switch = p
    return np.where(T <= switch, slope1 * T, slope1 * knot + slope2 * T)


@dataclass(frozen=True)
class FormSpec:
    name: str
    func: Callable
    table_params: tuple[float, ...]
    fitted: bool = True
    # linear-in-parameters forms: basis(T, params) -> (n_obs, k) design matrix over the free params
    basis: Callable | None = None
    free: tuple[int, ...] = ()  # indices of params estimated from data

    @property
    def n_free(self) -> int:
        return len(self.free) if self.fitted else 0


def _poly_basis(*powers):
    def basis(T, p):
        return np.column_stack([T**k for k in powers])

    return basis


def _pw_basis(T, p):
    _, knot, _, switch = p
    lo = T <= switch
    return np.column_stack([np.where(lo, T, knot), np.where(lo, 0.0, T)])


FORMS: dict[str, FormSpec] = {
    s.name: s
    for s in [
        FormSpec("Parabolic", lambda T, p: p[0] * T + p[1] * T**2, (-0.45, -0.082),
                 basis=_poly_basis(1, 2), free=(0, 1)),
        FormSpec("Threshold", _threshold, (-0.49, 0.21, 1.3), free=(0, 1, 2)),
        FormSpec("PiecewiseLinear", _piecewise, (0.46, 0.74, -0.90, 0.90),
                 basis=_pw_basis, free=(0, 2)),
        FormSpec("Quadratic", lambda T, p: p[0] * T**2, (-0.17,),
                 basis=_poly_basis(2), free=(0,)),
        FormSpec("HazardT6", lambda T, p: p[0] * T**2 + p[1] * T**6, (-0.19, 1.10e-5),
                 basis=_poly_basis(2, 6), free=(0, 1)),
        FormSpec("HazardT7", lambda T, p: p[0] * T**2 + p[1] * T**7, (-0.18, 1.55e-6),
                 basis=_poly_basis(2, 7), free=(0, 1)),
        FormSpec("Linear", lambda T, p: p[0] * T, (-0.79,),
                 basis=_poly_basis(1), free=(0,)),
        FormSpec("Cubic", lambda T, p: p[0] * T**3, (-0.028,),
                 basis=_poly_basis(3), free=(0,)),
        FormSpec("Quartic", lambda T, p: p[0] * T**4, (-0.0039,),
                 basis=_poly_basis(4), free=(0,)),
        FormSpec("Exponential", lambda T, p: p[0] - p[0] * np.exp(T), (0.0078,),
                 basis=lambda T, p: (1.0 - np.exp(T))[:, None], free=(0,)),
        FormSpec("QuadraticBarrage", lambda T, p: p[0] * T**2, (-0.35,),
                 fitted=False),
        FormSpec("QuadraticHoward", lambda T, p: p[0] * T**2, (-0.86,),
                 fitted=False),
        FormSpec("HazardWeitzman", lambda T, p: p[0] * T**2 + p[1] * np.abs(T) ** p[2], (-0.24, -0.00051, 6.754),
                 fitted=False),
    ]
}

# likelihood column of the published comparison, percent
TABLE_LIKELIHOODS = {
    "Parabolic": 19.65,
    "Threshold": 18.01,
    "PiecewiseLinear": 14.31,
    "Quadratic": 13.15,
    "HazardT6": 11.12,
    "HazardT7": 11.02,
    "Linear": 10.68,
    "Cubic": 1.60,
    "Quartic": 0.37,
    "Exponential": 0.09,
    "QuadraticBarrage": 7.1e-4,
    "QuadraticHoward": 5.8e-20,
    "HazardWeitzman": 4.3e-47,
}

# the published SCC column (USD-2005/tC, 2015 emissions, PRTP 1%), for ordering checks only
TABLE_SCC = {
    "Parabolic": 12, "Threshold": 15, "PiecewiseLinear": 14, "Quadratic": 10, "HazardT6": 10,
    "HazardT7": 10, "Linear": 13, "Cubic": 11, "Quartic": 2, "Exponential": 1,
    "QuadraticBarrage": 19, "QuadraticHoward": 47, "HazardWeitzman": 17,
}

ALIASES = {
    "newbold": "Threshold",
    "nordhaus": "Quadratic",
    "tol": "Parabolic",
    "hope": "Linear",
    "barrage": "QuadraticBarrage",
    "howard": "QuadraticHoward",
    "weitzman": "HazardWeitzman",
    "piecewise_linear": "PiecewiseLinear",
    "hazard_t6": "HazardT6",
    "hazard_t7": "HazardT7",
    "quadratic_barrage": "QuadraticBarrage",
    "quadratic_howard": "QuadraticHoward",
    "hazard_weitzman": "HazardWeitzman",
}


def canonical_form_name(name: str) -> str:
    if name in FORMS:
        return name
    key = name.strip().lower().replace("-", "_")
    if key in ALIASES:
        return ALIASES[key]
    for form in FORMS:
        if form.lower() == key.replace("_", ""):
            return form
    raise ConfigError(f"unknown impact function {name!r}; choose from {', '.join(FORMS)}")


@dataclass(frozen=True)
class ImpactFunctionForm:
    form: str
    params: tuple[float, ...] = ()

    def __post_init__(self):
        if self.form not in FORMS:
            raise ConfigError(f"unknown impact form {self.form!r}")
        params = tuple(float(x) for x in (self.params or FORMS[self.form].table_params))
        if len(params) != len(FORMS[self.form].table_params):
            raise ConfigError(f"{self.form} takes {len(FORMS[self.form].table_params)} parameters")
        object.__setattr__(self, "params", params)

    @property
    def spec(self) -> FormSpec:
        return FORMS[self.form]

    @property
    def name(self) -> str:
        return self.form

    def percent(self, T):
        """Impact in percent of GDP (no range check)."""
        return self.spec.func(np.asarray(T, dtype=float), self.params)

    def __call__(self, T):
        return evaluate_impact(self, T)


def table_form(name: str) -> ImpactFunctionForm:
    return ImpactFunctionForm(canonical_form_name(name))


@dataclass(frozen=True)
class BmaImpact:
    members: tuple[tuple[ImpactFunctionForm, float], ...]
    scale: float = 1.0
    name: str = "bma"

    def __post_init__(self):
        members = tuple((f, float(w)) for f, w in self.members)
        object.__setattr__(self, "members", members)
        if not members:
            raise ConfigError("BMA needs at least one member")
        ws = [w for _, w in members]
        if any(w < 0 for w in ws) or abs(math.fsum(ws) - 1.0) > 1e-12:
            raise ConfigError(f"BMA weights must be non-negative and sum to 1 (sum={math.fsum(ws)!r})")
        if not self.scale > 0:
            raise ConfigError(f"impact scale must be > 0, got {self.scale}")

    @property
    def weights(self) -> dict[str, float]:
        return {f.form: w for f, w in self.members}

    def percent(self, T):
        T = np.asarray(T, dtype=float)
        total = np.zeros_like(T)
        for f, w in self.members:
            if w:
                total = total + w * f.percent(T)
        return self.scale * total

    def with_scale(self, scale: float) -> "BmaImpact":
        return replace(self, scale=float(scale))

    def __call__(self, T):
        return evaluate_impact(self, T)


def single(form: ImpactFunctionForm, scale: float = 1.0) -> BmaImpact:
    """Wrap one function so every impact in a run has the same (scalable) type."""
    return BmaImpact(((form, 1.0),), scale=scale, name=form.form)


def table_bma(scale: float = 1.0) -> BmaImpact:
    """Average of the thirteen published parameterizations with their published likelihoods."""
    total = math.fsum(TABLE_LIKELIHOODS.values())
    members = [(ImpactFunctionForm(name), TABLE_LIKELIHOODS[name] / total) for name in FORMS]
    # renormalize exactly so the weights pass the sum-to-one check
    members[0] = (members[0][0], 1.0 - math.fsum(w for _, w in members[1:]))
    return BmaImpact(tuple(members), scale=scale, name="bma")


def resolve_impact(name: str, scale: float = 1.0) -> BmaImpact:
    if name.strip().lower() in ("bma", "bayesian_model_average", "default"):
        return table_bma(scale)
    return single(table_form(name), scale)


def evaluate_impact(f: ImpactFunctionForm | BmaImpact, T):
    """Impact as a fraction of GDP at warming ``T``."""
    T = np.asarray(T, dtype=float)
    if np.any(T < T_MIN) or np.any(T > T_MAX) or not np.all(np.isfinite(T)):
        raise DataError(f"warming outside the supported range [{T_MIN}, {T_MAX}] degC: {T.min()}..{T.max()}")
    out = f.percent(T) / PERCENT
    return float(out) if out.ndim == 0 else out


# -- estimation -------------------------------------------------------------


@dataclass(frozen=True)
class MetaDataset:
    warming: np.ndarray  # degC
    impact: np.ndarray  # percent of GDP

    def __post_init__(self):
        w = np.asarray(self.warming, dtype=float)
        i = np.asarray(self.impact, dtype=float)
        if w.shape != i.shape or w.ndim != 1:
            raise DataError("warming and impact must be 1-d arrays of equal length")
        if len(w) < 2:
            raise DataError("a meta-analysis dataset needs at least 2 observations")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(i))):
            raise DataError("meta-analysis observations must be finite")
        object.__setattr__(self, "warming", w)
        object.__setattr__(self, "impact", i)

    @property
    def n(self) -> int:
        return len(self.warming)


META_HEADER = ("warming_c", "impact_pct_gdp")


def load_meta(path) -> MetaDataset:
    path = Path(path)
    if not path.exists():
        raise DataError(f"meta-analysis file not found: {path}")
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != META_HEADER:
            raise DataError(f"{path}:1: expected header {','.join(META_HEADER)!r}")
        for row in reader:
            if not row:
                continue
            try:
                w, i = (float(x) for x in row)
            except ValueError:
                raise DataError(f"{path}:{reader.line_num}: malformed row {row!r}") from None
            rows.append((w, i))
    if not rows:
        raise DataError(f"{path}: no observations")
    a = np.array(rows)
    return MetaDataset(a[:, 0], a[:, 1])


@dataclass(frozen=True)
class FitResult:
    form: ImpactFunctionForm
    ssr: float
    n_free: int
    converged: bool = True
    message: str = ""


def _resolution(y: np.ndarray) -> float:
    # residual sums below this are indistinguishable from an exact fit in double precision
    return len(y) * (64 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(y))))) ** 2


def _fit_linear(spec: FormSpec, T, y):
    X = spec.basis(T, spec.table_params)
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    params = list(spec.table_params)
    for k, idx in enumerate(spec.free):
        params[idx] = float(coef[k])
    return tuple(params), True, "closed-form least squares"


def _fit_threshold(spec: FormSpec, T, y):
    def resid(p):
        return spec.func(T, p) - y

    # shift kept inside the data support so the active branch is never empty
    lo = [-np.inf, -float(np.max(T)) + 1e-6, 0.05]
    hi = [np.inf, 10.0, 10.0]
    best = None
    for start in (spec.table_params, (-0.2, 0.0, 2.0), (-0.5, 0.5, 1.0)):
        x0 = np.clip(start, np.array(lo) + 1e-9, np.array(hi) - 1e-9)
        r = least_squares(resid, x0, bounds=(lo, hi), xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=5000)
        if best is None or r.cost < best.cost:
            best = r
    return tuple(float(v) for v in best.x), bool(best.success), str(best.message)


def fit_functions(data: MetaDataset, forms: Sequence[str] | None = None) -> list[FitResult]:
    """Least-squares estimates for each form; fixed parameterizations are only evaluated.

    Residual sums below double-precision resolution are reported as exact (0.0).
    A form whose optimizer fails is reported with ``converged=False`` and the
    remaining forms are still fitted.
    """
    names = [canonical_form_name(f) for f in (forms or list(FORMS))]
    for name in names:
        k = FORMS[name].n_free
        if k >= data.n:
            raise FitError(f"{name} has {k} free parameters but only {data.n} observations")
    T, y = data.warming, data.impact
    floor = _resolution(y)
    results = []
    for name in names:
        spec = FORMS[name]
        try:
            if not spec.fitted:
                params, ok, msg = spec.table_params, True, "fixed parameterization"
            elif spec.basis is not None:
                params, ok, msg = _fit_linear(spec, T, y)
            else:
                params, ok, msg = _fit_threshold(spec, T, y)
            ssr = float(np.sum((spec.func(T, params) - y) ** 2))
            if not np.isfinite(ssr):
                raise FloatingPointError("non-finite residuals")
        except (np.linalg.LinAlgError, FloatingPointError, ValueError) as exc:
            log.warning("fit of %s failed: %s", name, exc)
            results.append(FitResult(ImpactFunctionForm(name), math.nan, spec.n_free, False, str(exc)))
            continue
        if ssr < floor:
            ssr = 0.0
        results.append(FitResult(ImpactFunctionForm(name, params), ssr, spec.n_free, ok, msg))
    return results


SSR_FLOOR = 1e-300


def bma_weights(fits: Sequence[FitResult], n: int, scale: float = 1.0) -> BmaImpact:
    """Weights proportional to the concentrated Gaussian likelihood SSR^(-n/2)."""
    usable = [f for f in fits if f.converged and np.isfinite(f.ssr)]
    if not usable:
        raise FitError("no usable fits to average")
    logw = np.array([-0.5 * n * math.log(max(f.ssr, SSR_FLOOR)) for f in usable])
    w = np.exp(logw - logw.max())
    w = w / w.sum()
    members = [(f.form, float(x)) for f, x in zip(usable, w)]
    # absorb rounding in the largest weight so the sum is 1 to the last bit that matters
    top = int(np.argmax(w))
    members[top] = (members[top][0], 1.0 - math.fsum(x for k, (_, x) in enumerate(members) if k != top))
    return BmaImpact(tuple(members), scale=scale, name="bma-fitted")


def write_fit_report(fits: Sequence[FitResult], bma: BmaImpact, path) -> Path:
    width = max(len(f.form.params) for f in fits)
    weights = bma.weights
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["form", *[f"param{k + 1}" for k in range(width)], "ssr", "weight"])
        for f in fits:
            ps = [repr(p) for p in f.form.params] + [""] * (width - len(f.form.params))
            w.writerow([f.form.form, *ps, repr(f.ssr), repr(weights.get(f.form.form, 0.0))])
    return path


# -- downscaling ------------------------------------------------------------


DOWNSCALING_MODES = ("calibrated", "annual")


@dataclass(frozen=True)
class DownscalingParams:
    """How the global impact is shared out.

    ``calibrated``: the scaling is fixed in ``calibration_year`` and then applied
    to each later year's incomes, so relative vulnerability falls as the world
    grows richer.  ``annual``: the scaling is recomputed every year, so national
    dollar impacts add up to the global impact in every year.
    """

    income_elasticity: float = -0.36
    calibration_year: int = 2010
    mode: str = "calibrated"

    def __post_init__(self):
        if self.mode not in DOWNSCALING_MODES:
            raise ConfigError(f"downscaling mode must be one of {DOWNSCALING_MODES}, got {self.mode!r}")
        if not math.isfinite(self.income_elasticity):
            raise ConfigError("income_elasticity must be finite")


def _world_income(gdp, population):
    return float(np.sum(gdp) / (np.sum(population) * PERSONS_PER_MILLION))


def downscale(global_impact: float, states, params: DownscalingParams) -> np.ndarray:
    """National impact fractions that add up, in dollars, to the global impact.

    i_c = k * global_impact * (y_c / y_world)^eps, with k chosen so that
    sum_c i_c Y_c = global_impact * sum_c Y_c.
    """
    cal = calibrate_vulnerability(states, params)
    return cal.apply(global_impact, states.income_per_capita)


@dataclass(frozen=True)
class VulnerabilityCalibration:
    """National scaling fixed in a calibration year and applied to any later income."""

    reference_income: float
    k: float
    income_elasticity: float

    def relative(self, income) -> np.ndarray:
        return self.k * (np.asarray(income, dtype=float) / self.reference_income) ** self.income_elasticity

    def apply(self, global_impact, income) -> np.ndarray:
        """``global_impact`` may be scalar or per-year (broadcast over the last axis)."""
        return np.asarray(global_impact) * self.relative(income)


def calibrate_vulnerability(states, params: DownscalingParams) -> VulnerabilityCalibration:
    income = np.asarray(states.income_per_capita, dtype=float)
    gdp = np.asarray(states.gdp_gross, dtype=float)
    if np.any(income <= 0):
        raise DataError("downscaling requires positive incomes")
    total = gdp.sum()
    if not total > 0:
        raise DataError("downscaling is degenerate: world GDP is zero")
    y_ref = _world_income(gdp, states.population)
    v = (income / y_ref) ** params.income_elasticity
    return VulnerabilityCalibration(y_ref, float(total / np.sum(v * gdp)), params.income_elasticity)


def downscale_panel(global_impact, gdp, population, income, eps: float) -> np.ndarray:
    """Year-by-year rescaled downscaling over (country, year) panels."""
    gdp, income = np.asarray(gdp, dtype=float), np.asarray(income, dtype=float)
    y_ref = gdp.sum(axis=0) / (np.asarray(population).sum(axis=0) * PERSONS_PER_MILLION)
    v = (income / y_ref) ** eps
    k = gdp.sum(axis=0) / np.sum(v * gdp, axis=0)
    return np.asarray(global_impact) * k * v
