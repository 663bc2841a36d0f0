"""Detector calibration, baseline estimation and (k_a, k_d) fitting.

Detector intensity is modelled as ``I(t) = f c0 c_hat(L, t / tau) + baseline``
with ``c_hat`` from the pressure-drop analytic solution and ``f`` the
conversion factor from a.u. to mol/m^3 that makes injected and eluted
amounts equal.
"""
from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from . import analytic
from .flow import FlowField
from .scales import AnalyteSpec, ColumnGeometry, DomainError, OperatingConditions, nondimensionalize

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AnalyteWindow:
    label: str
    t_start: float
    t_end: float

    def __post_init__(self):
        if not self.t_end > self.t_start:
            raise DomainError(f"window {self.label!r}: t_end must exceed t_start")


@dataclass
class ExperimentalChromatogram:
    time: np.ndarray
    intensity: np.ndarray
    windows: list[AnalyteWindow] = field(default_factory=list)
    exclusions: list[tuple[float, float]] = field(default_factory=list)

    def __post_init__(self):
        self.time = np.asarray(self.time, dtype=float)
        self.intensity = np.asarray(self.intensity, dtype=float)
        if self.time.shape != self.intensity.shape or self.time.ndim != 1:
            raise DomainError("time and intensity must be 1-D arrays of equal length")
        if np.any(np.diff(self.time) <= 0):
            raise DomainError("times must be strictly ascending")
        spans = sorted((w.t_start, w.t_end, w.label) for w in self.windows)
        for (s0, e0, l0), (s1, e1, l1) in zip(spans, spans[1:]):
            overlap = (s1, min(e0, e1))
            if s1 < e0 and not any(a <= overlap[0] and overlap[1] <= b for a, b in self.exclusions):
                raise DomainError(f"windows {l0!r} and {l1!r} overlap outside a declared exclusion")

    def window(self, label: str) -> AnalyteWindow:
        for w in self.windows:
            if w.label == label:
                return w
        raise KeyError(label)

    def select(self, t_start: float, t_end: float, apply_exclusions: bool = True):
        mask = (self.time >= t_start) & (self.time <= t_end)
        if apply_exclusions:
            for a, b in self.exclusions:
                mask &= ~((self.time >= a) & (self.time <= b))
        return self.time[mask], self.intensity[mask]


@dataclass(frozen=True)
class CalibrationEntry:
    name: str
    peak_area: float
    conversion_factor: float
    baseline: float = 0.0

    def __post_init__(self):
        if not self.conversion_factor > 0:
            raise DomainError("conversion factor must be positive")
        if self.baseline < 0:
            raise DomainError("baseline must be non-negative")


CalibrationTable = dict  # name -> CalibrationEntry


def conversion_factor(peak_area, c0, t1, p0, pL):
    """f = A p0 / (c0 t1 pL) in a.u. per mol/m^3."""
    for name, v in (("peak_area", peak_area), ("c0", c0), ("t1", t1), ("p0", p0), ("pL", pL)):
        if not np.all(np.asarray(v) > 0):
            raise DomainError(f"{name} must be positive")
    return np.asarray(peak_area) * p0 / (np.asarray(c0) * t1 * pL) if np.ndim(peak_area) else \
        peak_area * p0 / (c0 * t1 * pL)


def estimate_baseline(data: ExperimentalChromatogram, window: tuple[float, float]) -> float:
    """Mean intensity over a flat interval of the trace."""
    t0, t1 = window
    if t0 < data.time[0] or t1 > data.time[-1] or t1 <= t0:
        raise DomainError(f"baseline window {window} outside data range "
                          f"[{data.time[0]}, {data.time[-1]}]")
    _, values = data.select(t0, t1, apply_exclusions=False)
    if values.size < 10:
        raise DomainError("baseline window holds fewer than 10 samples")
    return float(values.mean())


@dataclass(frozen=True)
class Experiment:
    """Column and operating conditions shared by every analyte fit."""
    geometry: ColumnGeometry
    conditions: OperatingConditions

    def __post_init__(self):
        # pin the inlet velocity once so repeated model calls stay silent
        u0 = self.conditions.resolve_inlet_velocity(self.geometry)
        object.__setattr__(self, "conditions",
                           dataclasses.replace(self.conditions, inlet_velocity=u0, inlet_flow_rate=None))


def model_intensity(experiment: Experiment, analyte: AnalyteSpec, t_seconds, factor: float,
                    baseline: float = 0.0, regime: str = "variable", tol: float = 1e-8):
    """Detector signal in a.u. at ``t_seconds`` for ``analyte`` (its own scales)."""
    g = nondimensionalize(experiment.geometry, experiment.conditions, [analyte], 0)
    flow = FlowField(g.pL_hat, g.L_hat) if regime == "variable" else FlowField.uniform(g.L_hat)
    t_hat = np.asarray(t_seconds, dtype=float) / g.time_scale
    c_hat = analytic.concentration(g.analyte(0), flow, g.L_hat, t_hat, regime, tol)
    return factor * analyte.inlet_concentration * np.asarray(c_hat) + baseline


def synthetic_chromatogram(experiment: Experiment, analyte: AnalyteSpec, t_seconds, factor: float,
                           baseline: float = 0.0, noise: float = 0.0, seed: int = 0,
                           windows=(), regime: str = "variable") -> ExperimentalChromatogram:
    """Model trace with multiplicative Gaussian noise, I = f c0 c (1 + noise eps) + baseline."""
    clean = model_intensity(experiment, analyte, t_seconds, factor, 0.0, regime)
    eps = np.random.default_rng(seed).standard_normal(clean.shape)
    return ExperimentalChromatogram(np.asarray(t_seconds, float), clean * (1.0 + noise * eps) + baseline,
                                    list(windows))


@dataclass(frozen=True)
class FitSettings:
    n_starts: int = 32
    n_trial: int = 512
    ka_bounds: tuple[float, float] = (1e1, 1e6)
    kd_bounds: tuple[float, float] = (1e-1, 1e3)
    xtol: float = 1e-6
    max_iter: int = 400
    seed: int = 20240101
    basin_factor: float = 0.75
    regime: str = "variable"
    tol: float = 1e-8


@dataclass
class FitEntry:
    name: str
    k_a: float
    k_d: float
    sse: float
    r_squared: float
    inlet_concentration: float
    baseline: float
    converged: bool
    n_evaluations: int
    n_local: int

    @property
    def equilibrium_constant(self) -> float:
        return self.k_a / self.k_d

    @property
    def equilibrium_loading(self) -> float:
        return self.equilibrium_constant * self.inlet_concentration


@dataclass
class FitResult:
    entries: list[FitEntry]
    reference: int = 0

    def __getitem__(self, name: str) -> FitEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def beta(self) -> np.ndarray:
        """q_e,i c0,ref / (q_e,ref c0,i) = K_i / K_ref."""
        K = np.array([e.equilibrium_constant for e in self.entries])
        return K / K[self.reference]

    def rows(self) -> list[dict]:
        beta = self.beta()
        return [{"name": e.name, "k_a": e.k_a, "k_d": e.k_d, "K": e.equilibrium_constant,
                 "q_e": e.equilibrium_loading, "beta": float(b), "SSE": e.sse,
                 "R2": e.r_squared, "baseline": e.baseline, "converged": e.converged}
                for e, b in zip(self.entries, beta)]


def r_squared(data, model) -> float:
    data = np.asarray(data, float)
    ss_tot = np.sum((data - data.mean()) ** 2)
    return float(1.0 - np.sum((np.asarray(model) - data) ** 2) / ss_tot)


class _Objective:
    """SSE over log10 (k_a, k_d); profiles out the baseline when it is not fixed."""

    def __init__(self, experiment, analyte, t, y, factor, baseline, settings):
        self.experiment, self.analyte = experiment, analyte
        self.t, self.y = t, y
        self.factor, self.baseline = factor, baseline
        self.settings = settings
        self.n_eval = 0

    def signal(self, log_k):
        ka, kd = 10.0 ** np.asarray(log_k)
        a = dataclasses.replace(self.analyte, k_a=float(ka), k_d=float(kd))
        return model_intensity(self.experiment, a, self.t, self.factor, 0.0,
                               self.settings.regime, self.settings.tol)

    def baseline_for(self, signal):
        return float(np.mean(self.y - signal)) if self.baseline is None else self.baseline

    def __call__(self, log_k):
        self.n_eval += 1
        s = self.signal(log_k)
        resid = s + self.baseline_for(s) - self.y
        return float(resid @ resid)


def fit_analyte(experiment: Experiment, analyte: AnalyteSpec, data: ExperimentalChromatogram,
                window: tuple[float, float], factor: float, baseline: float | None,
                settings: FitSettings = FitSettings()) -> FitEntry:
    """Fit (k_a, k_d) of one analyte to the samples inside ``window``.

    Scatter stage: ``n_trial`` scrambled-Sobol points in the log box are
    scored and the best ``n_starts`` become candidate starts. Local stage:
    Nelder-Mead in log10 space from each candidate, skipping candidates that
    fall inside the basin of an earlier local solution. ``baseline=None``
    fits a constant baseline in closed form at every evaluation.
    """
    t, y = data.select(*window)
    if t.size < 5:
        raise DomainError(f"window {window} holds too few samples")
    obj = _Objective(experiment, analyte, t, y, factor, baseline, settings)
    lo = np.log10([settings.ka_bounds[0], settings.kd_bounds[0]])
    hi = np.log10([settings.ka_bounds[1], settings.kd_bounds[1]])

    sampler = qmc.Sobol(d=2, scramble=True, seed=settings.seed)
    n_pow = int(np.ceil(np.log2(max(settings.n_trial, settings.n_starts))))
    trial = qmc.scale(sampler.random_base2(n_pow), lo, hi)
    scores = np.array([obj(x) for x in trial])
    order = np.argsort(scores, kind="stable")[:settings.n_starts]

    basins: list[tuple[np.ndarray, float]] = []
    best_x, best_f, converged, n_local = trial[order[0]], scores[order[0]], False, 0
    for k in order:
        x0 = trial[k]
        if any(np.linalg.norm(x0 - c) <= r for c, r in basins):
            continue
        res = minimize(obj, x0, method="Nelder-Mead",
                       options={"xatol": settings.xtol, "fatol": 1e-12 * float(y @ y),
                                "maxiter": settings.max_iter,
                                "initial_simplex": x0 + np.array([[0, 0], [0.05, 0], [0, 0.05]])})
        n_local += 1
        x_min = np.clip(res.x, lo, hi)
        basins.append((x_min, max(settings.basin_factor * np.linalg.norm(x0 - x_min), 0.02)))
        if res.fun < best_f or (res.fun == best_f and res.success):
            best_x, best_f, converged = x_min, float(res.fun), bool(res.success)
    if not converged:
        log.warning("fit for %s did not converge; reporting best point found", analyte.name)

    sig = obj.signal(best_x)
    b = obj.baseline_for(sig)
    model = sig + b
    ka, kd = 10.0 ** best_x
    return FitEntry(analyte.name, float(ka), float(kd), float(np.sum((model - y) ** 2)),
                    r_squared(y, model), analyte.inlet_concentration, b, converged,
                    obj.n_eval, n_local)


def fit_all(experiment: Experiment, analytes: list[AnalyteSpec], data: ExperimentalChromatogram,
            factors: dict, baseline: float | None, settings: FitSettings = FitSettings(),
            reference: int = 0) -> FitResult:
    """Independent fit per analyte over its declared window."""
    entries = []
    for a in analytes:
        w = data.window(a.name)
        entries.append(fit_analyte(experiment, a, data, (w.t_start, w.t_end), factors[a.name],
                                   baseline, settings))
    return FitResult(entries, reference)
