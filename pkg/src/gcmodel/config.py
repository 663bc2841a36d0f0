"""Run configuration and experimental-data ingestion.

Configuration files are INI documents (``configparser`` syntax) carrying
``schema_version = 1`` in ``[meta]``. Dimensional values are written as
``<number> <unit>`` and the unit is checked against the key::

    [geometry]
    length = 20 m

    [analyte:o-xylene]
    inlet_concentration = 20 ppb
    k_a = 1.0168e4 1/s

The bundled ``btex_nasreddine.cfg`` (see :func:`data_path`) shows the full
key set.
"""
from __future__ import annotations

import configparser
import hashlib
import os
from dataclasses import dataclass, field

import numpy as np

from .calib import AnalyteWindow, ExperimentalChromatogram
from .scales import AnalyteSpec, ColumnGeometry, DomainError, OperatingConditions, ppb_to_molar

SCHEMA_VERSION = 1


def data_path(name: str = "btex_nasreddine.cfg") -> str:
    """Absolute path of a configuration file shipped with the package."""
    path = os.path.join(os.path.dirname(__file__), "data", name)
    if not os.path.isfile(path):
        raise FileNotFoundError(path)
    return path


class ConfigError(ValueError):
    """Invalid configuration or data file; the message starts with the offending field."""


# key -> accepted units (first is canonical SI); a conversion factor to SI per unit
_LENGTH = {"m": 1.0, "mm": 1e-3, "um": 1e-6}
_UNITS = {
    "geometry": {
        "length": _LENGTH, "inner_radius": _LENGTH, "coating_thickness": _LENGTH,
    },
    "conditions": {
        "temperature": {"K": 1.0},
        "inlet_pressure": {"Pa": 1.0, "bar": 1e5},
        "outlet_pressure": {"Pa": 1.0, "bar": 1e5},
        "inlet_velocity": {"m/s": 1.0},
        "inlet_flow_rate": {"m3/s": 1.0, "mL/min": 1e-6 / 60.0},
        "injection_time": {"s": 1.0},
        "viscosity": {"Pa.s": 1.0},
    },
    "analyte": {
        "inlet_concentration": {"mol/m3": 1.0, "ppb": None},
        "diffusion_coefficient": {"m2/s": 1.0},
        "k_a": {"1/s": 1.0},
        "k_d": {"1/s": 1.0},
        "calibration": {"a.u.*s/ppb": 1.0},
    },
}
_REQUIRED = {
    "geometry": {"length", "inner_radius", "coating_thickness"},
    "conditions": {"temperature", "inlet_pressure", "outlet_pressure", "injection_time", "viscosity"},
    "analyte": {"inlet_concentration", "diffusion_coefficient", "k_a", "k_d"},
}
_PLAIN = {
    "meta": {"schema_version", "name", "seed"},
    "model": {"reference", "regime", "solver", "tolerance"},
    "grid": {"t_end", "points", "N_x", "profile_points", "snapshot_times"},
    "fit": {"data", "baseline_window", "n_starts", "n_trial", "ka_bounds", "kd_bounds"},
    "output": {"directory"},
}
_WINDOW_KEYS = {"t_start", "t_end", "exclude"}


@dataclass
class GridSettings:
    t_end: float | None = None          # seconds
    points: int = 2000
    N_x: int = 4000
    profile_points: int = 401
    snapshot_times: tuple[float, ...] = ()  # seconds


@dataclass
class FitConfig:
    data: str | None = None
    baseline_window: tuple[float, float] | None = None
    n_starts: int = 32
    n_trial: int = 512
    ka_bounds: tuple[float, float] = (1e1, 1e6)
    kd_bounds: tuple[float, float] = (1e-1, 1e3)
    windows: list[AnalyteWindow] = field(default_factory=list)
    exclusions: list[tuple[float, float]] = field(default_factory=list)


@dataclass
class RunConfig:
    geometry: ColumnGeometry
    conditions: OperatingConditions
    analytes: list[AnalyteSpec]
    reference: int = 0
    regime: str = "variable"
    solver: str = "analytic"
    tolerance: float = 1e-8
    seed: int = 20240101
    name: str = ""
    grid: GridSettings = field(default_factory=GridSettings)
    fit: FitConfig = field(default_factory=FitConfig)
    calibration: dict[str, float] = field(default_factory=dict)  # a.u.*s/ppb
    concentration_per_ppb: float = 0.0
    output_dir: str = "."
    source: str = ""
    digest: str = ""

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.analytes)


def _split_value(where: str, raw: str, units: dict):
    parts = raw.split()
    if len(parts) != 2:
        raise ConfigError(f"{where}: expected '<number> <unit>', got {raw!r}")
    number, unit = parts
    try:
        value = float(number)
    except ValueError:
        raise ConfigError(f"{where}: {number!r} is not a number") from None
    if unit not in units:
        raise ConfigError(f"{where}: unit {unit!r} not accepted (expected one of {sorted(units)})")
    return value, unit


def _quantity(section, key, units, where):
    value, unit = _split_value(where, section[key], units)
    factor = units[unit]
    return value if factor is None else value * factor, unit


def _floats(where, raw, n=None, unit=None):
    parts = raw.replace(",", " ").split()
    if unit is not None:
        if not parts or parts[-1] != unit:
            raise ConfigError(f"{where}: values must end with unit {unit!r}")
        parts = parts[:-1]
    try:
        vals = tuple(float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"{where}: expected numbers, got {raw!r}") from None
    if n is not None and len(vals) != n:
        raise ConfigError(f"{where}: expected {n} values, got {len(vals)}")
    return vals


def _int(where, raw):
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{where}: expected an integer, got {raw!r}") from None


def _check_keys(where, present, allowed, required=frozenset()):
    extra = set(present) - set(allowed)
    if extra:
        raise ConfigError(f"{where}.{sorted(extra)[0]}: unknown key")
    missing = set(required) - set(present)
    if missing:
        raise ConfigError(f"{where}.{sorted(missing)[0]}: missing required key")


def load_config(path) -> RunConfig:
    """Parse and validate a run configuration file."""
    path = os.fspath(path)
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read ({exc.strerror})") from None
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(blob.decode("utf-8"), source=path)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None

    sections = parser.sections()
    known = {"meta", "geometry", "conditions", "model", "grid", "fit", "output"}
    for s in sections:
        if s not in known and not s.startswith(("analyte:", "window:")):
            raise ConfigError(f"{s}: unknown section")
    for s in ("meta", "geometry", "conditions"):
        if s not in parser:
            raise ConfigError(f"{s}: missing section")

    meta = parser["meta"]
    _check_keys("meta", meta, _PLAIN["meta"], {"schema_version"})
    version = _int("meta.schema_version", meta["schema_version"])
    if version != SCHEMA_VERSION:
        raise ConfigError(f"meta.schema_version: unsupported version {version}")

    geo = parser["geometry"]
    _check_keys("geometry", geo, _UNITS["geometry"], _REQUIRED["geometry"])
    gvals = {k: _quantity(geo, k, _UNITS["geometry"][k], f"geometry.{k}")[0] for k in geo}
    try:
        geometry = ColumnGeometry(gvals["length"], gvals["inner_radius"], gvals["coating_thickness"])
    except DomainError as exc:
        raise ConfigError(f"geometry: {exc}") from None

    cnd = parser["conditions"]
    _check_keys("conditions", cnd, _UNITS["conditions"], _REQUIRED["conditions"])
    cvals = {k: _quantity(cnd, k, _UNITS["conditions"][k], f"conditions.{k}")[0] for k in cnd}
    try:
        conditions = OperatingConditions(
            temperature=cvals["temperature"], inlet_pressure=cvals["inlet_pressure"],
            outlet_pressure=cvals["outlet_pressure"], injection_time=cvals["injection_time"],
            viscosity=cvals["viscosity"], inlet_velocity=cvals.get("inlet_velocity"),
            inlet_flow_rate=cvals.get("inlet_flow_rate"))
    except DomainError as exc:
        raise ConfigError(f"conditions: {exc}") from None

    per_ppb = ppb_to_molar(1.0, conditions.temperature, conditions.inlet_pressure)
    analytes, calibration = [], {}
    for s in sections:
        if not s.startswith("analyte:"):
            continue
        name = s.split(":", 1)[1].strip()
        if not name:
            raise ConfigError(f"{s}: empty analyte name")
        if name in calibration or any(a.name == name for a in analytes):
            raise ConfigError(f"{s}: duplicate analyte name")
        sec = parser[s]
        _check_keys(s, sec, _UNITS["analyte"], _REQUIRED["analyte"])
        vals = {}
        for k in sec:
            v, unit = _quantity(sec, k, _UNITS["analyte"][k], f"{s}.{k}")
            if k == "inlet_concentration" and unit == "ppb":
                v = v * per_ppb
            vals[k] = v
        try:
            analytes.append(AnalyteSpec(name, vals["inlet_concentration"],
                                        vals["diffusion_coefficient"], vals["k_a"], vals["k_d"]))
        except DomainError as exc:
            raise ConfigError(f"{s}: {exc}") from None
        if "calibration" in vals:
            calibration[name] = vals["calibration"]
    if not analytes:
        raise ConfigError("analyte: at least one [analyte:<name>] section is required")
    names = [a.name for a in analytes]

    model = parser["model"] if "model" in parser else {}
    _check_keys("model", model, _PLAIN["model"])
    reference = 0
    if "reference" in model:
        if model["reference"] not in names:
            raise ConfigError(f"model.reference: unknown analyte {model['reference']!r}")
        reference = names.index(model["reference"])
    regime = model.get("regime", "variable")
    if regime not in ("variable", "constant"):
        raise ConfigError(f"model.regime: expected 'variable' or 'constant', got {regime!r}")
    solver = model.get("solver", "analytic")
    if solver not in ("analytic", "fd", "both"):
        raise ConfigError(f"model.solver: expected analytic, fd or both, got {solver!r}")
    tolerance = _floats("model.tolerance", model["tolerance"], 1)[0] if "tolerance" in model else 1e-8

    grid = GridSettings()
    if "grid" in parser:
        gs = parser["grid"]
        _check_keys("grid", gs, _PLAIN["grid"])
        if "t_end" in gs:
            grid.t_end = _floats("grid.t_end", gs["t_end"], 1, unit="s")[0]
        if "points" in gs:
            grid.points = _int("grid.points", gs["points"])
        if "N_x" in gs:
            grid.N_x = _int("grid.N_x", gs["N_x"])
        if "profile_points" in gs:
            grid.profile_points = _int("grid.profile_points", gs["profile_points"])
        if "snapshot_times" in gs:
            grid.snapshot_times = _floats("grid.snapshot_times", gs["snapshot_times"], unit="s")
        if grid.points < 2 or grid.N_x < 16 or grid.profile_points < 2:
            raise ConfigError("grid: points >= 2, N_x >= 16 and profile_points >= 2 required")

    base_dir = os.path.dirname(os.path.abspath(path))
    fit = FitConfig()
    if "fit" in parser:
        fs = parser["fit"]
        _check_keys("fit", fs, _PLAIN["fit"])
        if "data" in fs:
            fit.data = os.path.join(base_dir, fs["data"])
            if not os.path.isfile(fit.data):
                raise ConfigError(f"fit.data: file {fs['data']!r} does not exist")
        if "baseline_window" in fs:
            fit.baseline_window = _floats("fit.baseline_window", fs["baseline_window"], 2, unit="s")
        if "n_starts" in fs:
            fit.n_starts = _int("fit.n_starts", fs["n_starts"])
        if "n_trial" in fs:
            fit.n_trial = _int("fit.n_trial", fs["n_trial"])
        if "ka_bounds" in fs:
            fit.ka_bounds = _floats("fit.ka_bounds", fs["ka_bounds"], 2, unit="1/s")
        if "kd_bounds" in fs:
            fit.kd_bounds = _floats("fit.kd_bounds", fs["kd_bounds"], 2, unit="1/s")
    for s in sections:
        if not s.startswith("window:"):
            continue
        label = s.split(":", 1)[1].strip()
        if label not in names:
            raise ConfigError(f"{s}: no analyte named {label!r}")
        ws = parser[s]
        _check_keys(s, ws, _WINDOW_KEYS, {"t_start", "t_end"})
        t0 = _floats(f"{s}.t_start", ws["t_start"], 1, unit="s")[0]
        t1 = _floats(f"{s}.t_end", ws["t_end"], 1, unit="s")[0]
        try:
            fit.windows.append(AnalyteWindow(label, t0, t1))
        except DomainError as exc:
            raise ConfigError(f"{s}: {exc}") from None
        if "exclude" in ws:
            vals = _floats(f"{s}.exclude", ws["exclude"], 2, unit="s")
            fit.exclusions.append((vals[0], vals[1]))

    if "output" in parser and "directory" in parser["output"]:
        output_dir = os.path.join(base_dir, parser["output"]["directory"])
    else:
        output_dir = os.getcwd()

    return RunConfig(
        geometry=geometry, conditions=conditions, analytes=analytes, reference=reference,
        regime=regime, solver=solver, tolerance=tolerance,
        seed=_int("meta.seed", meta["seed"]) if "seed" in meta else 20240101,
        name=meta.get("name", ""), grid=grid, fit=fit, calibration=calibration,
        concentration_per_ppb=per_ppb, output_dir=output_dir,
        source=path, digest=hashlib.sha256(blob).hexdigest()[:16])


def load_experimental_csv(path, windows=(), exclusions=()) -> ExperimentalChromatogram:
    """Read ``time_seconds,intensity_au`` samples; ``#`` starts a comment line."""
    path = os.fspath(path)
    try:
        with open(path, "r", encoding="utf-8", newline=None) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read ({exc.strerror})") from None
    rows, header_seen = [], False
    for lineno, line in enumerate(lines, 1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        cells = [c.strip() for c in text.split(",")]
        if not header_seen:
            header_seen = True
            try:
                [float(c) for c in cells]
            except ValueError:
                continue
            raise ConfigError(f"{path}:{lineno}: header line required before data")
        if len(cells) != 2:
            raise ConfigError(f"{path}:{lineno}: expected 2 columns, got {len(cells)}")
        try:
            rows.append((float(cells[0]), float(cells[1])))
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: non-numeric cell in {text!r}") from None
    if not rows:
        raise ConfigError(f"{path}: no data rows")
    data = np.array(rows)
    steps = np.diff(data[:, 0])
    if np.any(steps <= 0):
        k = int(np.argmax(steps <= 0)) + 1
        kind = "duplicated" if steps[k - 1] == 0 else "non-ascending"
        raise ConfigError(f"{path}: {kind} timestamp {data[k, 0]!r}")
    try:
        return ExperimentalChromatogram(data[:, 0], data[:, 1], list(windows), list(exclusions))
    except DomainError as exc:
        raise ConfigError(f"{path}: {exc}") from None
