"""Dimensional experiment description and its dimensionless parameter set.

Scales are built on a reference (dominant) analyte: with ``k_a``, ``k_d``
and ``c0`` of that analyte,

    q_e = (k_a / k_d) c0,   L = u0 R / (2 delta k_a),   tau = q_e / (k_a c0)

so ``tau = 1 / k_d`` of the reference analyte.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

GAS_CONSTANT = 8.314462618  # J/(mol K)


class DomainError(ValueError):
    """Raised when an input lies outside the domain of a formula."""


@dataclass(frozen=True)
class ColumnGeometry:
    length: float
    inner_radius: float
    coating_thickness: float

    def __post_init__(self):
        if not (self.length > 0 and self.inner_radius > 0 and self.coating_thickness > 0):
            raise DomainError("column length, radius and coating thickness must be positive")
        if self.coating_thickness / self.inner_radius >= 0.1:
            raise DomainError(
                f"coating thickness {self.coating_thickness:g} m is not thin compared "
                f"to radius {self.inner_radius:g} m (need delta/R < 0.1)")

    @property
    def phase_ratio(self) -> float:
        """alpha = 2 delta / R."""
        return 2.0 * self.coating_thickness / self.inner_radius


@dataclass(frozen=True)
class OperatingConditions:
    temperature: float
    inlet_pressure: float
    outlet_pressure: float
    injection_time: float
    viscosity: float
    inlet_velocity: float | None = None
    inlet_flow_rate: float | None = None

    def __post_init__(self):
        if self.temperature <= 0:
            raise DomainError("temperature must be positive")
        if not (self.inlet_pressure >= self.outlet_pressure > 0):
            raise DomainError("need inlet_pressure >= outlet_pressure > 0")
        if self.injection_time <= 0:
            raise DomainError("injection_time must be positive")
        if self.viscosity <= 0:
            raise DomainError("viscosity must be positive")
        if self.inlet_velocity is None and self.inlet_flow_rate is None:
            raise DomainError("one of inlet_velocity or inlet_flow_rate is required")
        for name in ("inlet_velocity", "inlet_flow_rate"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise DomainError(f"{name} must be positive")

    @property
    def pressure_ratio(self) -> float:
        """p_L / p_0."""
        return self.outlet_pressure / self.inlet_pressure

    def resolve_inlet_velocity(self, geometry: ColumnGeometry) -> float:
        """Inlet velocity in m/s.

        An explicit ``inlet_velocity`` wins over one derived from the flow
        rate; a mismatch above 0.1 % is reported with a warning.
        """
        if self.inlet_flow_rate is None:
            return self.inlet_velocity
        derived = inlet_velocity(self.inlet_flow_rate, geometry.inner_radius)
        if self.inlet_velocity is None:
            return derived
        if abs(derived - self.inlet_velocity) > 1e-3 * self.inlet_velocity:
            warnings.warn(
                f"inlet_velocity {self.inlet_velocity:g} m/s disagrees with "
                f"Q0/(pi R^2) = {derived:.4g} m/s; using inlet_velocity",
                stacklevel=2)
        return self.inlet_velocity


@dataclass(frozen=True)
class AnalyteSpec:
    name: str
    inlet_concentration: float
    diffusion_coefficient: float
    k_a: float
    k_d: float

    def __post_init__(self):
        for name in ("inlet_concentration", "diffusion_coefficient", "k_a", "k_d"):
            if not getattr(self, name) > 0:
                raise DomainError(f"analyte {self.name!r}: {name} must be positive")

    @property
    def equilibrium_constant(self) -> float:
        return self.k_a / self.k_d

    @property
    def equilibrium_loading(self) -> float:
        """q_e = K c0 in mol/m^3."""
        return self.equilibrium_constant * self.inlet_concentration


@dataclass(frozen=True)
class AnalyteDimensionless:
    """Per-analyte coefficients of the dimensionless transport model."""
    beta: float
    K_a: float
    K_d: float
    Da: float
    t1_hat: float

    def __post_init__(self):
        if not (self.beta > 0 and self.K_d > 0 and self.Da > 0 and self.t1_hat > 0):
            raise DomainError("beta, K_d, Da and t1_hat must be positive")
        if self.K_a < 0:
            raise DomainError("K_a must be non-negative")


@dataclass(frozen=True)
class DimensionlessGroups:
    Da: float
    Pe_inv: np.ndarray
    K_a: np.ndarray
    K_d: np.ndarray
    beta: np.ndarray
    L_hat: float
    t1_hat: float
    pL_hat: float
    length_scale: float
    time_scale: float
    reference_index: int
    names: tuple[str, ...] = field(default=())
    inlet_concentration: np.ndarray | None = None
    equilibrium_loading: np.ndarray | None = None

    def __len__(self):
        return len(self.beta)

    def analyte(self, i: int) -> AnalyteDimensionless:
        return AnalyteDimensionless(beta=float(self.beta[i]), K_a=float(self.K_a[i]),
                                    K_d=float(self.K_d[i]), Da=self.Da, t1_hat=self.t1_hat)

    def analytes(self) -> list[AnalyteDimensionless]:
        return [self.analyte(i) for i in range(len(self))]

    # re-dimensionalisation
    def seconds(self, t_hat):
        return np.asarray(t_hat) * self.time_scale

    def meters(self, x_hat):
        return np.asarray(x_hat) * self.length_scale

    def concentration(self, c_hat, i: int):
        """Mobile-phase concentration of analyte ``i`` in mol/m^3."""
        return np.asarray(c_hat) * self.inlet_concentration[i]

    def loading(self, q_hat, i: int):
        """Adsorbed amount of analyte ``i`` in mol/m^3."""
        return np.asarray(q_hat) * self.equilibrium_loading[i]


def inlet_velocity(flow_rate: float, radius: float) -> float:
    """Mean inlet velocity u0 = Q0 / (pi R^2)."""
    if flow_rate <= 0 or radius <= 0:
        raise DomainError("flow rate and radius must be positive")
    return flow_rate / (math.pi * radius**2)


def ppb_to_molar(ppb, temperature: float, pressure: float):
    """Ideal-gas molar concentration (mol/m^3) of a ppb mole fraction."""
    ppb = np.asarray(ppb, dtype=float)
    if np.any(ppb < 0):
        raise DomainError("ppb must be non-negative")
    if temperature <= 0 or pressure <= 0:
        raise DomainError("temperature and pressure must be positive")
    out = ppb * 1e-9 * pressure / (GAS_CONSTANT * temperature)
    return float(out) if out.ndim == 0 else out


def molar_to_ppb(concentration, temperature: float, pressure: float):
    if temperature <= 0 or pressure <= 0:
        raise DomainError("temperature and pressure must be positive")
    out = np.asarray(concentration, dtype=float) * GAS_CONSTANT * temperature / (pressure * 1e-9)
    return float(out) if out.ndim == 0 else out


def nondimensionalize(geometry: ColumnGeometry, conditions: OperatingConditions,
                      analytes: list[AnalyteSpec], reference_index: int = 0) -> DimensionlessGroups:
    """Build the dimensionless parameter set with ``analytes[reference_index]`` as scale."""
    if not analytes:
        raise DomainError("at least one analyte is required")
    if not 0 <= reference_index < len(analytes):
        raise DomainError(f"reference_index {reference_index} out of range")
    u0 = conditions.resolve_inlet_velocity(geometry)
    ref = analytes[reference_index]
    R, delta = geometry.inner_radius, geometry.coating_thickness

    length_scale = u0 * R / (2.0 * delta * ref.k_a)
    time_scale = ref.equilibrium_loading / (ref.k_a * ref.inlet_concentration)
    Da = length_scale / (u0 * time_scale)

    c0 = np.array([a.inlet_concentration for a in analytes])
    qe = np.array([a.equilibrium_loading for a in analytes])
    ka = np.array([a.k_a for a in analytes])
    kd = np.array([a.k_d for a in analytes])
    D0 = np.array([a.diffusion_coefficient for a in analytes])
    c01, qe1, ka1 = ref.inlet_concentration, ref.equilibrium_loading, ref.k_a

    beta = qe * c01 / (qe1 * c0)
    K_a = ka * c0 * qe1 / (ka1 * c01 * qe)
    K_d = kd * qe1 / (ka1 * c01)
    # exact ones for the reference, not 1 +- rounding
    beta[reference_index] = K_a[reference_index] = K_d[reference_index] = 1.0

    return DimensionlessGroups(
        Da=Da, Pe_inv=D0 / (u0 * length_scale), K_a=K_a, K_d=K_d, beta=beta,
        L_hat=geometry.length / length_scale,
        t1_hat=conditions.injection_time / time_scale,
        pL_hat=conditions.pressure_ratio,
        length_scale=length_scale, time_scale=time_scale,
        reference_index=reference_index,
        names=tuple(a.name for a in analytes),
        inlet_concentration=c0, equilibrium_loading=qe)


def damkohler_from_loading(geometry: ColumnGeometry, reference: AnalyteSpec) -> float:
    """Da = R c0 / (2 delta q_e) for the reference analyte."""
    return geometry.inner_radius * reference.inlet_concentration / (
        2.0 * geometry.coating_thickness * reference.equilibrium_loading)
