"""Steady carrier-gas profiles along a column with a pressure drop.

All functions of the dimensionless axial coordinate ``x`` on ``[0, L_hat]``.
Pressure is scaled with the inlet pressure, velocity with the inlet velocity
and the diffusion coefficient with its inlet value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scales import DomainError

_UNIFORM_TOL = 1e-9


@dataclass(frozen=True)
class FlowField:
    pL_hat: float
    L_hat: float

    def __post_init__(self):
        if not 0 < self.pL_hat <= 1:
            raise DomainError(f"pL_hat must lie in (0, 1], got {self.pL_hat}")
        if not self.L_hat > 0:
            raise DomainError("L_hat must be positive")

    @classmethod
    def uniform(cls, L_hat: float) -> "FlowField":
        """Constant-velocity column (no pressure drop)."""
        return cls(1.0, L_hat)

    @property
    def is_uniform(self) -> bool:
        return abs(1.0 - self.pL_hat) < _UNIFORM_TOL

    @property
    def _drop(self) -> float:
        return 1.0 - self.pL_hat**2

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        tol = 1e-12 * self.L_hat
        if np.any(x < -tol) or np.any(x > self.L_hat + tol):
            raise DomainError(f"x_hat outside [0, {self.L_hat}]")
        return np.clip(x, 0.0, self.L_hat)

    @staticmethod
    def _out(x, value):
        return float(value) if np.ndim(x) == 0 else value

    def pressure(self, x):
        """p(x) = sqrt(1 - (1 - pL^2) x / L)."""
        xs = self._check(x)
        if self.is_uniform:
            return self._out(x, np.ones_like(xs))
        return self._out(x, np.sqrt(1.0 - self._drop * xs / self.L_hat))

    def velocity(self, x):
        """u = 1/p, from carrier mass conservation u c_N = 1."""
        return self._out(x, 1.0 / np.asarray(self.pressure(x)))

    def velocity_gradient(self, x):
        """du/dx = (1 - pL^2) / (2 L p^3)."""
        p = np.asarray(self.pressure(x))
        if self.is_uniform:
            return self._out(x, np.zeros_like(p))
        return self._out(x, self._drop / (2.0 * self.L_hat * p**3))

    def omega(self, x):
        """Effective transport coordinate 2L(1 - p^3) / (3(1 - pL^2)).

        Reduces to ``x`` when there is no pressure drop.
        """
        xs = self._check(x)
        if self.is_uniform:
            return self._out(x, xs.copy())
        p = np.sqrt(1.0 - self._drop * xs / self.L_hat)
        # 1 - p^3 = (1 - p^2)(1 + p + p^2)/(1 + p) avoids cancellation near the inlet
        one_minus_p2 = self._drop * xs / self.L_hat
        one_minus_p3 = one_minus_p2 * (1.0 + p + p * p) / (1.0 + p)
        return self._out(x, 2.0 * self.L_hat * one_minus_p3 / (3.0 * self._drop))

    def diffusion_ratio(self, x):
        """D(x)/D0 = 1/p for an isothermal ideal gas."""
        return self._out(x, 1.0 / np.asarray(self.pressure(x)))

    def diffusion_ratio_gradient(self, x):
        """d(1/p)/dx, identical to the velocity gradient."""
        return self.velocity_gradient(x)

    @property
    def outlet_omega(self) -> float:
        return self.omega(self.L_hat)


def outlet_pressure_from_darcy(darcy: float) -> float:
    """Outlet/inlet pressure ratio from the Darcy number 16 mu u0 L / (R^2 pL).

    Root of p^2 + Da p - 1 = 0, i.e. 1/p = (Da/2)(1 + sqrt(1 + 4/Da^2)).
    """
    if not darcy > 0:
        raise DomainError("Darcy number must be positive")
    return 2.0 / (darcy + math.sqrt(darcy * darcy + 4.0))


def darcy_number(viscosity: float, inlet_velocity: float, length: float,
                 radius: float, outlet_pressure: float) -> float:
    return 16.0 * viscosity * inlet_velocity * length / (radius**2 * outlet_pressure)
