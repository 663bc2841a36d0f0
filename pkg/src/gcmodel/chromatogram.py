"""Outlet time series container shared by the solvers and the CLI."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

UNITS = ("dimensionless", "mol/m3", "a.u.")


@dataclass
class Chromatogram:
    """Outlet signal per analyte; ``values[i]`` is sampled at ``time``."""
    time: np.ndarray
    values: np.ndarray
    names: tuple[str, ...]
    unit: str = "dimensionless"
    time_unit: str = "dimensionless"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.time = np.asarray(self.time, dtype=float)
        self.values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if self.values.shape != (len(self.names), self.time.size):
            raise ValueError(f"values shape {self.values.shape} does not match "
                             f"{len(self.names)} analytes x {self.time.size} times")
        if self.unit not in UNITS:
            raise ValueError(f"unknown unit tag {self.unit!r}")

    def __getitem__(self, name: str) -> np.ndarray:
        return self.values[self.names.index(name)]

    def peak_times(self) -> np.ndarray:
        return self.time[np.argmax(self.values, axis=1)]

    def peak_heights(self) -> np.ndarray:
        return self.values.max(axis=1)

    def refined_peaks(self) -> tuple[np.ndarray, np.ndarray]:
        """Peak (time, height) per analyte from a parabola through the top three samples."""
        times, heights = [], []
        dt = np.diff(self.time)
        for row in self.values:
            k = int(np.argmax(row))
            if 0 < k < row.size - 1 and np.allclose(dt[k - 1], dt[k]):
                y0, y1, y2 = row[k - 1:k + 2]
                denom = y0 - 2 * y1 + y2
                s = 0.5 * (y0 - y2) / denom if denom != 0 else 0.0
                times.append(self.time[k] + s * dt[k])
                heights.append(y1 - 0.25 * (y0 - y2) * s)
            else:
                times.append(self.time[k])
                heights.append(row[k])
        return np.array(times), np.array(heights)

    def areas(self) -> np.ndarray:
        return np.trapezoid(self.values, self.time, axis=1)
