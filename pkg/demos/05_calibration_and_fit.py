"""
Calibrating the detector and fitting rate constants
===================================================

Conversion factors come from the calibration areas. A synthetic o-xylene
trace with 1 % noise and a flat baseline is then fitted back to
(k_a, k_d).
"""
import dataclasses
import time
import warnings

import numpy as np

from gcmodel import data_path, load_config
from gcmodel.calib import (Experiment, FitSettings, conversion_factor, estimate_baseline,
                           fit_analyte, synthetic_chromatogram)

cfg = load_config(data_path())
c = cfg.conditions
for name, area in cfg.calibration.items():
    f = conversion_factor(area, cfg.concentration_per_ppb, c.injection_time,
                          c.inlet_pressure, c.outlet_pressure)
    print(f"{name:<14} f = {f:.4e} a.u. per mol/m3")

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    exp = Experiment(cfg.geometry, c)
truth = dataclasses.replace(cfg.analytes[0], k_a=1.0e4, k_d=14.0)
factor = float(conversion_factor(cfg.calibration[truth.name], cfg.concentration_per_ppb,
                                 c.injection_time, c.inlet_pressure, c.outlet_pressure))

t = np.arange(0.0, 800.0, 0.7)
data = synthetic_chromatogram(exp, truth, t, factor, baseline=3935.4, noise=0.01, seed=1)
baseline = estimate_baseline(data, (100.0, 300.0))
print(f"\nbaseline estimate {baseline:.1f} a.u. (true 3935.4)")

start = time.perf_counter()
fit = fit_analyte(exp, truth, data, (440.0, 720.0), factor, baseline, FitSettings())
print(f"k_a = {fit.k_a:.1f} 1/s, k_d = {fit.k_d:.3f} 1/s, K = {fit.equilibrium_constant:.1f}")
print(f"SSE = {fit.sse:.4g} a.u.^2, R2 = {fit.r_squared:.5f}, "
      f"{fit.n_local} local searches, {fit.n_evaluations} model calls, "
      f"{time.perf_counter() - start:.1f} s")
