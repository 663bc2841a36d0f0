"""
Scaling a lab experiment
========================

Load the bundled BTEX run description and reduce it to the dimensionless
groups used by every solver.
"""
import warnings

import numpy as np

from gcmodel import data_path, load_config, nondimensionalize

cfg = load_config(data_path("btex_nasreddine.cfg"))

# the file lists both u0 and Q0, and they disagree by ~4 %; u0 is used
with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    g = nondimensionalize(cfg.geometry, cfg.conditions, cfg.analytes, cfg.reference)
for w in caught:
    print("note:", w.message)

print(f"length scale  L   = {g.length_scale:.5e} m")
print(f"time scale    tau = {g.time_scale:.5f} s  (= 1/k_d of {g.names[g.reference_index]})")
print(f"Damkohler     Da  = {g.Da:.5f}")
print(f"column        L^  = {g.L_hat:.1f},  t1^ = {g.t1_hat:.2f},  pL^ = {g.pL_hat:.5f}")
print()
print(f"{'analyte':<14}{'beta':>9}{'K_a=K_d':>10}{'Pe^-1':>12}")
for i, name in enumerate(g.names):
    print(f"{name:<14}{g.beta[i]:>9.4f}{g.K_a[i]:>10.4f}{g.Pe_inv[i]:>12.4e}")

# going back: dimensionless outputs map to SI through the same scales
print()
print("column length recovered:", g.meters(g.L_hat), "m")
print("injection time recovered:", g.seconds(g.t1_hat), "s")
print("q_e (mol/m3):", np.array2string(g.equilibrium_loading, precision=4))
