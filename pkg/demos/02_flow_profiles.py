"""
Pressure-driven flow along the column
=====================================

With a 4:1 pressure ratio the carrier gas accelerates almost fourfold
towards the outlet. The transport coordinate omega compresses the column
length seen by the analytes.
"""
import numpy as np

from gcmodel import FlowField
from gcmodel.flow import darcy_number, outlet_pressure_from_darcy

flow = FlowField(pL_hat=1.013 / 4.01, L_hat=10683.0)
x = np.linspace(0.0, flow.L_hat, 6)

print(f"{'x^':>9}{'p^':>9}{'u^':>9}{'D ratio':>9}{'omega':>10}")
for xi, p, u, d, w in zip(x, flow.pressure(x), flow.velocity(x), flow.diffusion_ratio(x), flow.omega(x)):
    print(f"{xi:>9.0f}{p:>9.4f}{u:>9.4f}{d:>9.4f}{w:>10.1f}")

print(f"\nomega at the outlet: {flow.outlet_omega:.2f} (column length {flow.L_hat:g})")

# the outlet pressure can be predicted from the Darcy number of the column
da = darcy_number(2.3e-5, 0.41, 20.0, 9e-5, 1.013e5)
print(f"Darcy number {da:.3f} -> predicted pL/p0 = {outlet_pressure_from_darcy(da):.4f}, "
      f"measured {1.013 / 4.01:.4f}")

# without a pressure drop omega is the identity
flat = FlowField(1.0, 100.0)
print("pL^ = 1, omega(37.5) =", flat.omega(37.5))
