#! /usr/bin/env python
# E(0, 0) for the three built-in metrics.
#
# With both freedoms switched off the energy reduces to the Brown-York mass
# of the sphere r = r0.  For Schwarzschild that is r0 (1 - sqrt(1 - 2m/r0)),
# which approaches m far out and 2m on the horizon.

import numpy as np

from cnt_energy import energy_zero, make_metric

schw = make_metric("schwarzschild", m=1.0)
for r0 in (2.01, 2.5, 3.0, 10.0, 100.0):
    exact = r0 * (1 - np.sqrt(1 - 2 / r0))
    print(f"schwarzschild r0={r0:7.2f}  E={energy_zero(schw, r0):.15f}  closed form={exact:.15f}")

# Flat space carries no energy on any round sphere
mink = make_metric("minkowski")
print("minkowski     E(0,0) at r0=1:", energy_zero(mink, 1.0))

# Rotation: compare spins at fixed mass and radius
for a in (0.0, 0.5, 0.9, 1.0):
    kerr = make_metric("kerr", m=1.0, a=a)
    print(f"kerr a={a:.1f}     E(0,0) at r0=3: {energy_zero(kerr, 3.0):.12f}")
