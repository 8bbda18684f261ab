#! /usr/bin/env python
# Is (0, 0) a saddle?
#
# With positive mean curvature the direction (u, v) = (1, 0) lowers E, and a
# bump f placed where K(theta) > 0 in the direction (-f cos, f sin) raises it.

import numpy as np

from cnt_energy import K_coefficient, classify, make_metric

for a in (0.25, 0.5, 1.0):
    kerr = make_metric("kerr", m=1.0, a=a)
    for r0 in (2.5, 3.0, 5.0, 10.0):
        v = classify(kerr, r0)
        bound = r0 * (1 - np.sqrt(1 - 1 / r0**2))
        K_eq = float(K_coefficient(kerr, r0, np.pi / 2))
        print(f"a={a:4.2f} r0={r0:5.1f}  {v.verdict:8s}  neg={v.negative_value: .4f}  "
              f"pos={v.positive_value:.3e}  K(pi/2)={K_eq:.4f} >= {bound:.4f}")

# Flat space: K vanishes, so an explicit pair of directions is used instead
v = classify(make_metric("minkowski"), 1.0)
print("minkowski:", v.verdict, v.negative_value, v.positive_value)
