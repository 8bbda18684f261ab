#! /usr/bin/env python
# Second variation of E around the trivial critical point.
#
# Directions are written as x = eps R u, y = eps Sigma v.  The closed-form
# quadratic form Q(u, v) is checked against central differences of the full
# energy density.

import numpy as np

from cnt_energy import fd_variation, make_metric, second_variation_Q
from cnt_energy.variation import random_direction

mink = make_metric("minkowski")

# The two flat-space witnesses: -r0 and r0/45
one, zero = np.ones_like, np.zeros_like
print("delta2E(1, 0)            =", second_variation_Q(mink, 1.0, one, zero, du=zero, dv=zero).delta2E)
u = lambda t: -2 / 3 * np.cos(t) ** 2
v = lambda t: np.sin(t) * np.cos(t)
q = second_variation_Q(mink, 1.0, u, v)
print("delta2E(-2/3 cos^2, s c) =", q.delta2E, " (1/45 =", 1 / 45, ")")
print("  breakdown:", q.term_radial, q.term_v2, q.term_cross)

# Random admissible directions on Kerr: FD versus closed form
kerr = make_metric("kerr", m=1.0, a=0.8)
rng = np.random.default_rng(0)
for _ in range(5):
    u, v, du, dv = random_direction(rng)
    first, second = fd_variation(kerr, 3.0, u, v, 1e-3, du=du, dv=dv)
    exact = second_variation_Q(kerr, 3.0, u, v, du=du, dv=dv).delta2E
    print(f"first={first: .1e}  FD second={second: .10f}  2Q={exact: .10f}")
