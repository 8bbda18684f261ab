#! /usr/bin/env python
# Shooting the Euler-Lagrange system from the north pole.
#
# Start at theta = delta with y = 0 and x = x0, integrate to pi - delta and
# look at y there.  In flat space every x0 gives a boost x = x0 cos,
# y = -x0 r0 sin, so the terminal value is only an O(delta) seed artefact.
# In curved space nonzero x0 blows up and the only root is x0 = 0.

import numpy as np

from cnt_energy import make_metric, solve_el_shooting
from cnt_energy.elsolver import integrate_el, scan_terminal

mink = make_metric("minkowski")
sol = integrate_el(mink, 2.0, 0.3)
th = sol.nodes
print("boost: max|x - 0.3 cos| =", np.max(np.abs(sol.xs - 0.3 * np.cos(th))))

schw = make_metric("schwarzschild", m=1.0)
for x0, y_end in scan_terminal(schw, 3.0, [-0.2, -0.01, 0.0, 0.01, 0.2]):
    print(f"schwarzschild x0={x0: .2f}  y(pi - delta)={y_end: .4g}")

sol = solve_el_shooting(make_metric("kerr", 1.0, 0.7), 3.0)
print("kerr root x0 =", sol.x0, " sup|x|+sup|y| =", np.max(np.abs(sol.xs)) + np.max(np.abs(sol.ys)))
