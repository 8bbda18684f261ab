"""Shooting solver for the Euler-Lagrange system of E(x, y).

The system has regular singular points on the axis (the y-equation carries a
cot(theta)-like coefficient).  Integration therefore starts at theta = delta
with y(delta) = 0 and the shooting parameter x(delta) = x0, and runs to
pi - delta.  Steps are taken uniformly in sigma = log(tan(theta / 2)), for
which d theta / d sigma = sin(theta): the singular coefficient becomes
bounded and fixed-step RK4 stays stable up to the end points.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .energy import FreedomField
from .errors import BlowUp, InvalidParams, NoRoot
from .metrics import MetricValues, eval_metric
from .report import dumps_csv
from .variation import el_rhs

__all__ = [
    "ShootingConfig",
    "ELSolution",
    "integrate_el",
    "shoot_terminal",
    "scan_terminal",
    "solve_el_shooting",
    "solve_all_el",
]

BLOWUP = 1e6


@dataclass(frozen=True)
class ShootingConfig:
    delta: float = 1e-4
    steps: int = 8000
    tol: float = 1e-8
    max_bisect: int = 200

    def __post_init__(self):
        if not 0 < self.delta < 0.1:
            raise InvalidParams("start offset delta must lie in (0, 0.1)")
        if self.steps < 200:
            raise InvalidParams("need at least 200 RK4 steps")
        if not self.tol > 0:
            raise InvalidParams("tol must be positive")


@dataclass
class ELSolution(FreedomField):
    """Solved field on [delta, pi - delta] with cubic Hermite interpolation."""

    x0: float = 0.0
    terminal_y: float = 0.0
    nodes: np.ndarray = field(default=None, repr=False)
    xs: np.ndarray = field(default=None, repr=False)
    ys: np.ndarray = field(default=None, repr=False)
    scan: list = field(default_factory=list, repr=False)

    def to_csv(self):
        return dumps_csv(["theta", "x", "y"], zip(self.nodes.tolist(), self.xs.tolist(),
                                                  self.ys.tolist()))

    def axis_regularity(self):
        """x'(theta) at the two ends of the integration interval."""
        _, _, x_th, _ = self.values(np.array([self.nodes[0], self.nodes[-1]]))
        return float(x_th[0]), float(x_th[1])


class _Stages:
    """Metric values at every RK4 stage point, precomputed once."""

    def __init__(self, metric, r0, config):
        sa = np.log(np.tan(config.delta / 2.0))
        self.h = -2.0 * sa / config.steps
        sig = sa + self.h * np.arange(config.steps + 1)
        mid = sig[:-1] + 0.5 * self.h
        self.theta = 2.0 * np.arctan(np.exp(sig))
        self.theta_mid = 2.0 * np.arctan(np.exp(mid))
        self.mv = _split(eval_metric(metric, r0, self.theta))
        self.mv_mid = _split(eval_metric(metric, r0, self.theta_mid))
        self.jac = np.sin(self.theta)
        self.jac_mid = np.sin(self.theta_mid)


def _split(mv):
    d = {k: np.asarray(v) for k, v in mv.as_dict().items()}
    n = d["H"].size
    return [MetricValues(**{k: float(v[i]) for k, v in d.items()}) for i in range(n)]


def _rk4(stages, x0):
    """Integrate a batch of shooting parameters; returns (xs, ys, blowup_index)."""
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    n = len(stages.theta)
    xs = np.full((n, x0.size), np.nan)
    ys = np.full((n, x0.size), np.nan)
    x, y = x0.copy(), np.zeros_like(x0)
    xs[0], ys[0] = x, y
    alive = np.ones(x0.size, dtype=bool)
    blown = np.full(x0.size, -1)
    h = stages.h

    def f(mv, jac, x, y):
        dx, dy = el_rhs(mv, x, y)
        return jac * dx, jac * dy

    for i in range(n - 1):
        a, b = x[alive], y[alive]
        k1 = f(stages.mv[i], stages.jac[i], a, b)
        k2 = f(stages.mv_mid[i], stages.jac_mid[i], a + 0.5 * h * k1[0], b + 0.5 * h * k1[1])
        k3 = f(stages.mv_mid[i], stages.jac_mid[i], a + 0.5 * h * k2[0], b + 0.5 * h * k2[1])
        k4 = f(stages.mv[i + 1], stages.jac[i + 1], a + h * k3[0], b + h * k3[1])
        x[alive] = a + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        y[alive] = b + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        bad = alive & ~((np.abs(x) <= BLOWUP) & (np.abs(y) <= BLOWUP))
        if np.any(bad):
            blown[bad] = i + 1
            alive &= ~bad
        xs[i + 1, alive] = x[alive]
        ys[i + 1, alive] = y[alive]
        xs[i + 1, bad] = x[bad]
        ys[i + 1, bad] = y[bad]
        if not np.any(alive):
            break
    return xs, ys, blown


def _solution(metric, r0, stages, x0, xs, ys):
    from scipy.interpolate import CubicHermiteSpline

    th = stages.theta
    mv = eval_metric(metric, r0, th)
    dx, dy = el_rhs(mv, xs, ys)
    sx = CubicHermiteSpline(th, xs, dx)
    sy = CubicHermiteSpline(th, ys, dy)
    return ELSolution(x=sx, y=sy, x_th=sx.derivative(), y_th=sy.derivative(),
                      label=f"EL x0={x0:.17g}", x0=float(x0), terminal_y=float(ys[-1]),
                      nodes=th, xs=xs, ys=ys)


def integrate_el(metric, r0, x0, config=None, stages=None):
    """Integrate the EL system from theta = delta with x = x0, y = 0.

    Returns an :class:`ELSolution`; raises :class:`BlowUp` when |x| or |y|
    exceeds 1e6.
    """
    config = config or ShootingConfig()
    stages = stages or _Stages(metric, r0, config)
    xs, ys, blown = _rk4(stages, [x0])
    if blown[0] >= 0:
        i = blown[0]
        raise BlowUp(float(stages.theta[i]), float(xs[i, 0]), float(ys[i, 0]))
    return _solution(metric, r0, stages, x0, xs[:, 0], ys[:, 0])


def scan_terminal(metric, r0, x0_values, config=None, stages=None):
    """Terminal y(pi - delta) for each x0; blown-up runs report a signed inf."""
    config = config or ShootingConfig()
    stages = stages or _Stages(metric, r0, config)
    x0_values = np.asarray(x0_values, dtype=float)
    _, ys, blown = _rk4(stages, x0_values)
    out = []
    for j, x0 in enumerate(x0_values):
        if blown[j] >= 0:
            out.append((float(x0), float(np.copysign(np.inf, ys[blown[j], j]))))
        else:
            out.append((float(x0), float(ys[-1, j])))
    return out


def shoot_terminal(metric, r0, x0, config=None):
    return scan_terminal(metric, r0, [x0], config)[0][1]


def _default_scan():
    return np.round(np.linspace(-1.0, 1.0, 21), 12)


def _brackets(scan):
    """Exact zeros and sign-change intervals of a scan table."""
    roots, brackets = [], []
    for (a, fa), (b, fb) in zip(scan, scan[1:]):
        if fa == 0.0:
            roots.append(a)
        elif np.sign(fa) * np.sign(fb) < 0:
            # a blown-up run still carries the sign of its divergence
            brackets.append((a, b))
    if scan and scan[-1][1] == 0.0:
        roots.append(scan[-1][0])
    return roots, brackets


def _bisect(metric, r0, lo, hi, flo, config, stages):
    for _ in range(config.max_bisect):
        mid = 0.5 * (lo + hi)
        fmid = scan_terminal(metric, r0, [mid], config, stages)[0][1]
        if fmid == 0.0 or abs(fmid) < config.tol:
            return mid
        if mid in (lo, hi):
            # bracket at machine precision; the root cannot be resolved further
            return mid
        if np.sign(fmid) == np.sign(flo):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def solve_el_shooting(metric, r0, bracket=None, config=None, scan_values=None):
    """Find x0 with y(pi - delta) = 0 by bisection.

    ``bracket=(lo, hi)`` must show a sign change in the terminal value (an
    exact zero at an end point is accepted).  With ``bracket=None`` the
    shooting parameter is scanned over ``scan_values`` (default -1..1 in
    steps of 0.1) and the root closest to zero is returned.  Raises
    :class:`NoRoot` carrying the scan table when nothing is bracketed.
    """
    config = config or ShootingConfig()
    stages = _Stages(metric, r0, config)
    if bracket is not None:
        lo, hi = sorted(float(b) for b in bracket)
        scan = scan_terminal(metric, r0, [lo, hi], config, stages)
    else:
        values = _default_scan() if scan_values is None else np.asarray(scan_values, dtype=float)
        scan = scan_terminal(metric, r0, values, config, stages)
    roots, brackets = _brackets(scan)
    candidates = [(abs(r), r, None) for r in roots]
    candidates += [(min(abs(a), abs(b)), a, b) for a, b in brackets]
    if not candidates:
        raise NoRoot("no sign change of the terminal value y(pi - delta)", scan)
    candidates.sort(key=lambda c: c[0])
    _, a, b = candidates[0]
    if b is None:
        x0 = a
    else:
        fa = dict(scan)[a]
        x0 = _bisect(metric, r0, a, b, fa, config, stages)
    sol = integrate_el(metric, r0, x0, config, stages)
    sol.scan = scan
    return sol


def solve_all_el(metric, r0, scan_values=None, config=None):
    """Every root bracketed by the scan, in ascending x0."""
    config = config or ShootingConfig()
    stages = _Stages(metric, r0, config)
    values = _default_scan() if scan_values is None else np.asarray(scan_values, dtype=float)
    scan = scan_terminal(metric, r0, values, config, stages)
    roots, brackets = _brackets(scan)
    fa = dict(scan)
    x0s = sorted(roots + [_bisect(metric, r0, a, b, fa[a], config, stages) for a, b in brackets])
    sols = []
    for x0 in x0s:
        sol = integrate_el(metric, r0, x0, config, stages)
        sol.scan = scan
        sols.append(sol)
    return sols, scan
