"""Saddle classification of the trivial critical point (x, y) = (0, 0).

Sufficient test: if the mean curvature k of the sphere is positive, the
direction (u, v) = (1, 0) lowers the energy at second order, and wherever
K(theta) > 0 a bump f in the direction (-f cos, f sin) raises it.  Minkowski
space has K identically zero and is handled with two explicit directions.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .energy import FreedomField, energy_zero, wang_yau_energy_axisym
from .metrics import eval_metric, make_metric, mean_curvature_k
from .quadrature import gauss_legendre_grid
from .report import dumps_csv, dumps_json
from .variation import K_coefficient, random_direction, second_variation_f, second_variation_Q

__all__ = [
    "SaddleVerdict",
    "bump",
    "saddle_check",
    "minkowski_saddle_check",
    "classify",
    "k_positivity_scan",
    "parameter_sweep",
    "SWEEP_HEADER",
    "SCAN_HEADER",
    "sweep_csv",
    "verdict_scan",
    "wang_yau_samples",
]

SWEEP_HEADER = ("r0", "E00", "Kmax", "verdict")
SCAN_HEADER = ("m", "a", "r0", "Kmax", "theta0", "neg_value", "pos_value", "verdict")

# K is O(r0); anything below this multiple of r0 is roundoff (Minkowski K == 0)
K_RELTOL = 1e-10


@dataclass
class SaddleVerdict:
    k_positive: bool
    K_max: float
    theta0: float
    negative_direction: str
    negative_value: float
    positive_direction: str
    positive_support: tuple
    positive_value: float
    verdict: str
    route: str = "K-coefficient"

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "route": self.route,
            "k_positive": self.k_positive,
            "K_max": self.K_max,
            "theta0": self.theta0,
            "negative_witness": {"direction": self.negative_direction,
                                 "delta2E": self.negative_value},
            "positive_witness": {"direction": self.positive_direction,
                                 "support": list(self.positive_support),
                                 "delta2E": self.positive_value},
        }

    def to_json(self):
        return dumps_json(self.to_dict())


def bump(a, b):
    """Smooth bump exp(-1 / (1 - s^2)) with s mapping [a, b] onto [-1, 1]."""
    mid, half = 0.5 * (a + b), 0.5 * (b - a)

    def f(theta):
        s = (np.asarray(theta, dtype=float) - mid) / half
        out = np.zeros_like(s)
        inside = np.abs(s) < 1.0
        out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
        return out

    return f


def _one(theta):
    return np.ones_like(np.asarray(theta, dtype=float))


def _zero(theta):
    return np.zeros_like(np.asarray(theta, dtype=float))


def saddle_check(metric, r0, grid=None):
    """Apply the curvature/K test at (0, 0) and return the witnesses.

    The verdict is ``"saddle"`` only when k > 0 on every node, K exceeds
    roundoff somewhere, and both witness values have the required signs.
    Otherwise the test is ``"inconclusive"`` (it is only sufficient).
    """
    grid = grid or gauss_legendre_grid(128)
    th = grid.nodes
    k = mean_curvature_k(metric, r0, th)
    k_positive = bool(np.all(k > 0))
    K = K_coefficient(metric, r0, th)
    i = int(np.argmax(K))
    K_max, theta0 = float(K[i]), float(th[i])

    neg = second_variation_Q(metric, r0, _one, _zero, grid, du=_zero, dv=_zero).delta2E

    support = (float("nan"), float("nan"))
    pos = 0.0
    positive = K > K_RELTOL * r0
    if positive[i]:
        lo = i
        while lo > 0 and positive[lo - 1]:
            lo -= 1
        hi = i
        while hi < len(th) - 1 and positive[hi + 1]:
            hi += 1
        support = (float(th[lo]), float(th[hi]))
        if hi - lo >= 2:
            pos = second_variation_f(metric, r0, bump(*support), grid)

    verdict = "saddle" if (k_positive and positive[i] and neg < 0 and pos > 0) else "inconclusive"
    return SaddleVerdict(
        k_positive=k_positive, K_max=K_max, theta0=theta0,
        negative_direction="(u, v) = (1, 0)", negative_value=neg,
        positive_direction="(u, v) = (-f cos(theta), f sin(theta)), f = bump",
        positive_support=support, positive_value=pos, verdict=verdict)


def minkowski_saddle_check(r0, grid=None):
    """Minkowski route: delta2E(1, 0) = -r0 and delta2E(-(2/3)cos^2, sin cos) = r0/45."""
    grid = grid or gauss_legendre_grid(128)
    metric = make_metric("minkowski")
    neg = second_variation_Q(metric, r0, _one, _zero, grid, du=_zero, dv=_zero).delta2E
    pos = second_variation_Q(
        metric, r0,
        lambda t: -2.0 / 3.0 * np.cos(t) ** 2,
        lambda t: np.sin(t) * np.cos(t),
        grid,
        du=lambda t: 4.0 / 3.0 * np.cos(t) * np.sin(t),
        dv=lambda t: np.cos(2.0 * t),
    ).delta2E
    k = mean_curvature_k(metric, r0, grid.nodes)
    K = K_coefficient(metric, r0, grid.nodes)
    i = int(np.argmax(K))
    k_positive = bool(np.all(k > 0))
    return SaddleVerdict(
        k_positive=k_positive, K_max=float(K[i]), theta0=float(grid.nodes[i]),
        negative_direction="(u, v) = (1, 0)", negative_value=neg,
        positive_direction="(u, v) = (-(2/3) cos^2(theta), sin(theta) cos(theta))",
        positive_support=(0.0, float(np.pi)), positive_value=pos,
        verdict="saddle" if (neg < 0 and pos > 0) else "inconclusive",
        route="minkowski")


def classify(metric, r0, grid=None):
    """:func:`saddle_check`, falling back to the Minkowski route for flat space."""
    if metric.kind == "minkowski":
        return minkowski_saddle_check(r0, grid)
    return saddle_check(metric, r0, grid)


def k_positivity_scan(metric, r_values, theta_samples):
    """Minimum of (sqrt(H) Sigma)_r and of k over an (r, theta) sample set.

    Returns a dict with the per-r table and the overall ``all_positive`` flag.
    Use interior theta: (sqrt(H) Sigma)_r vanishes on the axis.
    """
    theta_samples = np.asarray(theta_samples, dtype=float)
    rows = []
    for r in np.atleast_1d(np.asarray(r_values, dtype=float)):
        mv = eval_metric(metric, r, theta_samples)
        k = mean_curvature_k(metric, r, theta_samples)
        rows.append((float(r), float(np.min(mv.sqrtHSigma_r)), float(np.min(k))))
    return {
        "rows": rows,
        "min_sqrtHSigma_r": min(row[1] for row in rows),
        "min_k": min(row[2] for row in rows),
        "all_positive": all(row[1] > 0 and row[2] > 0 for row in rows),
    }


def _sweep_row(metric, r0, grid):
    v = classify(metric, r0, grid)
    return (float(r0), energy_zero(metric, r0, grid), v.K_max, v.verdict)


def parameter_sweep(metric, r0_values, grid=None, workers=None):
    """Rows ``(r0, E00, Kmax, verdict)``; r0 values are processed in parallel."""
    grid = grid or gauss_legendre_grid(128)
    r0_values = [float(r) for r in r0_values]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda r: _sweep_row(metric, r, grid), r0_values))


def sweep_csv(rows):
    return dumps_csv(SWEEP_HEADER, rows)


def verdict_scan(params, grid=None, workers=None):
    """Rows of :data:`SCAN_HEADER` for a list of ``(m, a, r0)`` Kerr-family tuples."""
    grid = grid or gauss_legendre_grid(128)

    def row(p):
        m, a, r0 = p
        metric = make_metric("kerr", m, a) if a > 0 else make_metric("schwarzschild", m)
        v = saddle_check(metric, r0, grid)
        return (m, a, r0, v.K_max, v.theta0, v.negative_value, v.positive_value, v.verdict)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(row, list(params)))


def wang_yau_samples(metric, r0, samples=20, seed=0, grid=None, scale=0.3):
    """E(y) - E(0, 0) over random time functions, with x fixed by y.

    y = Sigma v with v a random sine series, so y vanishes on the axis.  This is
    supporting data only: nonnegative excesses are consistent with y = 0
    minimising E(y), they do not prove it.
    """
    grid = grid or gauss_legendre_grid(128)
    rng = np.random.default_rng(seed)
    e00 = energy_zero(metric, r0, grid)
    out = []
    for _ in range(samples):
        _, v, _, dv = random_direction(rng, scale=scale)

        def y(t, v=v):
            return eval_metric(metric, r0, t).Sigma * v(t)

        def y_th(t, v=v, dv=dv):
            mv = eval_metric(metric, r0, t)
            return mv.Sigma_th * v(t) + mv.Sigma * dv(t)

        rep = wang_yau_energy_axisym(metric, r0, FreedomField(y=y, y_th=y_th), grid,
                                     estimate_error=False)
        out.append(rep.value - e00)
    return out
