"""Axially symmetric Kerr-like metrics.

The line element is

    g = F dt^2 + 2 G dt dphi + H dphi^2 + R^2 dr^2 + Sigma^2 dtheta^2

with every component a function of (r, theta) only.  The built-in families
(Minkowski, Schwarzschild, Kerr in Boyer-Lindquist form) carry hand-coded
analytic partial derivatives.  Custom metrics, either from closures or from a
tabulated grid file, get their partials from central finite differences.

All evaluators accept a scalar ``r`` and a scalar or array ``theta``; the
returned :class:`MetricValues` holds arrays of the same shape as ``theta``.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .errors import DomainError, InvalidParams

__all__ = [
    "MetricValues",
    "AxisymMetric",
    "SchwarzschildMetric",
    "KerrMetric",
    "CustomMetric",
    "make_metric",
    "eval_metric",
    "fd_partials",
    "mean_curvature_k",
    "load_grid_metric",
    "load_metric_config",
    "BUILTIN_KINDS",
]

BUILTIN_KINDS = ("minkowski", "schwarzschild", "kerr")


@dataclass(frozen=True)
class MetricValues:
    """Metric components and the partial derivatives the integrands need.

    ``HSigma2_r`` is (H Sigma^2)_r, which the Euler-Lagrange system also
    writes as (Sigma^2 H)_r; ``sqrtHSigma_r`` is (sqrt(H) Sigma)_r.
    """

    F: np.ndarray
    G: np.ndarray
    H: np.ndarray
    R: np.ndarray
    Sigma: np.ndarray
    H_th: np.ndarray
    H_thth: np.ndarray
    H_r: np.ndarray
    Sigma_th: np.ndarray
    Sigma_r: np.ndarray
    R_th: np.ndarray
    HSigma2_r: np.ndarray
    sqrtHSigma_r: np.ndarray

    @property
    def Sigma2H_r(self):
        return self.HSigma2_r

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


class AxisymMetric:
    """Base class; subclasses implement :meth:`components` and :meth:`_partials`."""

    kind = "custom"
    m = 0.0
    a = 0.0

    # open lower bound on r; ``r_max`` is an inclusive upper bound
    r_min = 0.0
    r_max = np.inf

    def components(self, r, theta):
        """Return ``(F, G, H, R, Sigma)`` at ``(r, theta)``."""
        raise NotImplementedError

    def check_r(self, r):
        if not np.isfinite(r) or r <= self.r_min or r > self.r_max:
            raise DomainError(
                f"r={r!r} outside the valid range ({self.r_min}, {self.r_max}] "
                f"of the {self.kind} metric")

    def evaluate(self, r, theta):
        r = float(r)
        self.check_r(r)
        theta = np.asarray(theta, dtype=float)
        if np.any(theta < 0.0) or np.any(theta > np.pi):
            raise DomainError("theta must lie in [0, pi]")
        return self._partials(r, theta)

    def _partials(self, r, theta):
        raise NotImplementedError

    def mean_curvature(self, r, theta):
        mv = self.evaluate(r, theta)
        sqrtH = np.sqrt(mv.H)
        if np.any(sqrtH == 0.0):
            raise DomainError("mean curvature is undefined on the axis for a custom metric")
        return mv.sqrtHSigma_r / (sqrtH * mv.R * mv.Sigma)

    def describe(self):
        return {"kind": self.kind, "m": self.m, "a": self.a}

    def __repr__(self):
        return f"{type(self).__name__}(kind={self.kind!r}, m={self.m!r}, a={self.a!r})"


class SchwarzschildMetric(AxisymMetric):
    """Schwarzschild metric; ``m == 0`` gives Minkowski space in spherical coordinates."""

    def __init__(self, m=1.0):
        if m < 0:
            raise InvalidParams("mass must be non-negative")
        self.m = float(m)
        self.a = 0.0
        self.kind = "schwarzschild" if m > 0 else "minkowski"
        self.r_min = 2.0 * self.m

    def components(self, r, theta):
        s = np.sin(theta)
        lapse2 = 1.0 - 2.0 * self.m / r
        one = np.ones_like(s)
        return (-lapse2 * one, 0.0 * one, r**2 * s**2, one / np.sqrt(lapse2), r * one)

    def _partials(self, r, theta):
        m = self.m
        s, c = np.sin(theta), np.cos(theta)
        one = np.ones_like(s)
        zero = np.zeros_like(s)
        lapse2 = 1.0 - 2.0 * m / r
        return MetricValues(
            F=-lapse2 * one,
            G=zero,
            H=r**2 * s**2,
            R=one / np.sqrt(lapse2),
            Sigma=r * one,
            H_th=2.0 * r**2 * s * c,
            H_thth=2.0 * r**2 * (c**2 - s**2),
            H_r=2.0 * r * s**2,
            Sigma_th=zero,
            Sigma_r=one,
            R_th=zero,
            HSigma2_r=4.0 * r**3 * s**2,
            sqrtHSigma_r=2.0 * r * s,
        )

    def mean_curvature(self, r, theta):
        self.check_r(float(r))
        theta = np.asarray(theta, dtype=float)
        return 2.0 * np.sqrt(1.0 - 2.0 * self.m / r) / r * np.ones_like(theta)


class KerrMetric(AxisymMetric):
    """Kerr metric in Boyer-Lindquist coordinates.

    H is built from the combination H Sigma^2 = sin^2(theta) P with
    P = (r^2 + a^2)^2 - Delta a^2 sin^2(theta), so the axis zero of H comes
    from the explicit sin^2 factor.  Sigma^2 = r^2 + a^2 cos^2(theta),
    R^2 = Sigma^2 / Delta and Delta = r^2 - 2 m r + a^2.
    """

    kind = "kerr"

    def __init__(self, m=1.0, a=0.5):
        if m <= 0:
            raise InvalidParams("Kerr mass must be positive")
        if a < 0:
            raise InvalidParams("spin a must be non-negative")
        if a > m:
            raise InvalidParams(f"spin a={a} exceeds mass m={m}")
        self.m = float(m)
        self.a = float(a)
        self.r_min = self.m + np.sqrt(self.m**2 - self.a**2)

    def components(self, r, theta):
        m, a = self.m, self.a
        s2 = np.sin(theta) ** 2
        S2 = r**2 + a**2 * (1.0 - s2)
        Delta = r**2 - 2.0 * m * r + a**2
        P = (r**2 + a**2) ** 2 - Delta * a**2 * s2
        F = -(1.0 - 2.0 * m * r / S2)
        G = -2.0 * m * a * r * s2 / S2
        return F, G, s2 * P / S2, np.sqrt(S2 / Delta), np.sqrt(S2)

    def _partials(self, r, theta):
        m, a = self.m, self.a
        s, c = np.sin(theta), np.cos(theta)
        s2 = s**2
        s2_th = 2.0 * s * c
        s2_thth = 2.0 * (c**2 - s2)

        S2 = r**2 + a**2 * c**2
        S2_th = -a**2 * s2_th
        S2_thth = -a**2 * s2_thth
        Delta = r**2 - 2.0 * m * r + a**2
        Delta_r = 2.0 * r - 2.0 * m

        P = (r**2 + a**2) ** 2 - Delta * a**2 * s2
        P_th = -Delta * a**2 * s2_th
        P_thth = -Delta * a**2 * s2_thth
        P_r = 4.0 * r * (r**2 + a**2) - Delta_r * a**2 * s2

        # W = H Sigma^2
        W = s2 * P
        W_th = s2_th * P + s2 * P_th
        W_thth = s2_thth * P + 2.0 * s2_th * P_th + s2 * P_thth
        W_r = s2 * P_r

        H = W / S2
        H_th = W_th / S2 - W * S2_th / S2**2
        H_thth = (W_thth / S2 - 2.0 * W_th * S2_th / S2**2
                  - W * S2_thth / S2**2 + 2.0 * W * S2_th**2 / S2**3)
        H_r = W_r / S2 - 2.0 * r * W / S2**2

        Sigma = np.sqrt(S2)
        R = np.sqrt(S2 / Delta)
        return MetricValues(
            F=-(1.0 - 2.0 * m * r / S2),
            G=-2.0 * m * a * r * s2 / S2,
            H=H,
            R=R,
            Sigma=Sigma,
            H_th=H_th,
            H_thth=H_thth,
            H_r=H_r,
            Sigma_th=S2_th / (2.0 * Sigma),
            Sigma_r=r / Sigma,
            R_th=S2_th / (2.0 * R * Delta),
            HSigma2_r=W_r,
            # sqrt(H) Sigma = sin(theta) sqrt(P)
            sqrtHSigma_r=s * P_r / (2.0 * np.sqrt(P)),
        )

    def mean_curvature(self, r, theta):
        r = float(r)
        self.check_r(r)
        m, a = self.m, self.a
        s2 = np.sin(np.asarray(theta, dtype=float)) ** 2
        S2 = r**2 + a**2 * (1.0 - s2)
        Delta = r**2 - 2.0 * m * r + a**2
        P = (r**2 + a**2) ** 2 - Delta * a**2 * s2
        P_r = 4.0 * r * (r**2 + a**2) - (2.0 * r - 2.0 * m) * a**2 * s2
        return P_r / (2.0 * P * np.sqrt(S2 / Delta))


class CustomMetric(AxisymMetric):
    """Metric given by a component closure; partials come from finite differences.

    ``components(r, theta)`` must return ``(F, G, H, R, Sigma)`` and accept an
    array ``theta``.  Evaluation is restricted to the open interval
    ``0 < theta < pi`` because the difference stencils cannot straddle the axis.
    """

    kind = "custom"

    def __init__(self, components, r_min=0.0, r_max=np.inf, h=1e-5, h2=1e-3):
        self._components = components
        self.r_min = float(r_min)
        self.r_max = float(r_max)
        self.h = h
        self.h2 = h2

    def components(self, r, theta):
        return tuple(np.asarray(v, dtype=float) for v in self._components(r, theta))

    def _partials(self, r, theta):
        if np.any(theta <= 0.0) or np.any(theta >= np.pi):
            raise DomainError("custom metrics are evaluated at interior theta only")
        edge = np.minimum(theta, np.pi - theta) / 4.0
        return fd_partials(self, r, theta, h=np.minimum(self.h, edge),
                           h2=np.minimum(self.h2, edge))


def make_metric(kind, m=None, a=None):
    """Build one of the built-in metrics.

    ``kind`` is ``"minkowski"``, ``"schwarzschild"`` or ``"kerr"``.  Kerr
    accepts ``a = 0``, which reproduces Schwarzschild.
    """
    kind = str(kind).lower()
    if kind == "minkowski":
        if m not in (None, 0, 0.0) or a not in (None, 0, 0.0):
            raise InvalidParams("minkowski takes no mass or spin")
        return SchwarzschildMetric(0.0)
    if kind == "schwarzschild":
        if m is None or m <= 0:
            raise InvalidParams("schwarzschild requires m > 0")
        if a not in (None, 0, 0.0):
            raise InvalidParams("schwarzschild has no spin; use kind='kerr'")
        return SchwarzschildMetric(m)
    if kind == "kerr":
        if m is None or a is None:
            raise InvalidParams("kerr requires both m and a")
        return KerrMetric(m, a)
    raise InvalidParams(f"unknown metric kind {kind!r}; custom metrics use load_grid_metric")


def eval_metric(metric, r, theta):
    """Components and partials of ``metric`` at ``(r, theta)``."""
    return metric.evaluate(r, theta)


def _d1(f, x, h):
    return (f(x + h) - f(x - h)) / (2.0 * h)


def _d2(f, x, h):
    # five-point, fourth order; a wider step than the first derivative keeps
    # the 1/h^2 roundoff amplification small
    return (-f(x + 2 * h) + 16.0 * f(x + h) - 30.0 * f(x)
            + 16.0 * f(x - h) - f(x - 2 * h)) / (12.0 * h**2)


def fd_partials(metric, r, theta, h=1e-5, h2=None):
    """Finite-difference :class:`MetricValues` built from ``metric.components``.

    First derivatives use second-order central differences with step ``h``
    (in theta; ``h * max(1, r)`` in r).  ``H_thth`` uses a fourth-order
    five-point stencil with step ``h2`` (default ``max(h, 1e-3)``).
    """
    r = float(r)
    theta = np.asarray(theta, dtype=float)
    h = np.asarray(h, dtype=float)
    if h2 is None:
        h2 = np.maximum(h, 1e-3)
    h2 = np.asarray(h2, dtype=float)
    if np.any(h <= 0) or np.any(h2 <= 0):
        raise InvalidParams("finite-difference steps must be positive")
    if (np.any(theta - np.maximum(h, 2 * h2) < 0.0)
            or np.any(theta + np.maximum(h, 2 * h2) > np.pi)):
        raise DomainError("finite-difference stencil leaves [0, pi]")
    hr = float(np.max(h)) * max(1.0, abs(r))
    metric.check_r(r)
    metric.check_r(r - hr)
    metric.check_r(r + hr)

    def comp(i):
        return lambda th: np.asarray(metric.components(r, th)[i], dtype=float)

    def comp_r(i):
        return lambda rr: np.asarray(metric.components(rr, theta)[i], dtype=float)

    F, G, H, R, Sigma = metric.components(r, theta)
    H_r = _d1(comp_r(2), r, hr)
    Sigma_r = _d1(comp_r(4), r, hr)

    def sqrtHSigma(rr):
        _, _, HH, _, SS = metric.components(rr, theta)
        return np.sqrt(HH) * SS

    def HSigma2(rr):
        _, _, HH, _, SS = metric.components(rr, theta)
        return HH * SS**2

    shape = np.shape(theta)
    return MetricValues(
        F=np.broadcast_to(F, shape).astype(float),
        G=np.broadcast_to(G, shape).astype(float),
        H=np.broadcast_to(H, shape).astype(float),
        R=np.broadcast_to(R, shape).astype(float),
        Sigma=np.broadcast_to(Sigma, shape).astype(float),
        H_th=_d1(comp(2), theta, h),
        H_thth=_d2(comp(2), theta, h2),
        H_r=H_r,
        Sigma_th=_d1(comp(4), theta, h),
        Sigma_r=Sigma_r,
        R_th=_d1(comp(3), theta, h),
        HSigma2_r=_d1(HSigma2, r, hr),
        sqrtHSigma_r=_d1(sqrtHSigma, r, hr),
    )


def mean_curvature_k(metric, r, theta):
    """Mean curvature of the sphere r = const along the radial outer normal.

    k = (sqrt(H) Sigma)_r / (sqrt(H) R Sigma).  Built-in metrics use the
    simplified form in which the sin(theta) factors have cancelled, so the
    value on the axis is the limit from the interior.
    """
    return metric.mean_curvature(r, theta)


_GRID_COLUMNS = ("r", "theta", "F", "G", "H", "R", "Sigma")


def _axis_regular_part(ths, H):
    """H / sin^2(theta) per row, with the axis columns filled by even extrapolation.

    Near the poles H ~ sin^2(theta) h(theta) with h even about the pole, so
    h(0) = (h1 t2^2 - h2 t1^2) / (t2^2 - t1^2) from the two nearest columns.
    """
    h = np.empty_like(H)
    s2 = np.sin(ths) ** 2
    interior = s2 > 1e-20
    h[:, interior] = H[:, interior] / s2[interior]
    for j in np.flatnonzero(~interior):
        d = np.abs(ths - ths[j])
        near = [k for k in np.argsort(d) if interior[k]][:2]
        (k1, k2), (t1, t2) = near, (d[near[0]], d[near[1]])
        h[:, j] = (h[:, k1] * t2**2 - h[:, k2] * t1**2) / (t2**2 - t1**2)
    return h


def _mirror(ths, values, extra=3):
    """Reflect ``extra`` columns evenly across theta = 0 and theta = pi."""
    left = -ths[1:extra + 1][::-1]
    right = 2 * np.pi - ths[-extra - 1:-1][::-1]
    return (np.concatenate([left, ths, right]),
            np.concatenate([values[:, 1:extra + 1][:, ::-1], values,
                            values[:, -extra - 1:-1][:, ::-1]], axis=1))


def load_grid_metric(path):
    """Custom metric from a plain-text table with header ``r theta F G H R Sigma``.

    Rows are ordered with r as the outer index and theta as the inner index,
    and theta must run from 0 to pi.  Each component is interpolated with a
    bicubic spline on the (r, theta) grid, extended evenly across the poles.
    H and G vanish like sin^2(theta) on the axis, so their regular parts
    H / sin^2 and G / sin^2 are splined instead; this keeps
    H_theta^2 / (4 H Sigma^2) accurate next to the axis.
    """
    from scipy.interpolate import RectBivariateSpline

    path = Path(path)
    with path.open() as fh:
        header = fh.readline().split()
    if tuple(header) != _GRID_COLUMNS:
        raise InvalidParams(f"{path}: header must be {' '.join(_GRID_COLUMNS)!r}, got {header}")
    data = np.loadtxt(path, skiprows=1, ndmin=2)
    rs = np.unique(data[:, 0])
    ths = np.unique(data[:, 1])
    if data.shape[0] != rs.size * ths.size:
        raise InvalidParams(f"{path}: rows do not form a full r x theta grid")
    if rs.size < 4 or ths.size < 5:
        raise InvalidParams(f"{path}: need at least 4 r values and 5 theta values")
    order = np.lexsort((data[:, 1], data[:, 0]))
    if not np.array_equal(order, np.arange(data.shape[0])):
        raise InvalidParams(f"{path}: rows must be row-major (r outer, theta inner) and sorted")
    if abs(ths[0]) > 1e-6 or abs(ths[-1] - np.pi) > 1e-6:
        raise InvalidParams(f"{path}: theta must cover [0, pi]")
    ths = ths.copy()
    ths[0], ths[-1] = 0.0, np.pi

    table = [data[:, k].reshape(rs.size, ths.size) for k in range(2, 7)]
    for k in (1, 2):
        table[k] = _axis_regular_part(ths, table[k])
    splines = []
    for values in table:
        t_ext, v_ext = _mirror(ths, values)
        splines.append(RectBivariateSpline(rs, t_ext, v_ext, kx=3, ky=3))

    def components(r, theta):
        theta = np.asarray(theta, dtype=float)
        rr = np.full(theta.shape, r, dtype=float)
        F, G, H, R, Sigma = (sp.ev(rr, theta) for sp in splines)
        s2 = np.sin(theta) ** 2
        return F, G * s2, H * s2, R, Sigma

    # r_min is an open bound, so nudge it below the first grid row
    metric = CustomMetric(components, r_min=np.nextafter(rs[0], -np.inf), r_max=rs[-1])
    metric.source = str(path)
    return metric


def load_metric_config(path):
    """Metric from a ``key = value`` file with keys ``kind``, ``m``, ``a``, ``grid``."""
    path = Path(path)
    cfg = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParams(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in ("kind", "m", "a", "grid"):
            raise InvalidParams(f"{path}:{lineno}: unknown key {key!r}")
        cfg[key] = value
    kind = cfg.get("kind")
    if kind is None:
        raise InvalidParams(f"{path}: missing 'kind'")
    if kind == "custom":
        if "grid" not in cfg:
            raise InvalidParams(f"{path}: custom metrics need a 'grid' file")
        grid = Path(cfg["grid"])
        if not grid.is_absolute():
            grid = path.parent / grid
        return load_grid_metric(grid)
    m = float(cfg["m"]) if "m" in cfg else None
    a = float(cfg["a"]) if "a" in cfg else None
    return make_metric(kind, m, a)
