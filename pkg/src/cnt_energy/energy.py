"""The CNT energy E(x, y) of the sphere r = r0 in a Kerr-like spacetime.

x is the boost freedom and y the embedding freedom of an axially symmetric
4D isometric matching reference; both are functions of theta on [0, pi].
The energy is a quarter of the theta-integral of the density computed by
:func:`integrand_B`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import BoundaryViolation, DomainError, ImaginaryBeta, InvalidParams, NonFinite
from .metrics import eval_metric
from .quadrature import derivative, gauss_legendre_grid, integrate
from .report import dumps_csv, dumps_json

__all__ = [
    "FreedomField",
    "AuxTriple",
    "EnergyReport",
    "aux",
    "integrand_B",
    "integrand_zero",
    "energy_E",
    "energy_zero",
    "wang_yau_energy_axisym",
]

BOUNDARY_TOL = 1e-10


def _zero(theta):
    return np.zeros_like(np.asarray(theta, dtype=float))


@dataclass
class FreedomField:
    """Boost freedom ``x`` and embedding freedom ``y`` as vectorised callables.

    ``x_th`` and ``y_th`` are the theta-derivatives; when omitted they are
    computed by fourth-order finite differences of ``x`` and ``y``.
    """

    x: object = _zero
    y: object = _zero
    x_th: object = None
    y_th: object = None
    label: str = ""

    def values(self, theta):
        theta = np.asarray(theta, dtype=float)
        x = np.broadcast_to(np.asarray(self.x(theta), dtype=float), theta.shape)
        y = np.broadcast_to(np.asarray(self.y(theta), dtype=float), theta.shape)
        x_th = self.x_th(theta) if self.x_th is not None else derivative(self.x, theta)
        y_th = self.y_th(theta) if self.y_th is not None else derivative(self.y, theta)
        return (x, y, np.broadcast_to(np.asarray(x_th, dtype=float), theta.shape),
                np.broadcast_to(np.asarray(y_th, dtype=float), theta.shape))

    def boundary_defects(self):
        """``(y(0), y(pi), x'(0), x'(pi))``."""
        poles = np.array([0.0, np.pi])
        try:
            x, y, x_th, _ = self.values(poles)
        except DomainError:
            # custom metrics cannot be evaluated on the axis
            poles = np.array([1e-7, np.pi - 1e-7])
            x, y, x_th, _ = self.values(poles)
        return float(y[0]), float(y[1]), float(x_th[0]), float(x_th[1])

    def check_boundary(self, tol=BOUNDARY_TOL, x_regularity=True):
        y0, ypi, dx0, dxpi = self.boundary_defects()
        bad = []
        if abs(y0) > tol or abs(ypi) > tol:
            bad.append(f"y(0)={y0:.3g}, y(pi)={ypi:.3g}")
        if x_regularity and (abs(dx0) > tol or abs(dxpi) > tol):
            bad.append(f"x'(0)={dx0:.3g}, x'(pi)={dxpi:.3g}")
        if bad:
            raise BoundaryViolation("freedom field violates axis regularity: " + "; ".join(bad))

    @classmethod
    def zero(cls):
        return cls(_zero, _zero, _zero, _zero, label="zero")

    @classmethod
    def from_directions(cls, metric, r0, u, v, eps=1.0, du=None, dv=None):
        """Field x = eps R u, y = eps Sigma v built from a (u, v) direction."""
        if du is None:
            du = lambda th: derivative(u, th)
        if dv is None:
            dv = lambda th: derivative(v, th)

        def x(th):
            return eps * eval_metric(metric, r0, th).R * u(th)

        def y(th):
            return eps * eval_metric(metric, r0, th).Sigma * v(th)

        def x_th(th):
            mv = eval_metric(metric, r0, th)
            return eps * (mv.R_th * u(th) + mv.R * du(th))

        def y_th(th):
            mv = eval_metric(metric, r0, th)
            return eps * (mv.Sigma_th * v(th) + mv.Sigma * dv(th))

        return cls(x, y, x_th, y_th, label=f"direction eps={eps:g}")

    @classmethod
    def from_samples(cls, theta, x, y):
        """Cubic-spline field through tabulated ``(theta, x, y)`` samples."""
        from scipy.interpolate import CubicSpline

        theta = np.asarray(theta, dtype=float)
        if theta.ndim != 1 or theta.size < 4:
            raise InvalidParams("need at least four field samples")
        if np.any(np.diff(theta) <= 0):
            raise InvalidParams("field theta samples must be strictly increasing")
        sx = CubicSpline(theta, np.asarray(x, dtype=float))
        sy = CubicSpline(theta, np.asarray(y, dtype=float))
        return cls(sx, sy, sx.derivative(), sy.derivative(), label="tabulated")

    @classmethod
    def from_csv(cls, path):
        """Read a field file with header ``theta,x,y``."""
        path = Path(path)
        with path.open() as fh:
            header = [h.strip() for h in fh.readline().split(",")]
        if header != ["theta", "x", "y"]:
            raise InvalidParams(f"{path}: header must be 'theta,x,y', got {header}")
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        field = cls.from_samples(data[:, 0], data[:, 1], data[:, 2])
        field.label = str(path)
        return field


@dataclass(frozen=True)
class AuxTriple:
    alpha: np.ndarray
    beta: np.ndarray
    l: np.ndarray


def aux(mv, x, y):
    """alpha = sqrt(x^2 Sigma^2 + R^2 l), beta = sqrt(4 H l - H_th^2), l = y^2 + Sigma^2."""
    l = y**2 + mv.Sigma**2
    alpha = np.sqrt(x**2 * mv.Sigma**2 + mv.R**2 * l)
    beta2 = -mv.H_th**2 + 4.0 * mv.H * l
    if np.any(beta2 < 0):
        raise ImaginaryBeta(f"beta^2 = 4Hl - H_theta^2 is negative (min {np.min(beta2):.3g})")
    return AuxTriple(alpha=alpha, beta=np.sqrt(beta2), l=l)


def integrand_B(mv, x, y, x_th, y_th):
    """Energy density B(x, y) at interior theta.

    Written term by term in the grouped form of the closed-form density so
    that each line can be compared against the formula directly.
    """
    H, R, Sigma = mv.H, mv.R, mv.Sigma
    H_th, H_thth, Sigma_th, R_th = mv.H_th, mv.H_thth, mv.Sigma_th, mv.R_th
    t = aux(mv, x, y)
    alpha, beta, l = t.alpha, t.beta, t.l
    sqrtH = np.sqrt(H)

    with np.errstate(divide="ignore", invalid="ignore"):
        B = (
            -alpha * mv.HSigma2_r / (2.0 * sqrtH * R**2 * Sigma**2)
            - sqrtH * (
                (H_thth - 2.0 * l) / beta
                + R_th * x * y / (R * alpha)
                - (x * y**3 * beta + H_th * alpha * Sigma**2) / (l * alpha * beta * Sigma) * Sigma_th
            )
            + sqrtH * y * x_th / alpha
            + sqrtH * y * (H_th * alpha - x * y * beta) / (l * alpha * beta) * y_th
        )
    if not np.all(np.isfinite(B)):
        raise NonFinite("energy density is not finite (evaluated on the axis?)")
    return B


def integrand_zero(mv):
    """B(0, 0) in its simplified closed form."""
    D = 1.0 - mv.H_th**2 / (4.0 * mv.H * mv.Sigma**2)
    if np.any(D < 0):
        raise ImaginaryBeta(f"4 H Sigma^2 < H_theta^2 (min D = {np.min(D):.3g}); "
                            "the sphere has no isometric embedding in flat space")
    sqrtD = np.sqrt(D)
    return (-mv.sqrtHSigma_r / mv.R
            + mv.Sigma * (1.0 - mv.H_thth / (2.0 * mv.Sigma**2)) / sqrtD
            + mv.H_th * mv.Sigma_th / (2.0 * mv.Sigma**2 * sqrtD))


@dataclass
class EnergyReport:
    value: float
    n_nodes: int
    err_est: float
    theta: np.ndarray = field(repr=False)
    B: np.ndarray = field(repr=False)

    @property
    def samples(self):
        return list(zip(self.theta.tolist(), self.B.tolist()))

    def to_dict(self):
        return {
            "value": self.value,
            "n_nodes": self.n_nodes,
            "err_est": self.err_est,
            "samples": [[t, b] for t, b in self.samples],
        }

    def to_json(self):
        return dumps_json(self.to_dict())

    def to_csv(self):
        return dumps_csv(["theta", "B"], self.samples)


def _grid(grid):
    if grid is None:
        return gauss_legendre_grid(64)
    if isinstance(grid, (int, np.integer)):
        return gauss_legendre_grid(int(grid))
    return grid


def _energy_on(metric, r0, field, grid):
    mv = eval_metric(metric, r0, grid.nodes)
    x, y, x_th, y_th = field.values(grid.nodes)
    B = integrand_B(mv, x, y, x_th, y_th)
    return 0.25 * integrate(grid, B), B


def energy_E(metric, r0, field, grid=None, check_boundary=True, estimate_error=True):
    """E(x, y) = (1/4) * integral over (0, pi) of B(x, y).

    ``err_est`` is the change in value when the node count is doubled
    (``nan`` when ``estimate_error`` is false).
    """
    grid = _grid(grid)
    if check_boundary:
        field.check_boundary()
    value, B = _energy_on(metric, r0, field, grid)
    err = np.nan
    if estimate_error:
        fine, _ = _energy_on(metric, r0, field, gauss_legendre_grid(2 * grid.n))
        err = abs(fine - value)
    return EnergyReport(value=value, n_nodes=grid.n, err_est=err, theta=grid.nodes.copy(), B=B)


def energy_zero(metric, r0, grid=None):
    """E(0, 0) from the simplified zero-freedom density.

    This equals the Brown-York mass of the sphere; for Schwarzschild it is
    r0 (1 - sqrt(1 - 2m/r0)).
    """
    grid = _grid(grid)
    mv = eval_metric(metric, r0, grid.nodes)
    return 0.25 * integrate(grid, integrand_zero(mv))


def wang_yau_energy_axisym(metric, r0, y_field, grid=None, estimate_error=True):
    """E(y) = E(x(y), y) with x fixed by the first Euler-Lagrange equation.

    ``y_field`` is a :class:`FreedomField` (only ``y`` and ``y_th`` are used)
    or a callable ``y(theta)``.  This is the axially symmetric Wang-Yau energy
    with time function tau(theta), y = dtau/dtheta.
    """
    from .variation import x_from_y

    if callable(y_field) and not isinstance(y_field, FreedomField):
        y_field = FreedomField(y=y_field)
    y = y_field.y
    y_th = y_field.y_th if y_field.y_th is not None else (lambda th: derivative(y, th))
    y_field.check_boundary(x_regularity=False)

    def x(th):
        mv = eval_metric(metric, r0, th)
        return x_from_y(mv, np.asarray(y(th), dtype=float), np.asarray(y_th(th), dtype=float))

    field = FreedomField(x=x, y=y, x_th=None, y_th=y_th, label="wang-yau")
    return energy_E(metric, r0, field, grid, check_boundary=False, estimate_error=estimate_error)
