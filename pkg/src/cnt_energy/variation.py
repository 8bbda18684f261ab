"""First and second variations of E(x, y) around the trivial critical point.

Perturbations are always parametrised as x = eps R u, y = eps Sigma v.  For
such a direction

    E(eps) = E(0, 0) + eps^2 Q(u, v) + O(eps^4)

and ``delta2E = d^2E/deps^2 = 2 Q``.  (E is even under (x, y) -> (-x, -y),
so the odd orders vanish.)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .energy import FreedomField, aux, energy_E
from .errors import ImaginaryBeta, InvalidParams, SingularXRecovery
from .metrics import eval_metric, mean_curvature_k
from .quadrature import derivative, gauss_legendre_grid, integrate
from .report import dumps_json

__all__ = [
    "ELResidual",
    "SecondVariationReport",
    "laplacian_tau",
    "x_from_y",
    "el_rhs",
    "el_residual",
    "second_variation_Q",
    "K_coefficient",
    "second_variation_f",
    "fd_variation",
    "direction_from_xy",
    "displacement_components",
    "appendix_identity_defect",
    "random_direction",
]


@dataclass
class ELResidual:
    theta: np.ndarray
    res_x: np.ndarray
    res_y: np.ndarray

    @property
    def sup_norm(self):
        return float(max(np.max(np.abs(self.res_x)), np.max(np.abs(self.res_y))))


@dataclass
class SecondVariationReport:
    """Q is the eps^2 coefficient; the breakdown terms sum to Q."""

    Q: float
    term_radial: float
    term_v2: float
    term_cross: float
    n_nodes: int = 0
    err_est: float = float("nan")

    @property
    def delta2E(self):
        return 2.0 * self.Q

    def to_dict(self):
        return {
            "Q": self.Q,
            "delta2E": self.delta2E,
            "breakdown": {
                "term_radial": self.term_radial,
                "term_v2": self.term_v2,
                "term_cross": self.term_cross,
            },
            "n_nodes": self.n_nodes,
            "err_est": self.err_est,
        }

    def to_json(self):
        return dumps_json(self.to_dict())


def _grid(grid):
    if grid is None:
        return gauss_legendre_grid(128)
    if isinstance(grid, (int, np.integer)):
        return gauss_legendre_grid(int(grid))
    return grid


def _sample(f, theta):
    return np.broadcast_to(np.asarray(f(theta), dtype=float), theta.shape)


def _sqrt_D(mv):
    """sqrt(1 - H_th^2 / (4 H Sigma^2)); undefined when the sphere does not embed in flat space."""
    D = 1.0 - mv.H_th**2 / (4.0 * mv.H * mv.Sigma**2)
    if np.any(D < 0):
        raise ImaginaryBeta(f"4 H Sigma^2 < H_theta^2 (min D = {np.min(D):.3g}); "
                            "the sphere has no isometric embedding in flat space")
    return np.sqrt(D)


def laplacian_tau(mv, y, y_th):
    """Laplacian on the sphere of an axisymmetric tau with tau' = y."""
    H, Sigma = mv.H, mv.Sigma
    return y_th / Sigma**2 + (Sigma * mv.H_th - 2.0 * H * mv.Sigma_th) / (2.0 * H * Sigma**3) * y


def x_from_y(mv, y, y_th):
    """Boost freedom x solving the y-equation of the EL system for given y."""
    c = mv.HSigma2_r
    if np.any(c == 0):
        raise SingularXRecovery("(Sigma^2 H)_r vanishes; x cannot be recovered from y")
    H, R, Sigma = mv.H, mv.R, mv.Sigma
    return -2.0 * H * R**2 / c * (y_th + (Sigma * mv.H_th - 2.0 * H * mv.Sigma_th) / (2.0 * H * Sigma) * y)


def el_rhs(mv, x, y):
    """Right-hand sides ``(x_th, y_th)`` of the Euler-Lagrange system."""
    H, R, Sigma = mv.H, mv.R, mv.Sigma
    t = aux(mv, x, y)
    y_th = (-mv.Sigma2H_r / (2.0 * H * R**2) * x
            - (Sigma * mv.H_th - 2.0 * H * mv.Sigma_th) / (2.0 * H * Sigma) * y)
    x_th = (mv.R_th / R * x
            + (mv.Sigma2H_r / (2.0 * H * Sigma**2)
               - (t.alpha * t.beta + x * y * mv.H_th) / (2.0 * H * t.l)) * y)
    return x_th, y_th


def el_residual(metric, r0, field, grid=None):
    """Defects ``x_th - rhs_x`` and ``y_th - rhs_y`` sampled on the grid nodes."""
    grid = _grid(grid)
    mv = eval_metric(metric, r0, grid.nodes)
    x, y, x_th, y_th = field.values(grid.nodes)
    rx, ry = el_rhs(mv, x, y)
    return ELResidual(theta=grid.nodes.copy(), res_x=x_th - rx, res_y=y_th - ry)


def _direction(u, v, du, dv):
    du = du if du is not None else (lambda th: derivative(u, th))
    dv = dv if dv is not None else (lambda th: derivative(v, th))
    return du, dv


def _Q_terms(metric, r0, u, v, du, grid):
    th = grid.nodes
    mv = eval_metric(metric, r0, th)
    uu, vv, uth = _sample(u, th), _sample(v, th), _sample(du, th)
    sqrtD = _sqrt_D(mv)
    radial = integrate(grid, -mv.sqrtHSigma_r / (2.0 * mv.R) * (uu**2 + vv**2))
    v2 = integrate(grid, mv.Sigma * sqrtD / 2.0 * vv**2)
    cross = integrate(grid, np.sqrt(mv.H) * uth * vv)
    return 0.25 * radial, 0.25 * v2, 0.25 * cross


def second_variation_Q(metric, r0, u, v, grid=None, du=None, dv=None, estimate_error=False):
    """eps^2 coefficient of E(eps R u, eps Sigma v) after integration by parts.

    Q = 1/4 int [ -(sqrt(H) Sigma)_r / (2R) (u^2 + v^2)
                  + Sigma sqrt(1 - H_th^2 / (4 H Sigma^2)) / 2 * v^2
                  + sqrt(H) u_th v ] dtheta

    The integration by parts needs v(0) = v(pi) = 0.
    """
    grid = _grid(grid)
    du, _ = _direction(u, v, du, dv)
    terms = _Q_terms(metric, r0, u, v, du, grid)
    err = float("nan")
    if estimate_error:
        fine = _Q_terms(metric, r0, u, v, du, gauss_legendre_grid(2 * grid.n))
        err = abs(sum(fine) - sum(terms))
    return SecondVariationReport(Q=float(sum(terms)), term_radial=terms[0], term_v2=terms[1],
                                 term_cross=terms[2], n_nodes=grid.n, err_est=err)


def K_coefficient(metric, r0, theta):
    """Coefficient K(theta) of f^2 for the direction (u, v) = (-f cos, f sin)."""
    theta = np.asarray(theta, dtype=float)
    mv = eval_metric(metric, r0, theta)
    sqrtH = np.sqrt(mv.H)
    sqrtD = _sqrt_D(mv)
    s, c = np.sin(theta), np.cos(theta)
    return (-mv.sqrtHSigma_r / (2.0 * mv.R)
            + mv.Sigma * sqrtD / 2.0 * s**2
            + mv.H_th / (4.0 * sqrtH) * c * s
            + sqrtH / 2.0)


def second_variation_f(metric, r0, f, grid=None):
    """delta2E along (u, v) = (-f cos(theta), f sin(theta)): (1/2) int K f^2."""
    grid = _grid(grid)
    K = K_coefficient(metric, r0, grid.nodes)
    return 0.5 * integrate(grid, K * _sample(f, grid.nodes) ** 2)


def fd_variation(metric, r0, u, v, eps=1e-3, grid=None, du=None, dv=None):
    """Central-difference first and second derivatives of E along (u, v).

    first  = (E(eps) - E(-eps)) / (2 eps)
    second = (E(eps) + E(-eps) - 2 E(0)) / eps^2

    Independent of the closed-form Q: it evaluates the full density.
    """
    if not 1e-4 <= eps <= 1e-2:
        raise InvalidParams("eps must lie in [1e-4, 1e-2]")
    grid = _grid(grid)
    du, dv = _direction(u, v, du, dv)
    plus = FreedomField.from_directions(metric, r0, u, v, eps, du, dv)
    minus = FreedomField.from_directions(metric, r0, u, v, -eps, du, dv)
    plus.check_boundary(tol=1e-10 * eps, x_regularity=False)

    def E(field):
        return energy_E(metric, r0, field, grid, check_boundary=False, estimate_error=False).value

    e0 = E(FreedomField.zero())
    ep, em = E(plus), E(minus)
    return (ep - em) / (2.0 * eps), (ep + em - 2.0 * e0) / eps**2


def direction_from_xy(metric, r0, dx, dy):
    """Convert a raw (delta x, delta y) direction to (u, v) = (dx / R, dy / Sigma)."""
    def u(th):
        return np.asarray(dx(th), dtype=float) / eval_metric(metric, r0, th).R

    def v(th):
        return np.asarray(dy(th), dtype=float) / eval_metric(metric, r0, th).Sigma

    return u, v


def appendix_identity_defect(metric, r0, theta, y, y_th):
    """(k/R) x + Laplacian(tau) with x recovered from y; zero identically."""
    mv = eval_metric(metric, r0, theta)
    k = mean_curvature_k(metric, r0, theta)
    return k / mv.R * x_from_y(mv, y, y_th) + laplacian_tau(mv, y, y_th)


def displacement_components(mv, x, y):
    """Components (N^t, N^r, N^theta, N^phi) of the matched displacement vector.

    Uses sqrt(-g) = R Sigma sqrt(G^2 - F H); raises if G^2 - F H <= 0, where
    the 4-metric is not Lorentzian on this chart.
    """
    from .errors import DomainError

    det = mv.G**2 - mv.F * mv.H
    if np.any(det <= 0):
        raise DomainError("G^2 - F H must be positive (interior theta, outside any ergoregion issue)")
    sqrt_g = mv.R * mv.Sigma * np.sqrt(det)
    alpha = aux(mv, x, y).alpha
    sqrtH = np.sqrt(mv.H)
    return (sqrtH * alpha / sqrt_g, -x / mv.R**2, -y / mv.Sigma**2,
            -mv.G * alpha / (sqrt_g * sqrtH))


def random_direction(rng, modes=4, scale=1.0):
    """Random admissible direction ``(u, v, du, dv)``.

    u is a cosine series (so u'(0) = u'(pi) = 0) and v a sine series (so
    v(0) = v(pi) = 0); coefficients are N(0, scale^2 / k^2).
    """
    k = np.arange(modes)
    a = rng.normal(size=modes) * scale / (1.0 + k)
    b = rng.normal(size=modes) * scale / (1.0 + k)
    kk = k[:, None]

    def u(th):
        th = np.asarray(th, dtype=float)
        return np.tensordot(a, np.cos(kk * th[None]), 1) if th.ndim else float(a @ np.cos(k * th))

    def du(th):
        th = np.asarray(th, dtype=float)
        return (np.tensordot(-a * k, np.sin(kk * th[None]), 1) if th.ndim
                else float((-a * k) @ np.sin(k * th)))

    def v(th):
        th = np.asarray(th, dtype=float)
        return (np.tensordot(b, np.sin((kk + 1) * th[None]), 1) if th.ndim
                else float(b @ np.sin((k + 1) * th)))

    def dv(th):
        th = np.asarray(th, dtype=float)
        return (np.tensordot(b * (k + 1), np.cos((kk + 1) * th[None]), 1) if th.ndim
                else float((b * (k + 1)) @ np.cos((k + 1) * th)))

    return u, v, du, dv
