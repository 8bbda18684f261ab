"""Quasi-local energy of axially symmetric Kerr-like spacetimes."""

from .elsolver import ShootingConfig, integrate_el, solve_el_shooting
from .energy import FreedomField, energy_E, energy_zero, wang_yau_energy_axisym
from .metrics import eval_metric, load_grid_metric, make_metric, mean_curvature_k
from .quadrature import gauss_legendre_grid, integrate
from .saddle import classify, parameter_sweep, saddle_check
from .variation import (
    K_coefficient,
    el_residual,
    fd_variation,
    second_variation_f,
    second_variation_Q,
    x_from_y,
)

__version__ = "0.1.0"
