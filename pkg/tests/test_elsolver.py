import numpy as np
import pytest

from cnt_energy.elsolver import (
    ShootingConfig,
    integrate_el,
    scan_terminal,
    shoot_terminal,
    solve_all_el,
    solve_el_shooting,
)
from cnt_energy.errors import BlowUp, InvalidParams, NoRoot
from cnt_energy.metrics import make_metric
from cnt_energy.quadrature import gauss_legendre_grid
from cnt_energy.variation import el_residual

MINK = make_metric("minkowski")
SCHW = make_metric("schwarzschild", 1.0)
KERR = make_metric("kerr", 1.0, 0.7)


@pytest.mark.parametrize("c,r0", [(0.3, 1.0), (0.5, 2.0), (-0.8, 3.0)])
def test_minkowski_boost_family_is_reproduced(c, r0):
    cfg = ShootingConfig()
    sol = integrate_el(MINK, r0, c, cfg)
    th = sol.nodes
    assert np.max(np.abs(sol.xs - c * np.cos(th))) < 1e-6
    # the y(delta) = 0 seed misses the exact -c r0 sin(delta) by O(delta)
    assert np.max(np.abs(sol.ys + c * r0 * np.sin(th))) < 2 * abs(c) * r0 * cfg.delta
    assert el_residual(MINK, r0, sol, gauss_legendre_grid(64)).sup_norm < 1e-6


def test_rk4_is_fourth_order():
    ys = [shoot_terminal(KERR, 3.0, 0.01, ShootingConfig(steps=s)) for s in (400, 800, 1600, 3200)]
    d = np.diff(ys)
    ratios = d[:-1] / d[1:]
    assert np.all((ratios > 13) & (ratios < 19)), ratios


def test_default_steps_are_converged():
    a = shoot_terminal(KERR, 3.0, 1e-3)
    b = shoot_terminal(KERR, 3.0, 1e-3, ShootingConfig(steps=80000))
    assert abs(a - b) < 1e-8 * max(1.0, abs(b))


@pytest.mark.parametrize("metric,r0", [(MINK, 1.0), (SCHW, 3.0), (KERR, 3.0)])
def test_default_scan_recovers_trivial_solution(metric, r0):
    sol = solve_el_shooting(metric, r0)
    assert sol.x0 == 0.0
    assert np.max(np.abs(sol.xs)) + np.max(np.abs(sol.ys)) < 1e-8
    assert len(sol.scan) == 21


def test_bisection_on_a_sign_change_bracket():
    sol = solve_el_shooting(SCHW, 3.0, bracket=(-0.3, 0.5))
    assert abs(sol.x0) < 1e-8 and abs(sol.terminal_y) < 1e-8


def test_same_sign_bracket_raises_with_scan():
    with pytest.raises(NoRoot) as info:
        solve_el_shooting(MINK, 3.0, bracket=(0.2, 1.0))
    assert [row[0] for row in info.value.scan] == [0.2, 1.0]


def test_blow_up_is_reported():
    with pytest.raises(BlowUp) as info:
        integrate_el(SCHW, 3.0, 0.5)
    assert 0 < info.value.theta < np.pi
    inf_rows = scan_terminal(SCHW, 3.0, [-0.5, 0.5])
    assert inf_rows[0][1] == np.inf and inf_rows[1][1] == -np.inf


def test_solve_all_lists_every_bracketed_root():
    sols, scan = solve_all_el(KERR, 3.0)
    assert [s.x0 for s in sols] == [0.0]
    assert len(scan) == 21


def test_config_validation():
    with pytest.raises(InvalidParams):
        ShootingConfig(delta=0.5)
    with pytest.raises(InvalidParams):
        ShootingConfig(steps=10)


def test_solution_csv_and_regularity():
    sol = integrate_el(MINK, 1.0, 0.2, ShootingConfig(steps=400))
    lines = sol.to_csv().splitlines()
    assert lines[0] == "theta,x,y" and len(lines) == 402
    # exact x' = -c sin(theta) is O(c delta) at both ends
    dx0, dxpi = integrate_el(MINK, 1.0, 0.2).axis_regularity()
    assert abs(dx0) < 1e-4 and abs(dxpi) < 1e-4


def test_runs_are_deterministic():
    a = scan_terminal(KERR, 3.0, [0.001, 0.002])
    b = scan_terminal(KERR, 3.0, [0.001, 0.002])
    assert a == b
