import numpy as np
import pytest

from cnt_energy.energy import energy_zero
from cnt_energy.metrics import make_metric
from cnt_energy.quadrature import gauss_legendre_grid
from cnt_energy.saddle import (
    SCAN_HEADER,
    SWEEP_HEADER,
    bump,
    classify,
    k_positivity_scan,
    minkowski_saddle_check,
    parameter_sweep,
    saddle_check,
    sweep_csv,
    verdict_scan,
)
from cnt_energy.variation import K_coefficient

MINK = make_metric("minkowski")
SCHW = make_metric("schwarzschild", 1.0)


def test_bump_is_compactly_supported_and_smooth():
    f = bump(1.0, 2.0)
    th = np.array([0.5, 1.0, 1.5, 2.0, 2.5])
    vals = f(th)
    assert vals[0] == vals[1] == vals[3] == vals[4] == 0.0
    assert vals[2] == pytest.approx(np.exp(-1.0))


@pytest.mark.parametrize("r0", [2.01, 2.5, 3.0, 10.0])
def test_schwarzschild_is_a_saddle(r0):
    v = saddle_check(SCHW, r0)
    assert v.verdict == "saddle"
    assert v.k_positive and v.negative_value < 0 < v.positive_value
    # K = r0 sin(theta) (1 - sqrt(1 - 2/r0)); no even-order node sits exactly on pi/2
    assert v.K_max == pytest.approx(r0 * (1 - np.sqrt(1 - 2 / r0)), rel=1e-3)
    assert v.K_max <= r0 * (1 - np.sqrt(1 - 2 / r0))


def test_minkowski_generic_route_is_inconclusive():
    v = saddle_check(MINK, 1.0)
    assert v.verdict == "inconclusive" and v.positive_value == 0.0


@pytest.mark.parametrize("r0", [1.0, 3.0])
def test_minkowski_route(r0):
    v = minkowski_saddle_check(r0)
    assert v.verdict == "saddle" and v.route == "minkowski"
    assert v.negative_value == pytest.approx(-r0, abs=1e-12)
    assert v.positive_value == pytest.approx(r0 / 45, abs=1e-12)
    assert classify(MINK, r0).route == "minkowski"
    assert classify(SCHW, 3.0).route == "K-coefficient"


@pytest.mark.parametrize("a", [0.25, 0.5, 1.0])
def test_kerr_equatorial_K_bound(a):
    kerr = make_metric("kerr", 1.0, a)
    for r0 in (2.5, 3.0, 5.0, 10.0):
        K = float(K_coefficient(kerr, r0, np.pi / 2))
        assert K >= r0 * (1 - np.sqrt(1 - 1 / r0**2)) - 1e-9


def test_mean_curvature_positive_outside_kerr_horizon():
    th = np.linspace(0.01, np.pi - 0.01, 41)
    out = k_positivity_scan(make_metric("kerr", 1.0, 1.0), np.linspace(1.01, 20, 40), th)
    assert out["all_positive"] and out["min_k"] > 0 and len(out["rows"]) == 40


def test_sweep_rows_and_csv():
    rows = parameter_sweep(SCHW, [2.5, 3.0, 4.0], gauss_legendre_grid(64), workers=2)
    assert [r[0] for r in rows] == [2.5, 3.0, 4.0]
    for r0, e00, kmax, verdict in rows:
        assert e00 == pytest.approx(r0 * (1 - np.sqrt(1 - 2 / r0)), abs=1e-12)
        assert verdict == "saddle" and kmax > 0
    text = sweep_csv(rows)
    assert text.splitlines()[0] == ",".join(SWEEP_HEADER)


def test_verdict_scan():
    rows = verdict_scan([(1.0, 0.0, 3.0), (1.0, 0.5, 3.0)], gauss_legendre_grid(64))
    assert len(rows[0]) == len(SCAN_HEADER)
    assert [r[-1] for r in rows] == ["saddle", "saddle"]


def test_energy_is_monotone_towards_the_horizon():
    # E(0,0) grows as the sphere approaches the horizon
    vals = [energy_zero(make_metric("kerr", 1.0, 0.9), r) for r in (2.0, 3.0, 6.0)]
    assert vals[0] > vals[1] > vals[2] > 0


def test_minkowski_positive_value_scales_linearly():
    assert minkowski_saddle_check(45.0).positive_value == pytest.approx(1.0, abs=1e-10)


def test_witnesses_agree_with_finite_differences():
    from cnt_energy.variation import fd_variation

    kerr = make_metric("kerr", 1.0, 1.0)
    v = saddle_check(kerr, 3.0)
    one, zero = np.ones_like, np.zeros_like
    _, neg = fd_variation(kerr, 3.0, one, zero, 1e-3, du=zero, dv=zero)
    assert neg == pytest.approx(v.negative_value, rel=1e-4)
    f = bump(*v.positive_support)
    _, pos = fd_variation(kerr, 3.0, lambda t: -f(t) * np.cos(t), lambda t: f(t) * np.sin(t), 1e-3)
    assert pos == pytest.approx(v.positive_value, rel=1e-4)


def test_kerr_family_grid_is_all_saddles():
    # a/m in [0, 1] by r0 up to 20 m; spheres inside r0 ~ 1.64 m can fail to embed in
    # flat space for a > (sqrt(3)/2) m, so the grid starts above that
    params = []
    for ratio in np.linspace(0.0, 1.0, 10):
        r_h = 1.0 + np.sqrt(1.0 - ratio**2)
        params += [(1.0, float(ratio), float(r)) for r in np.linspace(max(r_h + 0.05, 1.7), 20.0, 10)]
    rows = verdict_scan(params, gauss_legendre_grid(128), workers=4)
    assert len(rows) == 100
    assert all(row[-1] == "saddle" for row in rows), [row for row in rows if row[-1] != "saddle"]
    for m, a, r0, kmax, *_ in rows:
        if a > 0:
            kerr = make_metric("kerr", m, a)
            assert float(K_coefficient(kerr, r0, np.pi / 2)) >= r0 * (1 - np.sqrt(1 - m**2 / r0**2)) - 1e-9


def test_minkowski_and_schwarzschild_mean_curvature_scans():
    th = np.linspace(0.01, np.pi - 0.01, 21)
    assert k_positivity_scan(SCHW, np.linspace(2.01, 20, 30), th)["all_positive"]
    assert k_positivity_scan(MINK, [0.1, 1.0, 10.0], th)["all_positive"]
    from cnt_energy.errors import DomainError
    with pytest.raises(DomainError):
        k_positivity_scan(SCHW, [1.5], th)


def test_wang_yau_samples_exceed_zero_field_energy():
    from cnt_energy.saddle import wang_yau_samples

    excess = wang_yau_samples(make_metric("kerr", 1.0, 1.0), 3.0, samples=8, seed=1)
    assert len(excess) == 8 and min(excess) > 0


@pytest.mark.parametrize("a,r0", [(1.0, 1.05), (0.9, 1.5)])
def test_non_embeddable_sphere_is_a_numerical_error(a, r0):
    from cnt_energy.errors import ImaginaryBeta

    with pytest.raises(ImaginaryBeta):
        saddle_check(make_metric("kerr", 1.0, a), r0)
