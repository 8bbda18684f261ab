import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from cnt_energy.errors import DomainError, InvalidParams
from cnt_energy.metrics import (
    CustomMetric,
    eval_metric,
    fd_partials,
    load_grid_metric,
    load_metric_config,
    make_metric,
    mean_curvature_k,
)

FIELDS = ("F", "G", "H", "R", "Sigma", "H_th", "H_thth", "H_r", "Sigma_th", "Sigma_r", "R_th",
          "HSigma2_r", "sqrtHSigma_r")


def _symbolic_kerr():
    """Independent symbolic oracle for the Boyer-Lindquist components."""
    r, th, m, a = sp.symbols("r theta m a", positive=True)
    S2 = r**2 + a**2 * sp.cos(th) ** 2
    D = r**2 - 2 * m * r + a**2
    F = -(1 - 2 * m * r / S2)
    G = -2 * m * a * r * sp.sin(th) ** 2 / S2
    H = ((r**2 + a**2) ** 2 - D * a**2 * sp.sin(th) ** 2) * sp.sin(th) ** 2 / S2
    R = sp.sqrt(S2 / D)
    Sigma = sp.sqrt(S2)
    exprs = {
        "F": F, "G": G, "H": H, "R": R, "Sigma": Sigma,
        "H_th": sp.diff(H, th), "H_thth": sp.diff(H, th, 2), "H_r": sp.diff(H, r),
        "Sigma_th": sp.diff(Sigma, th), "Sigma_r": sp.diff(Sigma, r), "R_th": sp.diff(R, th),
        "HSigma2_r": sp.diff(H * Sigma**2, r), "sqrtHSigma_r": sp.diff(sp.sqrt(H) * Sigma, r),
        "k": sp.diff(sp.sqrt(H) * Sigma, r) / (sp.sqrt(H) * R * Sigma),
    }
    return {k: sp.lambdify((r, th, m, a), v, "numpy") for k, v in exprs.items()}


SYM = _symbolic_kerr()


@pytest.mark.parametrize("m,a,r0", [(1.0, 0.0, 3.0), (1.0, 0.5, 2.5), (1.0, 1.0, 1.5),
                                    (2.0, 1.3, 7.0), (0.0, 0.0, 0.7)])
def test_builtin_components_match_symbolic_oracle(m, a, r0):
    if m == 0:
        metric = make_metric("minkowski")
    elif a == 0:
        metric = make_metric("schwarzschild", m)
    else:
        metric = make_metric("kerr", m, a)
    th = np.linspace(0.05, np.pi - 0.05, 23)
    mv = eval_metric(metric, r0, th)
    for name in FIELDS:
        expected = np.broadcast_to(SYM[name](r0, th, m, a), th.shape)
        assert np.allclose(getattr(mv, name), expected, rtol=1e-12, atol=1e-12), name
    assert np.allclose(mean_curvature_k(metric, r0, th), SYM["k"](r0, th, m, a), rtol=1e-12)


@settings(max_examples=40, deadline=None)
@given(a=st.floats(0.0, 1.0), dr=st.floats(0.3, 20.0), th=st.floats(0.05, np.pi - 0.05))
def test_analytic_partials_agree_with_finite_differences(a, dr, th):
    metric = make_metric("kerr", 1.0, a)
    r0 = metric.r_min + dr
    exact = eval_metric(metric, r0, np.array([th]))
    approx = fd_partials(metric, r0, np.array([th]))
    for name in FIELDS:
        e, f = getattr(exact, name)[0], getattr(approx, name)[0]
        assert abs(e - f) <= 1e-6 * max(1.0, abs(e)), (name, e, f)


def test_kerr_with_zero_spin_is_schwarzschild():
    th = np.linspace(0.0, np.pi, 17)
    k = eval_metric(make_metric("kerr", 1.3, 0.0), 4.0, th)
    s = eval_metric(make_metric("schwarzschild", 1.3), 4.0, th)
    for name in FIELDS:
        assert np.allclose(getattr(k, name), getattr(s, name), rtol=1e-13, atol=1e-13), name


def test_schwarzschild_mean_curvature_closed_form():
    th = np.linspace(0.0, np.pi, 9)
    k = mean_curvature_k(make_metric("schwarzschild", 1.0), 3.0, th)
    assert np.allclose(k, 2.0 * np.sqrt(1.0 - 2.0 / 3.0) / 3.0, rtol=1e-14)


def test_kerr_components_on_the_axis_and_equator():
    mv = eval_metric(make_metric("kerr", 1.0, 0.5), 3.0, np.array([0.0, np.pi / 2]))
    assert mv.H[0] == 0.0 and mv.G[0] == 0.0
    # equator: Sigma^2 = r^2, H = (r^2 + a^2) + 2 m a^2 / r
    assert mv.Sigma[1] == pytest.approx(3.0)
    assert mv.H[1] == pytest.approx(9.25 + 2 * 0.25 / 3.0)


@pytest.mark.parametrize("kind,m,a,r", [("schwarzschild", 1.0, None, 2.0),
                                        ("kerr", 1.0, 1.0, 1.0),
                                        ("kerr", 1.0, 0.6, 1.5),
                                        ("minkowski", None, None, 0.0)])
def test_radius_inside_the_horizon_is_rejected(kind, m, a, r):
    with pytest.raises(DomainError):
        eval_metric(make_metric(kind, m, a), r, 1.0)


@pytest.mark.parametrize("args", [("kerr", 1.0, 1.5), ("kerr", 1.0, -0.1), ("schwarzschild", -1.0, None),
                                  ("minkowski", 1.0, None), ("ads", 1.0, None), ("kerr", 1.0, None)])
def test_invalid_parameters(args):
    with pytest.raises(InvalidParams):
        make_metric(*args)


def test_theta_outside_range_is_rejected():
    with pytest.raises(DomainError):
        eval_metric(make_metric("schwarzschild", 1.0), 3.0, -0.1)


def test_fd_stencil_cannot_touch_the_axis():
    with pytest.raises(DomainError):
        fd_partials(make_metric("schwarzschild", 1.0), 3.0, np.array([0.0]))


def _write_grid(path, metric, rs, ths):
    lines = ["r theta F G H R Sigma"]
    for r in rs:
        mv = eval_metric(metric, r, ths)
        for j, t in enumerate(ths):
            lines.append(" ".join(repr(float(v)) for v in
                                  (r, t, mv.F[j], mv.G[j], mv.H[j], mv.R[j], mv.Sigma[j])))
    path.write_text("\n".join(lines) + "\n")


def test_grid_metric_reproduces_kerr(tmp_path):
    kerr = make_metric("kerr", 1.0, 0.5)
    path = tmp_path / "kerr.grid"
    _write_grid(path, kerr, np.linspace(2.5, 3.5, 41), np.linspace(0.0, np.pi, 181))
    custom = load_grid_metric(path)
    th = np.linspace(0.3, np.pi - 0.3, 11)
    a, b = eval_metric(custom, 3.0, th), eval_metric(kerr, 3.0, th)
    for name in ("H", "R", "Sigma", "H_th", "Sigma_r", "sqrtHSigma_r"):
        assert np.allclose(getattr(a, name), getattr(b, name), rtol=1e-4, atol=1e-4), name
    with pytest.raises(DomainError):
        eval_metric(custom, 4.0, th)


@pytest.mark.parametrize("a,r0", [(0.0, 3.0), (0.5, 3.0), (0.9, 2.5)])
def test_grid_metric_energy_and_verdict(tmp_path, a, r0):
    from cnt_energy.energy import energy_zero
    from cnt_energy.saddle import saddle_check

    kerr = make_metric("kerr", 1.0, a)
    path = tmp_path / "kerr.grid"
    _write_grid(path, kerr, np.linspace(r0 - 0.4, r0 + 0.4, 17), np.linspace(0.0, np.pi, 181))
    custom = load_grid_metric(path)
    assert energy_zero(custom, r0) == pytest.approx(energy_zero(kerr, r0), abs=1e-6)
    assert saddle_check(custom, r0).verdict == "saddle"


def test_grid_file_header_and_shape_are_validated(tmp_path):
    bad = tmp_path / "bad.grid"
    bad.write_text("r th F G H R Sigma\n1 0 0 0 0 1 1\n")
    with pytest.raises(InvalidParams):
        load_grid_metric(bad)
    holes = tmp_path / "holes.grid"
    _write_grid(holes, make_metric("schwarzschild", 1.0), np.linspace(3, 4, 5), np.linspace(0, np.pi, 5))
    holes.write_text("\n".join(holes.read_text().splitlines()[:-1]) + "\n")
    with pytest.raises(InvalidParams):
        load_grid_metric(holes)
    half = tmp_path / "half.grid"
    _write_grid(half, make_metric("schwarzschild", 1.0), np.linspace(3, 4, 5), np.linspace(0, 1.5, 6))
    with pytest.raises(InvalidParams):
        load_grid_metric(half)


def test_metric_config_file(tmp_path):
    cfg = tmp_path / "metric.cfg"
    cfg.write_text("# comment\nkind = kerr\nm = 1\na = 0.5\n")
    metric = load_metric_config(cfg)
    assert (metric.kind, metric.m, metric.a) == ("kerr", 1.0, 0.5)
    cfg.write_text("kind = kerr\nspin = 0.5\n")
    with pytest.raises(InvalidParams):
        load_metric_config(cfg)


def test_custom_closure_metric_matches_schwarzschild():
    def comps(r, th):
        th = np.asarray(th, dtype=float)
        f = 1.0 - 2.0 / r
        return -f + 0 * th, 0 * th, r**2 * np.sin(th) ** 2, np.sqrt(1.0 / f) + 0 * th, r + 0 * th

    custom = CustomMetric(comps, r_min=2.0)
    th = np.linspace(0.2, np.pi - 0.2, 7)
    assert np.allclose(mean_curvature_k(custom, 3.0, th),
                       mean_curvature_k(make_metric("schwarzschild", 1.0), 3.0, th), rtol=1e-8)
