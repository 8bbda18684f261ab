import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cnt_energy.expr import ExprError, parse_expression
from cnt_energy.report import dumps_csv, dumps_json, fmt_float

CASES = {
    "1": (lambda t: 1.0 + 0 * t, lambda t: 0 * t),
    "-(2/3)*cos(theta)^2": (lambda t: -2 / 3 * np.cos(t) ** 2, lambda t: 4 / 3 * np.cos(t) * np.sin(t)),
    "sin(t)*cos(t)": (lambda t: np.sin(t) * np.cos(t), lambda t: np.cos(2 * t)),
    "exp(-theta**2) + sqrt(1 + theta)": (lambda t: np.exp(-t**2) + np.sqrt(1 + t),
                                         lambda t: -2 * t * np.exp(-t**2) + 0.5 / np.sqrt(1 + t)),
    "log(2 + sin(θ)) / (1 + theta)": (
        lambda t: np.log(2 + np.sin(t)) / (1 + t),
        lambda t: (np.cos(t) / (2 + np.sin(t)) * (1 + t) - np.log(2 + np.sin(t))) / (1 + t) ** 2),
    "theta^theta": (lambda t: t**t, lambda t: t**t * (np.log(t) + 1)),
    "tan(theta/4) * r0": (lambda t: 3 * np.tan(t / 4), lambda t: 3 / (4 * np.cos(t / 4) ** 2)),
    "2^-1 * pi": (lambda t: np.pi / 2 + 0 * t, lambda t: 0 * t),
}


@pytest.mark.parametrize("text", list(CASES))
def test_values_and_symbolic_derivatives(text):
    f, df = CASES[text]
    e = parse_expression(text, r0=3.0)
    th = np.linspace(0.1, 3.0, 13)
    assert np.allclose(e(th), f(th), rtol=1e-14, atol=1e-14)
    assert np.allclose(e.derivative()(th), df(th), rtol=1e-12, atol=1e-12)
    assert e(th).shape == th.shape


def test_power_is_right_associative_and_binds_tighter_than_unary_minus():
    assert parse_expression("2^3^2")(0.0) == 512.0
    assert parse_expression("-2^2")(0.0) == -4.0


@pytest.mark.parametrize("bad", ["", "sin(", "1 +", "foo(theta)", "x", "2 $ 3", "(1))"])
def test_parse_errors(bad):
    with pytest.raises(ExprError):
        parse_expression(bad)


@settings(max_examples=50, deadline=None)
@given(a=st.floats(-5, 5), b=st.floats(-5, 5), k=st.integers(1, 5))
def test_trig_series_derivatives(a, b, k):
    e = parse_expression(f"{a!r}*cos({k}*theta) + {b!r}*sin({k}*theta)")
    th = np.linspace(0, np.pi, 9)
    assert np.allclose(e.derivative()(th), -a * k * np.sin(k * th) + b * k * np.cos(k * th), atol=1e-12)


def test_float_format_round_trips():
    for x in (1 / 3, np.pi, 1e-300, -2.5e17, 0.1):
        assert float(fmt_float(x)) == x
    assert fmt_float(1 / 3) == "0.33333333333333331"


def test_json_is_valid_and_maps_non_finite_to_null():
    text = dumps_json({"a": 1 / 3, "b": [1.0, float("nan")], "c": {"d": float("inf"), "e": "s"},
                       "f": True, "g": None})
    data = json.loads(text)
    assert data["a"] == 1 / 3 and data["b"][1] is None and data["c"]["d"] is None
    assert list(data) == ["a", "b", "c", "f", "g"] and data["f"] is True
    assert text.endswith("\n")


def test_csv():
    text = dumps_csv(("x0", "terminal_y"), [(0.1, float("-inf")), (0.2, 1 / 3)])
    assert text.splitlines() == ["x0,terminal_y", "0.10000000000000001,-inf", "0.20000000000000001,0.33333333333333331"]
