"""Command-line front end.

    cnt-energy energy            --metric schwarzschild --m 1 --r0 3
    cnt-energy saddle            --metric kerr --m 1 --a 1 --r0 3
    cnt-energy second-variation  --metric minkowski --r0 1 --u "1" --v "0"
    cnt-energy el                --metric schwarzschild --m 1 --r0 3
    cnt-energy sweep             --metric schwarzschild --m 1 --r0 2.1:20:0.1
    cnt-energy oracle            --metric kerr --m 1 --a 1 --r0 3 --trials 20

Options may also come from ``--config FILE`` (``key = value`` lines using
the long option names); options given on the command line win.  Exit codes:
0 success, 2 usage or configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import errors
from .elsolver import ShootingConfig, solve_el_shooting
from .energy import FreedomField, energy_E, energy_zero, wang_yau_energy_axisym
from .expr import ExprError, parse_expression
from .metrics import load_grid_metric, make_metric
from .quadrature import gauss_legendre_grid
from .report import dumps_csv, dumps_json, fmt_float
from .saddle import SWEEP_HEADER, classify, parameter_sweep, wang_yau_samples
from .variation import (
    appendix_identity_defect,
    el_residual,
    fd_variation,
    random_direction,
    second_variation_f,
    second_variation_Q,
)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3

_USAGE_ERRORS = (errors.InvalidParams, errors.DomainError, errors.BoundaryViolation, ExprError,
                 OSError)
_NUMERIC_ERRORS = (errors.CNTError, ArithmeticError)

DEFAULTS = {
    "metric": "minkowski",
    "m": None,
    "a": None,
    "grid": None,
    "n": 128,
    "format": "json",
    "output": None,
    "seed": 0,
}


class UsageError(Exception):
    pass


def _common(p):
    p.add_argument("--config", type=Path, help="key = value file; command-line options override it")
    p.add_argument("--metric", choices=("minkowski", "schwarzschild", "kerr", "custom"))
    p.add_argument("--m", type=float, help="mass (geometric units)")
    p.add_argument("--a", type=float, help="spin (geometric units)")
    p.add_argument("--grid", type=Path, help="tabulated metric file for --metric custom")
    p.add_argument("--n", type=int, help="quadrature nodes (default 128)")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--output", "-o", type=Path, help="write to this file instead of stdout")


def build_parser():
    parser = argparse.ArgumentParser(prog="cnt-energy", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("energy", help="E(x, y); zero field by default")
    _common(p)
    p.add_argument("--r0", type=float)
    p.add_argument("--field", type=Path, help="CSV with header theta,x,y (cubic interpolation)")
    p.add_argument("--y", dest="y_expr", metavar="EXPR",
                   help="embedding freedom y(theta); x then follows from the EL equation")

    p = sub.add_parser("saddle", help="classify the critical point (0, 0)")
    _common(p)
    p.add_argument("--r0", type=float)

    p = sub.add_parser("second-variation", help="delta^2 E along a (u, v) or f direction")
    _common(p)
    p.add_argument("--r0", type=float)
    p.add_argument("--u", metavar="EXPR", help="u(theta); x = eps R u")
    p.add_argument("--v", metavar="EXPR", help="v(theta); y = eps Sigma v")
    p.add_argument("--f", metavar="EXPR", help="use (u, v) = (-f cos, f sin) instead")

    p = sub.add_parser("el", help="shoot the Euler-Lagrange system")
    _common(p)
    p.add_argument("--r0", type=float)
    p.add_argument("--bracket", metavar="LO,HI", help="x0 bracket; default scans -1:1:0.1")
    p.add_argument("--scan", metavar="LO:HI:STEP", help="x0 values for the auto scan")
    p.add_argument("--steps", type=int, help="RK4 steps (default 8000)")
    p.add_argument("--delta", type=float, help="start offset from the axis (default 1e-4)")
    p.add_argument("--emit", choices=("field", "scan"), help="CSV content (default field)")

    p = sub.add_parser("sweep", help="E(0,0), K_max and verdict over a range of r0")
    _common(p)
    p.add_argument("--r0", metavar="LO:HI:STEP")
    p.add_argument("--workers", type=int)
    p.add_argument("--wy-samples", type=int,
                   help="JSON only: per r0, min of E(y) - E(0,0) over this many random y")
    p.add_argument("--seed", type=int)

    p = sub.add_parser("oracle", help="finite-difference versus closed-form checks")
    _common(p)
    p.add_argument("--r0", type=float)
    p.add_argument("--trials", type=int, help="random directions (default 20)")
    p.add_argument("--seed", type=int)
    p.add_argument("--eps", type=float, help="finite-difference step (default 1e-3)")
    return parser


def _read_config(path, parser_action_types):
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        dest = key.replace("-", "_")
        if dest == "y":
            dest = "y_expr"
        if dest not in parser_action_types or dest == "config":
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        conv = parser_action_types[dest]
        try:
            values[dest] = conv(value) if conv else value
        except (TypeError, ValueError) as exc:
            raise UsageError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from None
    return values


def _subparser(parser, name):
    for action in parser._subparsers._group_actions:
        return action.choices[name]


def resolve(parser, argv):
    """Parse ``argv`` and merge the optional config file; returns a namespace."""
    args = parser.parse_args(argv)
    sp = _subparser(parser, args.command)
    types = {a.dest: a.type for a in sp._actions if a.dest != "help"}
    if args.config is not None:
        for key, value in _read_config(args.config, types).items():
            if getattr(args, key, None) is None:
                setattr(args, key, value)
        for action in sp._actions:
            value = getattr(args, action.dest, None)
            if action.choices and value is not None and value not in action.choices:
                raise UsageError(f"invalid {action.dest}: {value!r}")
    for key, value in DEFAULTS.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    return args


def _metric(args):
    if args.metric == "custom":
        if args.grid is None:
            raise UsageError("--metric custom needs --grid FILE")
        return load_grid_metric(args.grid)
    return make_metric(args.metric, args.m, args.a)


def _r0(args):
    if args.r0 is None:
        raise UsageError("--r0 is required")
    return float(args.r0)


def _range(text):
    parts = str(text).split(":")
    if len(parts) != 3:
        raise UsageError(f"expected LO:HI:STEP, got {text!r}")
    lo, hi, step = (float(p) for p in parts)
    if step <= 0 or hi < lo:
        raise UsageError(f"bad range {text!r}")
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 12) for i in range(count)]


def _emit(args, text):
    if args.output is None:
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)


def _note(msg):
    print(msg, file=sys.stderr)


def cmd_energy(args):
    metric, r0 = _metric(args), _r0(args)
    grid = gauss_legendre_grid(args.n)
    if args.field is not None and args.y_expr is not None:
        raise UsageError("--field and --y are mutually exclusive")
    if args.field is not None:
        report = energy_E(metric, r0, FreedomField.from_csv(args.field), grid)
        kind = "field"
    elif args.y_expr is not None:
        y = parse_expression(args.y_expr, r0=r0)
        report = wang_yau_energy_axisym(metric, r0, FreedomField(y=y, y_th=y.derivative()), grid)
        kind = "wang-yau"
    else:
        report = energy_E(metric, r0, FreedomField.zero(), grid)
        kind = "zero"
    if args.format == "csv":
        _note(f"value={fmt_float(report.value)} err_est={fmt_float(report.err_est)}")
        _emit(args, report.to_csv())
    else:
        payload = {"command": "energy", "metric": metric.describe(), "r0": r0, "field": kind}
        payload.update(report.to_dict())
        if kind == "zero":
            payload["E00_closed_form"] = energy_zero(metric, r0, grid)
        _emit(args, dumps_json(payload))
    return EXIT_OK


def cmd_saddle(args):
    metric, r0 = _metric(args), _r0(args)
    grid = gauss_legendre_grid(args.n)
    verdict = classify(metric, r0, grid)
    fine = classify(metric, r0, gauss_legendre_grid(2 * args.n))
    err = max(abs(fine.negative_value - verdict.negative_value),
              abs(fine.positive_value - verdict.positive_value))
    if args.format == "csv":
        _note(f"err_est={fmt_float(err)}")
        _emit(args, dumps_csv(("r0", "Kmax", "theta0", "neg_value", "pos_value", "verdict"),
                              [(r0, verdict.K_max, verdict.theta0, verdict.negative_value,
                                verdict.positive_value, verdict.verdict)]))
    else:
        payload = {"command": "saddle", "metric": metric.describe(), "r0": r0, "n_nodes": args.n,
                   "err_est": err}
        payload.update(verdict.to_dict())
        _emit(args, dumps_json(payload))
    return EXIT_OK


def cmd_second_variation(args):
    metric, r0 = _metric(args), _r0(args)
    grid = gauss_legendre_grid(args.n)
    if args.f is not None:
        if args.u is not None or args.v is not None:
            raise UsageError("--f excludes --u/--v")
        f = parse_expression(args.f, r0=r0)
        value = second_variation_f(metric, r0, f, grid)
        err = abs(second_variation_f(metric, r0, f, gauss_legendre_grid(2 * args.n)) - value)
        payload = {"command": "second-variation", "metric": metric.describe(), "r0": r0,
                   "direction": {"f": args.f}, "delta2E": value, "Q": value / 2.0,
                   "n_nodes": args.n, "err_est": err}
    else:
        u = parse_expression(args.u if args.u is not None else "0", r0=r0)
        v = parse_expression(args.v if args.v is not None else "0", r0=r0)
        rep = second_variation_Q(metric, r0, u, v, grid, du=u.derivative(), dv=v.derivative(),
                                 estimate_error=True)
        payload = {"command": "second-variation", "metric": metric.describe(), "r0": r0,
                   "direction": {"u": args.u or "0", "v": args.v or "0"}}
        payload.update(rep.to_dict())
    if args.format == "csv":
        _note(f"err_est={fmt_float(payload['err_est'])}")
        _emit(args, dumps_csv(("r0", "Q", "delta2E"), [(r0, payload["Q"], payload["delta2E"])]))
    else:
        _emit(args, dumps_json(payload))
    return EXIT_OK


def cmd_el(args):
    metric, r0 = _metric(args), _r0(args)
    config = ShootingConfig(delta=args.delta or 1e-4, steps=args.steps or 8000)
    bracket = None
    if args.bracket is not None:
        try:
            lo, hi = (float(s) for s in args.bracket.split(","))
        except ValueError:
            raise UsageError(f"expected LO,HI for --bracket, got {args.bracket!r}") from None
        bracket = (lo, hi)
    scan_values = _range(args.scan) if args.scan else None
    try:
        sol = solve_el_shooting(metric, r0, bracket, config, scan_values)
    except errors.NoRoot as exc:
        if args.format == "csv":
            _emit(args, dumps_csv(("x0", "terminal_y"), exc.scan))
        else:
            _emit(args, dumps_json({"command": "el", "metric": metric.describe(), "r0": r0,
                                    "root": None, "scan": [list(row) for row in exc.scan]}))
        raise
    res = el_residual(metric, r0, sol, gauss_legendre_grid(args.n))
    # residual on the doubled grid doubles as the error estimate
    res_fine = el_residual(metric, r0, sol, gauss_legendre_grid(2 * args.n))
    dx0, dxpi = sol.axis_regularity()
    if args.format == "csv":
        _note(f"x0={fmt_float(sol.x0)} residual={fmt_float(res.sup_norm)} "
              f"err_est={fmt_float(res_fine.sup_norm)}")
        if args.emit == "scan":
            _emit(args, dumps_csv(("x0", "terminal_y"), sol.scan))
        else:
            _emit(args, sol.to_csv())
    else:
        _emit(args, dumps_json({
            "command": "el", "metric": metric.describe(), "r0": r0,
            "root": {"x0": sol.x0, "terminal_y": sol.terminal_y,
                     "residual_sup_norm": res.sup_norm,
                     "x_theta_at_ends": [dx0, dxpi],
                     "sup_abs_x": float(np.max(np.abs(sol.xs))),
                     "sup_abs_y": float(np.max(np.abs(sol.ys)))},
            "n_nodes": args.n, "err_est": res_fine.sup_norm,
            "scan": [list(row) for row in sol.scan],
        }))
    return EXIT_OK


def cmd_sweep(args):
    metric = _metric(args)
    if args.r0 is None:
        raise UsageError("--r0 LO:HI:STEP is required")
    r0s = _range(args.r0)
    for r in r0s:
        metric.check_r(r)
    grid = gauss_legendre_grid(args.n)
    rows = parameter_sweep(metric, r0s, grid, args.workers)
    fine = {r: energy_zero(metric, r, gauss_legendre_grid(2 * args.n)) for r in r0s}
    err = max(abs(fine[row[0]] - row[1]) for row in rows)
    if args.format == "csv":
        _note(f"err_est={fmt_float(err)}")
        _emit(args, dumps_csv(SWEEP_HEADER, rows))
    else:
        out_rows = [dict(zip(SWEEP_HEADER, row)) for row in rows]
        if args.wy_samples:
            for row in out_rows:
                excess = wang_yau_samples(metric, row["r0"], args.wy_samples, args.seed, grid)
                row["wy_min_excess"] = min(excess)
        _emit(args, dumps_json({
            "command": "sweep", "metric": metric.describe(), "n_nodes": args.n, "err_est": err,
            "rows": out_rows}))
    return EXIT_OK


def run_oracle(metric, r0, trials=20, seed=0, eps=1e-3, n=128):
    """FD-versus-closed-form checks; returns ``(passed, checks)``."""
    grid = gauss_legendre_grid(n)
    rng = np.random.default_rng(seed)
    checks = []

    zero_res = el_residual(metric, r0, FreedomField.zero(), grid).sup_norm
    checks.append({"check": "el_residual_zero_field", "value": zero_res, "tol": 1e-12,
                   "pass": zero_res < 1e-12})

    worst_first, worst_rel = 0.0, 0.0
    for _ in range(trials):
        u, v, du, dv = random_direction(rng)
        first, second = fd_variation(metric, r0, u, v, eps, grid, du, dv)
        q2 = second_variation_Q(metric, r0, u, v, grid, du, dv).delta2E
        worst_first = max(worst_first, abs(first))
        worst_rel = max(worst_rel, abs(second - q2) / max(abs(q2), 1e-12))
    checks.append({"check": "fd_first_variation", "value": worst_first, "tol": 1e-8,
                   "pass": worst_first < 1e-8})
    checks.append({"check": "fd_second_vs_2Q_rel", "value": worst_rel, "tol": 1e-4,
                   "pass": worst_rel < 1e-4})

    th = rng.uniform(0.05, np.pi - 0.05, size=100)
    y = rng.normal(size=100)
    y_th = rng.normal(size=100)
    defect = float(np.max(np.abs(appendix_identity_defect(metric, r0, th, y, y_th))))
    checks.append({"check": "appendix_identity", "value": defect, "tol": 1e-12,
                   "pass": defect < 1e-12})

    worst = 0.0
    for _ in range(max(1, trials // 2)):
        u, v, du, dv = random_direction(rng)
        f, df = u, du
        lhs = second_variation_f(metric, r0, f, grid)
        rhs = 2.0 * second_variation_Q(
            metric, r0, lambda t: -f(t) * np.cos(t), lambda t: f(t) * np.sin(t), grid,
            du=lambda t: -df(t) * np.cos(t) + f(t) * np.sin(t),
            dv=lambda t: df(t) * np.sin(t) + f(t) * np.cos(t)).Q
        worst = max(worst, abs(lhs - rhs))
    checks.append({"check": "K_form_consistency", "value": worst, "tol": 1e-10,
                   "pass": worst < 1e-10})
    return all(c["pass"] for c in checks), checks


def cmd_oracle(args):
    metric, r0 = _metric(args), _r0(args)
    trials = args.trials if args.trials is not None else 20
    eps = args.eps if args.eps is not None else 1e-3
    passed, checks = run_oracle(metric, r0, trials, args.seed, eps, args.n)
    fine_ok, fine_checks = run_oracle(metric, r0, min(trials, 2), args.seed, eps, 2 * args.n)
    err = abs(fine_checks[2]["value"] - checks[2]["value"])
    if args.format == "csv":
        _note(f"err_est={fmt_float(err)}")
        _emit(args, dumps_csv(("check", "value", "tol", "pass"),
                              [(c["check"], c["value"], c["tol"], c["pass"]) for c in checks]))
    else:
        _emit(args, dumps_json({"command": "oracle", "metric": metric.describe(), "r0": r0,
                                "trials": trials, "seed": args.seed, "eps": eps,
                                "n_nodes": args.n, "err_est": err,
                                "passed": passed, "checks": checks}))
    return EXIT_OK if passed else EXIT_NUMERIC


COMMANDS = {
    "energy": cmd_energy,
    "saddle": cmd_saddle,
    "second-variation": cmd_second_variation,
    "el": cmd_el,
    "sweep": cmd_sweep,
    "oracle": cmd_oracle,
}


# options whose values may start with '-' (expressions, ranges, brackets)
_SIGNED_OPTIONS = ("--u", "--v", "--f", "--y", "--scan", "--bracket", "--r0")


def _glue_signed_values(argv):
    """Rewrite ``--u -cos(theta)`` as ``--u=-cos(theta)`` so argparse accepts it."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _SIGNED_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None):
    parser = build_parser()
    argv = _glue_signed_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = resolve(parser, argv)
        if args.n < 4:
            raise UsageError("--n must be at least 4")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"cnt-energy: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _USAGE_ERRORS as exc:
        print(f"cnt-energy: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _NUMERIC_ERRORS as exc:
        print(f"cnt-energy: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
