"""Command-line interface: solve, sweep, limit, thresholds, verify, figure,
plot.

Configuration files are INI-style key/value sections ([market], [sweep]);
command-line flags override file values.  JSON goes to stdout with sorted
keys; CSV and SVG artifacts are byte-deterministic for a given
configuration and seed.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import sys
from typing import List, Optional

from .equilibrium import solve_point
from .errors import KyleEqError
from .figures import FIGURES, run_figure
from .limits import limit_round_tripper, limit_small_it
from .params import MarketParams, Regime
from .serialize import dumps, solution_from_dict, solution_to_dict
from .specialized import solve_specialized
from .sweep import Axis, SweepConfig, emit_csv, run_sweep, sweep_columns
from .thresholds import (critical_gamma, critical_theta1plus_pure,
                         existence_boundary, inverse_rt_boundary,
                         profit_thresholds)
from .verify import verify_equilibrium

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_NO_EQUILIBRIUM = 3
EXIT_IO = 4


def _market_args(sub):
    sub.add_argument("--j1", type=int, default=None,
                     help="zero-aversion trader count")
    sub.add_argument("--j2", type=int, default=None,
                     help="infinite-aversion trader count")
    sub.add_argument("--gamma", type=float, default=None,
                     help="single trader's finite dimensionless aversion")
    sub.add_argument("--theta-1plus", type=float, default=None)
    sub.add_argument("--theta-2", type=float, default=None)
    sub.add_argument("--theta-eps", type=float, default=None)
    sub.add_argument("--sigma-v", type=float, default=None)
    sub.add_argument("--sigma-1", type=float, default=None)
    sub.add_argument("--config", type=str, default=None,
                     help="INI file with [market] (and [sweep]) sections")


def _load_ini(path: Optional[str]) -> dict:
    cfg: dict = {"market": {}, "sweep": {}}
    if not path:
        return cfg
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise KyleEqError(f"cannot read config file {path!r}")
    for section in ("market", "sweep"):
        if parser.has_section(section):
            cfg[section] = dict(parser.items(section))
    return cfg


def _build_params(args) -> MarketParams:
    ini = _load_ini(getattr(args, "config", None))["market"]

    def pick(flag, key, cast, default):
        val = getattr(args, flag, None)
        if val is not None:
            return val
        if key in ini:
            return cast(ini[key])
        return default

    j1 = pick("j1", "j1", int, 0)
    j2 = pick("j2", "j2", int, 0)
    gamma = pick("gamma", "gamma", float, None)
    t1p = pick("theta_1plus", "theta_1plus", float, 1.0)
    t2 = pick("theta_2", "theta_2", float, 1.0)
    te = pick("theta_eps", "theta_eps", float, 0.0)
    params = MarketParams(theta_1plus=t1p, theta_2=t2, theta_eps=te,
                          j1=j1, j2=j2, gamma=gamma)
    sv = pick("sigma_v", "sigma_v", float, None)
    s1 = pick("sigma_1", "sigma_1", float, None)
    if sv is not None or s1 is not None:
        params = params.with_scale(sv or 1.0, s1 or 1.0)
    return params


def _cmd_solve(args) -> int:
    params = _build_params(args)
    hint = None
    if args.regime:
        hint = Regime(args.regime)
    solver = solve_specialized if args.specialized else solve_point
    sol = solver(params, regime_hint=hint)
    print(dumps(solution_to_dict(sol)))
    return EXIT_OK if sol.found else EXIT_NO_EQUILIBRIUM


def _parse_axis(spec: str) -> Axis:
    # name:lo:hi:n[:scale]
    parts = spec.split(":")
    if len(parts) not in (4, 5):
        raise KyleEqError(f"axis spec {spec!r} is not name:lo:hi:n[:scale]")
    name, lo, hi, n = parts[0], float(parts[1]), float(parts[2]), int(parts[3])
    scale = parts[4] if len(parts) == 5 else "linear"
    return Axis(name=name, lo=lo, hi=hi, n=n, scale=scale)


def _cmd_sweep(args) -> int:
    ini = _load_ini(args.config)
    params = _build_params(args)
    axis1 = args.axis1 or ini["sweep"].get("axis1")
    axis2 = args.axis2 or ini["sweep"].get("axis2")
    if axis1 is None:
        print("sweep requires --axis1 name:lo:hi:n[:scale]", file=sys.stderr)
        return EXIT_USAGE
    config = SweepConfig(
        j1=params.j1, j2=params.j2, gamma=params.gamma,
        theta_1plus=params.theta_1plus, theta_2=params.theta_2,
        theta_eps=params.theta_eps,
        axis1=_parse_axis(axis1) if isinstance(axis1, str) else axis1,
        axis2=_parse_axis(axis2) if isinstance(axis2, str) else axis2,
        with_profits=not args.no_profits)
    rows = run_sweep(config)
    cols = sweep_columns(config)
    try:
        emit_csv(rows, cols, args.out)
    except OSError as exc:
        print(f"cannot write {args.out!r}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(args.out)
    return EXIT_OK


def _cmd_limit(args) -> int:
    regime = Regime(args.regime)
    if args.small_it:
        lim = limit_small_it(args.j, args.theta_eps, args.theta_2, regime)
    elif args.round_tripper:
        lim = limit_round_tripper(args.j, args.theta_eps, args.theta_2, regime)
    else:
        print("choose --small-it or --round-tripper", file=sys.stderr)
        return EXIT_USAGE
    out = {"regime": lim.regime.value, "a1": lim.a1, "theta_z": lim.theta_z,
           "a21": lim.a21, "alpha22": lim.alpha22, "beta21": lim.beta21,
           "lambda1": lim.lambda1, "lambda22": lim.lambda22, "zeta": lim.zeta}
    print(dumps(out))
    return EXIT_OK


def _cmd_thresholds(args) -> int:
    kind = args.kind
    if kind == "gamma_bar":
        res = critical_gamma(args.theta_1plus or 1.0, args.theta_2 or 1.0,
                             args.theta_eps or 0.0)
    elif kind == "theta_bar_1plus":
        res = critical_theta1plus_pure(args.j, n_grid=args.grid)
    elif kind == "inverse_rt":
        res = inverse_rt_boundary(args.j1, args.j2, args.theta_eps or 0.0)
    elif kind == "existence":
        res = existence_boundary(args.j1, args.j2, args.theta_eps or 0.0)
    elif kind == "profit_eps":
        tilde, hat = profit_thresholds(args.j, args.theta_1plus or 1.0)
        print(dumps({"theta_tilde_eps": tilde.value, "theta_hat_eps": hat.value,
                     "tilde_bracket": list(tilde.bracket),
                     "hat_bracket": list(hat.bracket),
                     "tilde_censored": tilde.censored,
                     "hat_censored": hat.censored}))
        return EXIT_OK
    else:
        print(f"unknown threshold kind {kind!r}", file=sys.stderr)
        return EXIT_USAGE
    print(dumps({"kind": res.kind, "value": res.value,
                 "bracket": list(res.bracket), "monitored": res.monitored,
                 "censored": res.censored}))
    return EXIT_OK


def _cmd_verify(args) -> int:
    import json
    with open(args.input, "r", encoding="utf-8") as fh:
        sol = solution_from_dict(json.load(fh))
    rep = verify_equilibrium(sol, n=args.n, seed=args.seed, k_se=args.k_se)
    out = {k: getattr(rep, k) for k in
           ("n", "seed", "k_se", "pricing_pass", "pricing_margin",
            "deviation_pass", "deviation_margin", "indifference_pass",
            "indifference_margin", "zero_sum_pass", "zero_sum_margin",
            "clearing_pass", "clearing_margin")}
    out["passed"] = rep.passed
    print(dumps(out))
    return EXIT_OK if rep.passed else EXIT_FAIL


def _cmd_figure(args) -> int:
    if args.name == "list":
        for name, (desc, _) in sorted(FIGURES.items(),
                                      key=lambda kv: int(kv[0][3:])):
            print(f"{name}: {desc}")
        return EXIT_OK
    rows, cols = run_figure(args.name)
    path = args.out or f"{args.name}.csv"
    from .sweep import emit_csv as _emit
    try:
        _emit(rows, cols, path)
    except OSError as exc:
        print(f"cannot write {path!r}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(path)
    return EXIT_OK


def _cmd_plot(args) -> int:
    from .svg import contour_svg, line_svg
    with open(args.csv, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
    try:
        if args.contour:
            text = contour_svg(rows, args.x, args.y[0] if args.y else args.x,
                               args.contour, title=args.title)
        else:
            if not args.y:
                print("plot requires --y columns", file=sys.stderr)
                return EXIT_USAGE
            text = line_svg(rows, args.x, args.y, title=args.title)
    except KyleEqError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    try:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"cannot write {args.out!r}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kyle-eq",
        description="Equilibria of a three-period informed-trading market "
                    "with anticipatory fast traders")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one parameter point")
    _market_args(p)
    p.add_argument("--regime", choices=["mixed", "pure"], default=None)
    p.add_argument("--specialized", action="store_true",
                   help="use the per-configuration reduced system")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("sweep", help="solve a parameter grid to CSV")
    _market_args(p)
    p.add_argument("--axis1", type=str, default=None,
                   help="name:lo:hi:n[:scale], scale in {linear,sqrt,log}")
    p.add_argument("--axis2", type=str, default=None)
    p.add_argument("--no-profits", action="store_true")
    p.add_argument("--out", type=str, required=True)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("limit", help="closed-form vanishing-fast-noise limits")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--small-it", action="store_true")
    g.add_argument("--round-tripper", action="store_true")
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--theta-eps", type=float, default=0.0)
    p.add_argument("--theta-2", type=float, default=1.0)
    p.add_argument("--regime", choices=["mixed", "pure"], required=True)
    p.set_defaults(func=_cmd_limit)

    p = sub.add_parser("thresholds", help="critical-parameter finders")
    p.add_argument("--kind", required=True,
                   choices=["gamma_bar", "theta_bar_1plus", "profit_eps",
                            "inverse_rt", "existence"])
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--j1", type=int, default=1)
    p.add_argument("--j2", type=int, default=1)
    p.add_argument("--theta-1plus", type=float, default=None)
    p.add_argument("--theta-2", type=float, default=None)
    p.add_argument("--theta-eps", type=float, default=None)
    p.add_argument("--grid", type=int, default=16)
    p.set_defaults(func=_cmd_thresholds)

    p = sub.add_parser("verify", help="Monte-Carlo + analytic verification")
    p.add_argument("--input", type=str, required=True,
                   help="solution JSON from `solve`")
    p.add_argument("--n", type=int, default=10 ** 6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k-se", type=float, default=4.0)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("figure", help="run a named figure-data preset")
    p.add_argument("name", type=str,
                   help="fig1..fig19, or 'list' to enumerate")
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(func=_cmd_figure)

    p = sub.add_parser("plot", help="render a sweep CSV as SVG")
    p.add_argument("--csv", type=str, required=True)
    p.add_argument("--x", type=str, required=True)
    p.add_argument("--y", type=str, nargs="*", default=None)
    p.add_argument("--contour", type=str, default=None,
                   help="z column for a filled-contour rendering")
    p.add_argument("--title", type=str, default="")
    p.add_argument("--out", type=str, required=True)
    p.set_defaults(func=_cmd_plot)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except KyleEqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_EQUILIBRIUM if "equilibrium" in str(exc).lower() else EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
