"""Named data presets reproducing the content of the study's figures.

Grid resolutions are deliberately smaller than a print-quality rendering;
each preset states its grid so the qualitative claims it supports can be
checked quickly.  Every preset returns (rows, columns); all are
deterministic.
"""

from __future__ import annotations

import math
from typing import Callable, Dict, List, Tuple

import numpy as np

from .equilibrium import solve_point
from .errors import KyleEqError
from .limits import limit_small_it
from .params import MarketParams, Regime
from .profits import benchmark_it_profit, expected_profits
from .thresholds import (critical_theta1plus_pure, existence_boundary,
                         inverse_rt_boundary, profit_thresholds)

SQRT_EPS_GRID = np.linspace(0.0, 2.0, 33)


def _series_small_it(J: int, theta_1plus: float, want: str) -> List[float]:
    out = []
    warm = None
    for se in SQRT_EPS_GRID:
        params = MarketParams(theta_1plus=theta_1plus, theta_2=1.0,
                              theta_eps=float(se * se), j1=J)
        sol = solve_point(params, init=warm)
        if not sol.found:
            out.append(math.nan)
            continue
        warm = sol.profile
        if want == "theta_z":
            out.append(sol.profile.theta_z)
        elif want == "it_profit":
            out.append(expected_profits(sol).it_profit)
        else:
            out.append(expected_profits(sol).hft_profit_small)
    return out


def _series_back_runner(J: int, want: str) -> List[float]:
    """Vanishing-fast-noise benchmark via the closed-form limit for the
    strategy, and a tiny-theta solve for profit levels."""
    out = []
    warm = None
    for se in SQRT_EPS_GRID:
        te = float(se * se)
        if want == "theta_z":
            try:
                lim = limit_small_it(J, te, 1.0, Regime.MIXED)
                out.append(lim.theta_z)
            except KyleEqError:
                out.append(0.0)
            continue
        params = MarketParams(theta_1plus=1e-6, theta_2=1.0, theta_eps=te, j1=J)
        sol = solve_point(params, init=warm)
        if not sol.found:
            out.append(math.nan)
            continue
        warm = sol.profile
        rep = expected_profits(sol)
        out.append(rep.it_profit if want == "it_profit" else rep.hft_profit_small)
    return out


def _small_it_figure(J: int, want: str) -> Tuple[List[dict], List[str]]:
    main = _series_small_it(J, 1.0, want)
    bench = _series_back_runner(J, want)
    cols = ["sqrt_theta_eps", f"{want}_small_it", f"{want}_back_runner"]
    rows = [{"sqrt_theta_eps": float(s), cols[1]: m, cols[2]: b}
            for s, m, b in zip(SQRT_EPS_GRID, main, bench)]
    if want == "it_profit":
        nohft = benchmark_it_profit(1.0)
        cols.append("it_profit_no_hft")
        for r in rows:
            r["it_profit_no_hft"] = nohft
    return rows, cols


def _rt_contour(J: int, want: str, n: int = 17) -> Tuple[List[dict], List[str]]:
    sq_t1p = np.linspace(0.1, 1.4, n)
    sq_te = np.linspace(0.0, 2.0, n)
    rows = []
    bench = benchmark_it_profit(1.0) if want == "it_profit" else None
    for st in sq_t1p:
        warm = None
        for se in sq_te:
            params = MarketParams(theta_1plus=float(st * st), theta_2=1.0,
                                  theta_eps=float(se * se), j2=J)
            sol = solve_point(params, init=warm)
            row = {"sqrt_theta_1plus": float(st), "sqrt_theta_eps": float(se)}
            if sol.found:
                warm = sol.profile
                if want == "theta_z":
                    row["theta_z"] = sol.profile.theta_z
                else:
                    rep = expected_profits(sol)
                    row[want] = (rep.it_profit if want == "it_profit"
                                 else rep.hft_profit_rt)
                    if bench is not None:
                        row["it_profit_no_hft"] = bench
            else:
                row[want] = math.nan
            rows.append(row)
    cols = ["sqrt_theta_1plus", "sqrt_theta_eps", want]
    if bench is not None:
        cols.append("it_profit_no_hft")
    return rows, cols


def _proportion_series(J: int, want: str) -> Tuple[List[dict], List[str]]:
    props = (0.0, 0.2, 0.5, 0.8, 1.0)
    cols = ["sqrt_theta_eps"] + [f"{want}_p{int(100 * p)}" for p in props]
    rows = [{"sqrt_theta_eps": float(s)} for s in SQRT_EPS_GRID]
    for p in props:
        j1 = int(round(p * J))
        j2 = J - j1
        warm = None
        for i, se in enumerate(SQRT_EPS_GRID):
            params = MarketParams(theta_1plus=1.0, theta_2=1.0,
                                  theta_eps=float(se * se), j1=j1, j2=j2)
            sol = solve_point(params, init=warm)
            key = f"{want}_p{int(100 * p)}"
            if not sol.found:
                rows[i][key] = math.nan
                continue
            warm = sol.profile
            if want == "theta_z":
                rows[i][key] = sol.profile.theta_z
            else:
                rep = expected_profits(sol)
                rows[i][key] = {"it_profit": rep.it_profit,
                                "small_profit": rep.hft_profit_small,
                                "rt_profit": rep.hft_profit_rt}[want]
    return rows, cols


def _fig17() -> Tuple[List[dict], List[str]]:
    exist = existence_boundary(1, 9, 0.0)
    lo = max(exist.bracket[1] * 1.1, 1e-3)
    thetas = np.geomspace(lo, 1.0, 25)
    rows = []
    warm = None
    for t in thetas:
        params = MarketParams(theta_1plus=float(t), theta_2=1.0, theta_eps=0.0,
                              j1=1, j2=9)
        sol = solve_point(params, init=warm)
        row = {"theta_1plus": float(t)}
        if sol.found:
            warm = sol.profile
            p = sol.profile
            rep = expected_profits(sol)
            row.update(dir_x1=p.beta11,
                       dir_x2=p.beta21 + p.beta22 * (p.beta12 * 9) + p.beta23 * p.beta11,
                       theta_z=p.theta_z, it_profit=rep.it_profit,
                       type1_profit=rep.hft_profit_small,
                       rt_profit=rep.hft_profit_rt)
        rows.append(row)
    return rows, ["theta_1plus", "dir_x1", "dir_x2", "theta_z", "it_profit",
                  "type1_profit", "rt_profit"]


def _fig18() -> Tuple[List[dict], List[str]]:
    rows = []
    for j2 in range(1, 10):
        res = inverse_rt_boundary(10 - j2, j2, 0.0)
        rows.append({"j2": j2, "theta_1plus_critical": res.value})
    return rows, ["j2", "theta_1plus_critical"]


def _fig19() -> Tuple[List[dict], List[str]]:
    rows = []
    for j2 in range(1, 10):
        res = existence_boundary(10 - j2, j2, 0.0)
        rows.append({"j2": j2, "theta_1plus_critical": res.value})
    return rows, ["j2", "theta_1plus_critical"]


def _fig11() -> Tuple[List[dict], List[str]]:
    rows = []
    for J in range(1, 11):
        res = critical_theta1plus_pure(J, n_grid=8)
        rows.append({"j": J, "theta_bar_1plus": res.value})
    return rows, ["j", "theta_bar_1plus"]


def _fig13() -> Tuple[List[dict], List[str]]:
    rows = []
    for st in np.linspace(0.15, 1.0, 8):
        tilde, hat = profit_thresholds(5, float(st * st))
        rows.append({"sqrt_theta_1plus": float(st),
                     "theta_tilde_eps": tilde.value,
                     "theta_hat_eps": hat.value})
    return rows, ["sqrt_theta_1plus", "theta_tilde_eps", "theta_hat_eps"]


FIGURES: Dict[str, Tuple[str, Callable[[], Tuple[List[dict], List[str]]]]] = {
    "fig1": ("one zero-aversion trader: randomization vs signal noise, "
             "fast market vs vanishing-fast-noise benchmark (33-point axis)",
             lambda: _small_it_figure(1, "theta_z")),
    "fig2": ("one zero-aversion trader: informed profit",
             lambda: _small_it_figure(1, "it_profit")),
    "fig3": ("one zero-aversion trader: anticipatory profit",
             lambda: _small_it_figure(1, "hft_profit")),
    "fig4": ("two zero-aversion traders: randomization",
             lambda: _small_it_figure(2, "theta_z")),
    "fig5": ("two zero-aversion traders: informed profit",
             lambda: _small_it_figure(2, "it_profit")),
    "fig6": ("two zero-aversion traders: anticipatory profit",
             lambda: _small_it_figure(2, "hft_profit")),
    "fig7": ("three zero-aversion traders: randomization",
             lambda: _small_it_figure(3, "theta_z")),
    "fig8": ("three zero-aversion traders: informed profit",
             lambda: _small_it_figure(3, "it_profit")),
    "fig9": ("three zero-aversion traders: anticipatory profit",
             lambda: _small_it_figure(3, "hft_profit")),
    "fig10": ("five unwinding traders: randomization surface (17x17 grid)",
              lambda: _rt_contour(5, "theta_z")),
    "fig11": ("critical fast-noise size above which the informed trader "
              "always plays pure, by population size (8-point noise grid per size)",
              _fig11),
    "fig12": ("five unwinding traders: informed profit surface (17x17 grid)",
              lambda: _rt_contour(5, "it_profit")),
    "fig13": ("profit thresholds in signal noise vs fast-noise size (J=5, 8 sizes)",
              _fig13),
    "fig14": ("five unwinding traders: per-trader profit surface (17x17 grid)",
              lambda: _rt_contour(5, "rt_profit")),
    "fig15": ("ten traders: randomization by zero-aversion proportion (33-point axis)",
              lambda: _proportion_series(10, "theta_z")),
    "fig16": ("ten traders: informed profit by zero-aversion proportion (33-point axis)",
              lambda: _proportion_series(10, "it_profit")),
    "fig17": ("one zero-aversion plus nine unwinding traders: directions, "
              "randomization, profits vs fast-noise size (25-point axis)",
              _fig17),
    "fig18": ("critical fast-noise size for role inversion, J=10 (splits 1..9)",
              _fig18),
    "fig19": ("critical fast-noise size for equilibrium existence, J=10 (splits 1..9)",
              _fig19),
}


def run_figure(name: str) -> Tuple[List[dict], List[str]]:
    if name not in FIGURES:
        raise KyleEqError(f"unknown figure preset {name!r}")
    return FIGURES[name][1]()
