"""Parameter sweeps: grid construction, warm-started row solves, a process
pool over the outer axis, and deterministic CSV emission."""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence

import numpy as np

from .equilibrium import EquilibriumSolution, solve_point
from .errors import KyleEqError
from .params import MarketParams, Regime
from .profits import expected_profits

AXIS_NAMES = ("theta_1plus", "theta_eps", "theta_2", "gamma")

OUTPUT_COLUMNS = ("a1", "theta_z", "a21", "alpha22", "beta11", "beta21",
                  "beta22", "beta23", "beta12", "lambda1", "lambda1plus",
                  "lambda21", "lambda22", "regime", "it_profit",
                  "hft_profit_small", "hft_profit_rt", "residual_norm",
                  "multiplicity_flag")


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float
    n: int
    scale: str = "linear"   # "linear" | "sqrt"

    def values(self) -> np.ndarray:
        if self.scale == "sqrt":
            s = np.linspace(math.sqrt(self.lo), math.sqrt(self.hi), self.n)
            return s * s
        if self.scale == "log":
            return np.geomspace(self.lo, self.hi, self.n)
        return np.linspace(self.lo, self.hi, self.n)


@dataclass(frozen=True)
class SweepConfig:
    j1: int = 0
    j2: int = 0
    gamma: Optional[float] = None
    theta_1plus: float = 1.0
    theta_2: float = 1.0
    theta_eps: float = 0.0
    axis1: Optional[Axis] = None
    axis2: Optional[Axis] = None
    with_profits: bool = True

    def base_params(self) -> MarketParams:
        return MarketParams(theta_1plus=self.theta_1plus, theta_2=self.theta_2,
                            theta_eps=self.theta_eps, j1=self.j1, j2=self.j2,
                            gamma=self.gamma)

    def at(self, **axis_values) -> MarketParams:
        base = self.base_params()
        return replace(base, **axis_values)


def _row_from_solution(sol: EquilibriumSolution, with_profits: bool) -> Dict[str, object]:
    row: Dict[str, object] = {}
    if not sol.found:
        for c in OUTPUT_COLUMNS:
            row[c] = ""
        row["regime"] = Regime.NO_EQUILIBRIUM.value
        row["residual_norm"] = sol.residual_norm
        row["multiplicity_flag"] = False
        return row
    row.update(sol.coeff_dict())
    row["multiplicity_flag"] = sol.multiplicity_flag
    if with_profits:
        rep = expected_profits(sol)
        row["it_profit"] = rep.it_profit
        row["hft_profit_small"] = rep.hft_profit_small
        row["hft_profit_rt"] = rep.hft_profit_rt
    else:
        row["it_profit"] = row["hft_profit_small"] = row["hft_profit_rt"] = ""
    return row


def _solve_line(config: SweepConfig, values1: Sequence[float],
                fixed2: Optional[Dict[str, float]]) -> List[Dict[str, object]]:
    """Warm-started continuation along axis1 at one fixed axis2 value."""
    rows = []
    warm = None
    for v1 in values1:
        axis_vals = {config.axis1.name: float(v1)}
        if fixed2:
            axis_vals.update(fixed2)
        try:
            params = config.at(**axis_vals)
            sol = solve_point(params, init=warm)
        except KyleEqError:
            sol = EquilibriumSolution(params=None, regime=Regime.NO_EQUILIBRIUM,
                                      profile=None, pricing=None, soc=None,
                                      residual_norm=math.inf)
        if sol.found:
            warm = sol.profile
        row = {config.axis1.name: float(v1)}
        if fixed2:
            row.update(fixed2)
        row.update(_row_from_solution(sol, config.with_profits))
        rows.append(row)
    return rows


def _worker(args):
    config, values1, fixed2 = args
    return _solve_line(config, values1, fixed2)


def worker_count() -> int:
    env = os.environ.get("KYLE_EQ_THREADS")
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)


def run_sweep(config: SweepConfig) -> List[Dict[str, object]]:
    """Solve the grid; rows are ordered by (axis2 index, axis1 index)."""
    if config.axis1 is None:
        sol = solve_point(config.base_params())
        return [_row_from_solution(sol, config.with_profits)]
    values1 = config.axis1.values()
    if config.axis2 is None:
        return _solve_line(config, values1, None)
    tasks = [(config, values1, {config.axis2.name: float(v2)})
             for v2 in config.axis2.values()]
    workers = min(worker_count(), len(tasks))
    if workers <= 1:
        lines = [_worker(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            lines = list(pool.map(_worker, tasks))
    rows: List[Dict[str, object]] = []
    for line in lines:
        rows.extend(line)
    return rows


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(float(x))
    return str(x)


def rows_to_csv(rows: List[Dict[str, object]], columns: Sequence[str]) -> str:
    """RFC-4180-style CSV with shortest round-trip float formatting."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c, "")) for c in columns])
    return buf.getvalue()


def emit_csv(rows: List[Dict[str, object]], columns: Sequence[str],
             path: str) -> None:
    text = rows_to_csv(rows, columns)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def sweep_columns(config: SweepConfig) -> List[str]:
    cols = []
    if config.axis1 is not None:
        cols.append(config.axis1.name)
    if config.axis2 is not None:
        cols.insert(0, config.axis2.name)
    cols.extend(OUTPUT_COLUMNS)
    return cols
