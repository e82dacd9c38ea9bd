"""Full statistical and analytic verification of a solved equilibrium:
pricing recovery by OLS, closed-form deviation tests, mixed-regime
indifference, the zero-sum profit identity, and position clearing."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy.stats import norm

from . import best_response as br
from .equilibrium import EquilibriumSolution
from .errors import KyleEqError
from .params import Regime
from .profits import DEVIATION_STEPS, deviation_gains, expected_profits
from .simulate import BATCH, SimStats, play_arrays, simulate_market

DEVIATION_GAIN_TOL = 1e-10
INDIFFERENCE_ANALYTIC_TOL = 1e-9
ZERO_SUM_TOL = 1e-9


@dataclass(frozen=True)
class VerificationReport:
    n: int
    seed: int
    k_se: float
    pricing_pass: bool
    pricing_margin: float        # max |lambda_hat - lambda| / SE over the four impacts
    deviation_pass: bool
    deviation_margin: float      # max closed-form objective gain
    indifference_pass: Optional[bool]   # None when not applicable (pure regime)
    indifference_margin: Optional[float]
    zero_sum_pass: bool
    zero_sum_margin: float
    clearing_pass: bool
    clearing_margin: float
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        checks = [self.pricing_pass, self.deviation_pass, self.zero_sum_pass,
                  self.clearing_pass]
        if self.indifference_pass is not None:
            checks.append(self.indifference_pass)
        return all(checks)


def _indifference_stat(solution: EquilibriumSolution, n: int, seed: int,
                       n_v_bins: int = 4) -> float:
    """Max |mean profit difference| / SE between the upper and lower halves
    of the randomization (z > 0 vs z <= 0) within fixed value-quantile bins.
    Indifference over first-order realizations makes every difference zero
    in expectation."""
    profile, params, pricing = solution.profile, solution.params, solution.pricing
    edges = norm.ppf(np.linspace(0.0, 1.0, n_v_bins + 1))
    edges[0], edges[-1] = -np.inf, np.inf
    sums = np.zeros((n_v_bins, 2))
    sumsq = np.zeros((n_v_bins, 2))
    counts = np.zeros((n_v_bins, 2), dtype=np.int64)
    nb = (n + BATCH - 1) // BATCH
    ncells = 2 * n_v_bins
    for b in range(nb):
        m = min(BATCH, n - b * BATCH)
        # plain draws: the two-sample standard errors assume independence,
        # which antithetic pairing would break
        a = play_arrays(profile, params, pricing, seed, b, m, antithetic=False)
        pi = a["i1"] * (a["v"] - a["p1"]) + a["i2"] * (a["v"] - a["p2"])
        vbin = np.searchsorted(edges, a["v"], side="right") - 1
        np.clip(vbin, 0, n_v_bins - 1, out=vbin)
        cell = 2 * vbin + (a["z"] > 0.0)
        sums += np.bincount(cell, weights=pi, minlength=ncells).reshape(n_v_bins, 2)
        sumsq += np.bincount(cell, weights=pi * pi,
                             minlength=ncells).reshape(n_v_bins, 2)
        counts += np.bincount(cell, minlength=ncells).reshape(n_v_bins, 2)
    worst = 0.0
    for bi in range(n_v_bins):
        if counts[bi, 0] < 2 or counts[bi, 1] < 2:
            continue
        mu = sums[bi] / counts[bi]
        var = np.maximum(sumsq[bi] / counts[bi] - mu ** 2, 0.0)
        se = math.sqrt(var[0] / counts[bi, 0] + var[1] / counts[bi, 1])
        if se > 0.0:
            worst = max(worst, abs(mu[0] - mu[1]) / se)
    return worst


def verify_equilibrium(solution: EquilibriumSolution, n: int = 10 ** 6,
                       seed: int = 0, k_se: float = 4.0,
                       deviation_grid: Tuple[float, ...] = DEVIATION_STEPS,
                       sim: Optional[SimStats] = None) -> VerificationReport:
    """Run every check; margins are always reported, nothing throws on a
    failed check."""
    if not solution.found:
        raise KyleEqError("cannot verify a NoEquilibrium result")
    stats = sim if sim is not None else simulate_market(solution, n, seed)

    lam_true = {"lambda1": solution.pricing.lambda1,
                "lambda1plus": solution.pricing.lambda1plus,
                "lambda21": solution.pricing.lambda21,
                "lambda22": solution.pricing.lambda22}
    pr_margin = 0.0
    for k, true in lam_true.items():
        se = stats.lambda_se[k]
        if se > 0.0:
            pr_margin = max(pr_margin, abs(stats.lambda_hat[k] - true) / se)

    gains = deviation_gains(solution, steps=deviation_grid)
    dev_margin = max(gains.values())

    ind_pass: Optional[bool] = None
    ind_margin: Optional[float] = None
    z_resids = {}
    if solution.regime is Regime.MIXED:
        it1 = br.it_first_stage(solution.profile, solution.pricing,
                                solution.params, Regime.MIXED)
        z_resids = {"z1": abs(it1.z1_residual), "z2": abs(it1.z2_residual)}
        ind_margin = _indifference_stat(solution, stats.n, stats.seed)
        ind_pass = (ind_margin <= k_se
                    and all(r < INDIFFERENCE_ANALYTIC_TOL for r in z_resids.values()))

    report = expected_profits(solution)
    zs = abs(report.zero_sum_gap(solution.params))

    clearing = stats.max_clearing_violation

    return VerificationReport(
        n=stats.n, seed=stats.seed, k_se=k_se,
        pricing_pass=pr_margin <= k_se, pricing_margin=pr_margin,
        deviation_pass=dev_margin < DEVIATION_GAIN_TOL, deviation_margin=dev_margin,
        indifference_pass=ind_pass, indifference_margin=ind_margin,
        zero_sum_pass=zs < ZERO_SUM_TOL, zero_sum_margin=zs,
        clearing_pass=clearing < 1e-12, clearing_margin=clearing,
        details={"deviation_gains": gains, "indifference_residuals": z_resids,
                 "lambda_hat": stats.lambda_hat, "lambda_se": stats.lambda_se,
                 "martingale_p2": stats.series_mean["p2"],
                 "profit_mean": stats.profit_mean, "profit_se": stats.profit_se})
