"""Closed-form expected profits, unilateral-deviation values, and role
classification.  All values are dimensionless (units of sigma_v * sigma_1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Tuple

from .equilibrium import EquilibriumSolution, solve_no_hft
from .errors import KyleEqError
from .moments import ShockBasis
from .params import MarketParams, Regime, StrategyProfile
from .pricing import PricingRule, price_impact
from .moments import flow_moments


@dataclass(frozen=True)
class ProfitReport:
    it_profit: float
    hft_profit_small: float   # per-trader gross, zero-aversion type (0 if absent)
    hft_profit_rt: float      # per-trader gross, infinite-aversion type (0 if absent)
    noise_profit: float
    benchmark_it: float       # informed profit in the no-HFT two-period market

    def zero_sum_gap(self, params: MarketParams) -> float:
        j1, j2 = params.j1, params.j2
        if params.gamma is not None:
            j1, j2 = 1, 0
        return (self.it_profit + j1 * self.hft_profit_small
                + j2 * self.hft_profit_rt + self.noise_profit)


class ProfitEngine:
    """Exact Gaussian profit evaluation under a fixed pricing rule, with
    optional single-agent coefficient overrides (the deviation world)."""

    def __init__(self, profile: StrategyProfile, pricing: PricingRule,
                 params: MarketParams):
        self.profile = profile
        self.pricing = pricing
        self.params = params

    def _basis(self, overrides=None) -> ShockBasis:
        return ShockBasis(self.profile, self.params, overrides=overrides)

    def _prices(self, b: ShockBasis):
        pr = self.pricing
        p1 = pr.lambda1 * b.y1
        p1p = p1 + pr.lambda1plus * b.y1plus
        p2 = p1 + pr.lambda21 * b.y1plus + pr.lambda22 * b.y2
        return p1, p1p, p2

    def it_value(self, overrides=None) -> float:
        b = self._basis(overrides)
        p1, _, p2 = self._prices(b)
        return b.cov(b.i1, b.v - p1) + b.cov(b.i2, b.v - p2)

    def hft_value(self, j: int, overrides=None, gross: bool = False) -> float:
        b = self._basis(overrides)
        _, p1p, p2 = self._prices(b)
        val = b.cov(b.x1[j], b.v - p1p) + b.cov(b.x2[j], b.v - p2)
        if gross:
            return val
        gam = b.gammas[j]
        if math.isinf(gam):
            resid = b.var(b.x1[j] + b.x2[j])
            if resid > 1e-20:
                raise KyleEqError(
                    "unwinding trader with non-clearing position in deviation world")
            return val
        return val - gam * b.var(b.x1[j] + b.x2[j])

    def noise_value(self) -> float:
        b = self._basis()
        p1, p1p, p2 = self._prices(b)
        u1 = b._unit(b.iu1)
        u1p = b._unit(b.iu1p)
        u2 = b._unit(b.iu2)
        return (b.cov(u1, b.v - p1) + b.cov(u1p, b.v - p1p)
                + b.cov(u2, b.v - p2))


def benchmark_it_profit(theta_2: float) -> float:
    """Informed profit in the two-period market without anticipatory traders."""
    profile = solve_no_hft(theta_2)
    params = MarketParams(theta_1plus=1.0, theta_2=theta_2, theta_eps=0.0)
    pricing = price_impact(profile, params, flow_moments(profile, params))
    return ProfitEngine(profile, pricing, params).it_value()


def expected_profits(solution: EquilibriumSolution) -> ProfitReport:
    if not solution.found:
        raise KyleEqError("no profits for a NoEquilibrium result")
    params = solution.params
    eng = ProfitEngine(solution.profile, solution.pricing, params)
    it = eng.it_value()
    small = rt = 0.0
    if params.gamma is not None:
        small = eng.hft_value(0, gross=True)
    else:
        if params.j1 > 0:
            small = eng.hft_value(0, gross=True)
        if params.j2 > 0:
            rt = eng.hft_value(params.j1, gross=True)
    return ProfitReport(it_profit=it, hft_profit_small=small, hft_profit_rt=rt,
                        noise_profit=eng.noise_value(),
                        benchmark_it=benchmark_it_profit(params.theta_2))


DEVIATION_STEPS = (1e-3, 1e-2, 1e-1)


def deviation_gains(solution: EquilibriumSolution,
                    steps: Tuple[float, ...] = DEVIATION_STEPS) -> Dict[str, float]:
    """Max closed-form objective gain from perturbing each strategy
    coefficient of each agent by +/- the grid steps, holding rivals and the
    pricing rule fixed.  All gains are <= ~0 at an equilibrium."""
    params = solution.params
    eng = ProfitEngine(solution.profile, solution.pricing, params)
    prof = solution.profile
    gains: Dict[str, float] = {}

    base_it = eng.it_value()
    it_coeffs = {"a1": prof.a1, "a21": prof.a21, "alpha22": prof.alpha22}
    if solution.regime is Regime.MIXED:
        it_coeffs["theta_z"] = prof.theta_z
    for name, val in it_coeffs.items():
        worst = -math.inf
        for d in steps:
            for sgn in (+1.0, -1.0):
                trial = val + sgn * d
                if name == "theta_z" and trial < 0.0:
                    continue
                worst = max(worst, eng.it_value({name: trial}) - base_it)
        gains[f"it.{name}"] = worst

    _, _, _, _, gammas = prof.expand(params)
    reps = []
    if params.gamma is not None or params.j1 > 0:
        reps.append(0)
    if params.gamma is None and params.j2 > 0:
        reps.append(params.j1)
    for j in reps:
        gam = gammas[j]
        beta1, b21, b22, b23, _ = prof.expand(params)
        base = eng.hft_value(j)
        coeffs = {("beta1", j): beta1[j]}
        if not math.isinf(gam):
            coeffs.update({("b21", j): b21[j], ("b22", j): b22[j],
                           ("b23", j): b23[j]})
        label = "rt" if math.isinf(gam) else "hft"
        for key, val in coeffs.items():
            worst = -math.inf
            for d in steps:
                for sgn in (+1.0, -1.0):
                    worst = max(worst, eng.hft_value(j, {key: val + sgn * d}) - base)
            gains[f"{label}.{key[0]}"] = worst
    return gains


def classify_role(solution: EquilibriumSolution, hft_type: str,
                  tol: float = 1e-9) -> str:
    """Sign pattern of (first-trade direction, second-trade direction)
    relative to the informed order:
    (+,+) small informed; (+,-) round trip; (-,+) inverse round trip."""
    if not solution.found:
        raise KyleEqError("no role for a NoEquilibrium result")
    prof = solution.profile
    params = solution.params
    beta1, b21, b22, b23, gammas = prof.expand(params)
    if hft_type == "small":
        j = 0
        if params.gamma is None and params.j1 == 0:
            raise KyleEqError("no zero-aversion trader in this configuration")
    elif hft_type == "rt":
        if params.gamma is not None or params.j2 == 0:
            raise KyleEqError("no infinitely averse trader in this configuration")
        j = params.j1
    else:
        raise KyleEqError(f"unknown hft_type {hft_type!r}")
    first = beta1[j]
    rival_sum = sum(beta1) - beta1[j]
    second = b21[j] + b22[j] * rival_sum + b23[j] * beta1[j]
    if abs(first) < tol or abs(second) < tol:
        return "boundary"
    if first > 0 and second > 0:
        return "small_it"
    if first > 0 and second < 0:
        return "round_tripper"
    if first < 0 and second > 0:
        return "inverse_round_tripper"
    return "unclassified"
