"""Optimal linear coefficients for each agent given rivals and pricing.

The HFT side conditions on (own signal residual s_j, rivals' time-1plus flow
r_j = y_1plus - x_1j); the 2x2 conditioning covariance and the projection
pairs are written in closed form.  Infinite inventory aversion is handled by
the algebraic limit of each update, never by dividing by (lambda_22 + inf).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConcavityError, DegenerateConditioningError
from .params import GAMMA_INF, MarketParams, Regime, StrategyProfile
from .pricing import PricingRule

SOC_SLACK_FLOOR = 1e-10


@dataclass(frozen=True)
class HftSignalGeometry:
    """Conditioning covariance and projection coefficients for one HFT."""

    sigma1j_sq: float
    sigma2j_sq: float
    sigma12j: float
    eta21: float
    eta22: float
    mu21: float
    mu22: float
    # per-rival pairs, aligned with the expanded agent list (own index holds 0)
    theta21: np.ndarray
    theta22: np.ndarray
    delta21: float
    delta22: float
    eta: float   # first-stage projection of (v - p_1) on s_j
    mu: float    # first-stage projection of w (and of any rival s_k) on s_j


@dataclass(frozen=True)
class SocReport:
    """Signed slacks of the second-order conditions; all must exceed the
    floor for a candidate to be accepted."""

    soc1: tuple          # lambda_22 + Gamma_j, per HFT (inf allowed)
    soc2: tuple          # first-stage concavity, per HFT
    soc3: float          # lambda_22
    soc4: Optional[float]  # pure-regime IT concavity; None in mixed

    def ok(self, floor: float = SOC_SLACK_FLOOR) -> bool:
        vals = list(self.soc1) + list(self.soc2) + [self.soc3]
        if self.soc4 is not None:
            vals.append(self.soc4)
        return all(v > floor for v in vals)

    def min_slack(self) -> float:
        vals = [v for v in self.soc1 if not math.isinf(v)]
        vals += list(self.soc2) + [self.soc3]
        if self.soc4 is not None:
            vals.append(self.soc4)
        return min(vals)


def hft_geometry(profile: StrategyProfile, params: MarketParams, j: int) -> HftSignalGeometry:
    """Projection coefficients of (v-p_1), w, rival signals and u_1plus on
    (s_j, r_j), plus the first-stage scalars."""
    beta1, _, _, _, _ = profile.expand(params)
    beta1 = np.asarray(beta1)
    J = len(beta1)
    a1, tz = profile.a1, profile.theta_z
    V = a1 * a1 + tz
    D = V + 1.0
    var_w = V / D
    te, t1p = params.theta_eps, params.theta_1plus

    rival_sum = float(beta1.sum() - beta1[j])
    rival_sq = float((beta1 ** 2).sum() - beta1[j] ** 2)

    s1sq = var_w + te
    s2sq = var_w * rival_sum ** 2 + te * rival_sq + t1p
    s12 = var_w * rival_sum
    det = s1sq * s2sq - s12 * s12
    if det <= 0.0 or s1sq <= 0.0:
        raise DegenerateConditioningError(
            f"conditioning covariance not positive definite (det={det!r})")

    def solve2(c1: float, c2: float) -> tuple:
        # row-vector (c1, c2) @ Sigma^{-1}
        return ((c1 * s2sq - c2 * s12) / det, (c2 * s1sq - c1 * s12) / det)

    eta21, eta22 = solve2(a1 / D, (a1 / D) * rival_sum)
    mu21, mu22 = solve2(var_w, var_w * rival_sum)
    delta21, delta22 = solve2(0.0, t1p)
    theta21 = np.zeros(J)
    theta22 = np.zeros(J)
    for k in range(J):
        if k == j:
            continue
        t1, t2 = solve2(var_w, var_w * rival_sum + te * beta1[k])
        theta21[k] = t1
        theta22[k] = t2

    return HftSignalGeometry(
        sigma1j_sq=s1sq, sigma2j_sq=s2sq, sigma12j=s12,
        eta21=eta21, eta22=eta22, mu21=mu21, mu22=mu22,
        theta21=theta21, theta22=theta22,
        delta21=delta21, delta22=delta22,
        eta=(a1 / D) / s1sq, mu=var_w / s1sq,
    )


def _second_stage_numerators(profile: StrategyProfile, pricing: PricingRule,
                             params: MarketParams, j: int,
                             geom: Optional[HftSignalGeometry] = None):
    """Numerators (c_s, c_r) of the second-stage update, i.e. the
    coefficients of E[v - p_1 - lam21 y_1plus - lam22 (i_2 + sum_{k!=j} x_2k)]
    on (s_j, r_j) before dividing by 2(lambda_22 + Gamma_j).  These do not
    involve the agent's own aversion, so they are finite for Gamma = inf."""
    g = geom if geom is not None else hft_geometry(profile, params, j)
    beta1, b21, b22, b23, _ = profile.expand(params)
    lam21, lam22 = pricing.lambda21, pricing.lambda22
    one = 1.0 - lam22 * profile.a21

    cs = one * g.eta21 - lam22 * profile.alpha22 * g.mu21
    cr = one * g.eta22 - lam21 - lam22 * profile.alpha22 * g.mu22
    for k in range(len(beta1)):
        if k == j:
            continue
        # rival k's s_k-loading once (r_j, x_1j) are controlled for
        gk = b21[k] + b23[k] * beta1[k] - b22[k] * beta1[k]
        cs -= lam22 * gk * g.theta21[k]
        cr -= lam22 * (gk * g.theta22[k] + b22[k])
    return cs, cr


def hft_second_stage(profile: StrategyProfile, pricing: PricingRule,
                     params: MarketParams, j: int,
                     geom: Optional[HftSignalGeometry] = None):
    """Best-response (beta21j, beta22j, beta23j); (0, 0, -1) at infinite
    aversion by the position-clearing reduction."""
    _, _, b22, _, gammas = profile.expand(params)
    gam = gammas[j]
    if math.isinf(gam):
        return 0.0, 0.0, -1.0
    lam21, lam22 = pricing.lambda21, pricing.lambda22
    soc1 = lam22 + gam
    if soc1 <= 0.0:
        raise ConcavityError("SOC1", soc1)
    cs, cr = _second_stage_numerators(profile, pricing, params, j, geom)
    rival_b22 = sum(b22) - b22[j]
    b21_new = cs / (2.0 * soc1)
    b22_new = cr / (2.0 * soc1)
    b23_new = -(lam21 + 2.0 * gam + lam22 * rival_b22) / (2.0 * soc1)
    return b21_new, b22_new, b23_new


def soc2_slack(profile: StrategyProfile, pricing: PricingRule,
               params: MarketParams, j: int) -> float:
    """First-stage concavity margin; for Gamma = inf this is the limit
    lambda_1plus + lambda_22 - lambda_21 - lambda_22 * sum_{k!=j} beta_22k."""
    beta1, _, b22, b23, gammas = profile.expand(params)
    gam = gammas[j]
    lam1p, lam21, lam22 = pricing.lambda1plus, pricing.lambda21, pricing.lambda22
    rival_b22 = sum(b22) - b22[j]
    if math.isinf(gam):
        return lam1p + lam22 - lam21 - lam22 * rival_b22
    return lam1p + gam - (lam22 + gam) * b23[j] ** 2


def hft_first_stage(profile: StrategyProfile, pricing: PricingRule,
                    params: MarketParams, j: int,
                    geom: Optional[HftSignalGeometry] = None) -> float:
    """Best-response first-stage intensity beta_1j."""
    g = geom if geom is not None else hft_geometry(profile, params, j)
    beta1, b21, b22, b23, gammas = profile.expand(params)
    gam = gammas[j]
    lam1p, lam21, lam22 = pricing.lambda1plus, pricing.lambda21, pricing.lambda22
    rival_sum = sum(beta1) - beta1[j]

    slack = soc2_slack(profile, pricing, params, j)
    if slack <= 0.0:
        raise ConcavityError("SOC2", slack)

    if math.isinf(gam):
        cs, cr = _second_stage_numerators(profile, pricing, params, j, geom=g)
        num = g.eta - lam1p * g.mu * rival_sum - cs - cr * g.mu * rival_sum
        return num / (2.0 * slack)

    num = (g.eta - lam1p * g.mu * rival_sum
           + 2.0 * (lam22 + gam) * b23[j] * (b21[j] + b22[j] * g.mu * rival_sum))
    return num / (2.0 * slack)


def it_second_stage(pricing: PricingRule, profile: StrategyProfile,
                    params: MarketParams):
    """Best-response (a21, alpha22) for the informed trader's second order."""
    lam21, lam22 = pricing.lambda21, pricing.lambda22
    if lam22 <= 0.0:
        raise ConcavityError("SOC3", lam22)
    beta1, b21, b22, b23, _ = profile.expand(params)
    sum_b1 = sum(beta1)
    B = sum(b21[k] + b23[k] * beta1[k] + b22[k] * (sum_b1 - beta1[k])
            for k in range(len(beta1)))
    a21 = 1.0 / (2.0 * lam22)
    alpha22 = -(lam21 * sum_b1 + lam22 * B) / (2.0 * lam22)
    return a21, alpha22


@dataclass(frozen=True)
class ItFirstStageResult:
    regime: Regime
    z1_residual: Optional[float] = None   # mixed: quadratic self-impact residual
    z2_residual: Optional[float] = None   # mixed: linear indifference residual
    a1_new: Optional[float] = None        # pure: updated intensity
    soc4_slack: Optional[float] = None    # pure: concavity margin


def _g_coef(profile: StrategyProfile) -> float:
    D = profile.a1 ** 2 + profile.theta_z + 1.0
    return (profile.alpha22 - profile.a21 * profile.a1) / D


def it_first_stage(profile: StrategyProfile, pricing: PricingRule,
                   params: MarketParams, regime: Regime) -> ItFirstStageResult:
    """Mixed regime: the two indifference residuals that must vanish.
    Pure regime: the updated first-stage intensity plus the SOC margin."""
    lam1, lam22 = pricing.lambda1, pricing.lambda22
    G = _g_coef(profile)
    quad = lam1 - lam22 * G * G
    lin = 1.0 + 2.0 * lam22 * profile.a21 * G
    if regime is Regime.MIXED:
        return ItFirstStageResult(regime=regime, z1_residual=quad, z2_residual=lin)
    if quad <= 0.0:
        raise ConcavityError("SOC4", quad)
    return ItFirstStageResult(regime=regime, a1_new=lin / (2.0 * quad), soc4_slack=quad)


def soc_check(profile: StrategyProfile, pricing: PricingRule,
              params: MarketParams, regime: Regime) -> SocReport:
    """All applicable slacks, computed without raising."""
    _, _, _, _, gammas = profile.expand(params)
    lam22 = pricing.lambda22
    soc1 = tuple(math.inf if math.isinf(g) else lam22 + g for g in gammas)
    soc2 = tuple(soc2_slack(profile, pricing, params, j) for j in range(len(gammas)))
    soc4 = None
    if regime is Regime.PURE:
        G = _g_coef(profile)
        soc4 = pricing.lambda1 - lam22 * G * G
    return SocReport(soc1=soc1, soc2=soc2, soc3=lam22, soc4=soc4)
