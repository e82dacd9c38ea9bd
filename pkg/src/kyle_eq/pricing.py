"""Dealers' weak-efficiency price-impact coefficients.

All four impacts come from Gaussian projections of the value innovation on
observed order flows; (lambda_21, lambda_22) use the two-regressor
correlation form.  Dimensionless throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import CollinearFlowError
from .moments import FlowMoments, flow_moments
from .params import MarketParams, StrategyProfile

RHO_SINGULAR_TOL = 1e-14


@dataclass(frozen=True)
class PricingRule:
    lambda1: float
    lambda1plus: float
    lambda21: float
    lambda22: float


def price_impact(profile: StrategyProfile, params: MarketParams,
                 moments: FlowMoments | None = None) -> PricingRule:
    """Price impacts implied by a profile under weak efficiency.

    lambda_1 has the one-regressor closed form; lambda_1plus projects v on
    y_1plus; (lambda_21, lambda_22) jointly project v on (y_1plus, y_2).
    """
    m = moments if moments is not None else flow_moments(profile, params)
    a1, tz = profile.a1, profile.theta_z
    lam1 = a1 / (a1 * a1 + tz + 1.0)
    lam1p = m.cov_v_y1plus / m.var_y1plus

    r12 = m.rho_y1plus_y2
    denom = 1.0 - r12 * r12
    if abs(denom) <= RHO_SINGULAR_TOL:
        raise CollinearFlowError(r12)
    sd1p = math.sqrt(m.var_y1plus)
    sd2 = math.sqrt(m.var_y2)
    lam21 = float((m.rho_v_y1plus - r12 * m.rho_v_y2) / (denom * sd1p))
    lam22 = float((m.rho_v_y2 - m.rho_v_y1plus * r12) / (denom * sd2))
    return PricingRule(lambda1=lam1, lambda1plus=lam1p, lambda21=lam21, lambda22=lam22)
