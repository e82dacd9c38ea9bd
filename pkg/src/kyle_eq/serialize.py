"""JSON-friendly dict conversion for solutions and reports (UTF-8, keys
sorted at dump time)."""

from __future__ import annotations

import json
import math
from typing import Optional

from .best_response import SocReport
from .equilibrium import EquilibriumSolution
from .params import MarketParams, Regime, StrategyProfile
from .pricing import PricingRule


def _clean(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _restore(x):
    if x == "inf":
        return math.inf
    if x == "-inf":
        return -math.inf
    return x


def params_to_dict(p: MarketParams) -> dict:
    return {"theta_1plus": p.theta_1plus, "theta_2": p.theta_2,
            "theta_eps": p.theta_eps, "j1": p.j1, "j2": p.j2,
            "gamma": p.gamma, "scale": list(p.scale)}


def params_from_dict(d: dict) -> MarketParams:
    return MarketParams(theta_1plus=d["theta_1plus"], theta_2=d["theta_2"],
                        theta_eps=d["theta_eps"], j1=d.get("j1", 0),
                        j2=d.get("j2", 0), gamma=d.get("gamma"),
                        scale=tuple(d.get("scale", (1.0, 1.0, 0.0))))


def solution_to_dict(sol: EquilibriumSolution) -> dict:
    d = {"params": params_to_dict(sol.params),
         "regime": sol.regime.value,
         "residual_norm": sol.residual_norm,
         "provenance": sol.provenance,
         "multiplicity_flag": sol.multiplicity_flag,
         "diagnostics": sol.diagnostics}
    if sol.profile is not None:
        p = sol.profile
        d["profile"] = {k: getattr(p, k) for k in
                        ("a1", "theta_z", "a21", "alpha22", "beta11", "beta21",
                         "beta22", "beta23", "beta12")}
    if sol.pricing is not None:
        pr = sol.pricing
        d["pricing"] = {k: getattr(pr, k) for k in
                        ("lambda1", "lambda1plus", "lambda21", "lambda22")}
    if sol.soc is not None:
        d["soc"] = {"soc1": [_clean(v) for v in sol.soc.soc1],
                    "soc2": list(sol.soc.soc2),
                    "soc3": sol.soc.soc3, "soc4": sol.soc.soc4}
    return d


def solution_from_dict(d: dict) -> EquilibriumSolution:
    params = params_from_dict(d["params"])
    regime = Regime(d["regime"])
    profile: Optional[StrategyProfile] = None
    pricing: Optional[PricingRule] = None
    soc: Optional[SocReport] = None
    if "profile" in d:
        profile = StrategyProfile(**d["profile"])
    if "pricing" in d:
        pricing = PricingRule(**d["pricing"])
    if "soc" in d:
        s = d["soc"]
        soc = SocReport(soc1=tuple(_restore(v) for v in s["soc1"]),
                        soc2=tuple(s["soc2"]), soc3=s["soc3"], soc4=s["soc4"])
    return EquilibriumSolution(params=params, regime=regime, profile=profile,
                               pricing=pricing, soc=soc,
                               residual_norm=d.get("residual_norm", float("nan")),
                               provenance=d.get("provenance", "general"),
                               multiplicity_flag=d.get("multiplicity_flag", False),
                               diagnostics=d.get("diagnostics", {}))


def dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_clean)
