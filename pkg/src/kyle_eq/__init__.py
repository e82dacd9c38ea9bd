"""Equilibria of a three-period informed-trading market with anticipatory
fast traders under inventory aversion: solvers, closed-form limits, critical
thresholds, Monte-Carlo verification, and sweep tooling."""

from .params import (Config, GAMMA_INF, MarketParams, RawParams, Regime,
                     StrategyProfile, to_dimensionless, validate_population)
from .moments import FlowMoments, ShockBasis, flow_moments, flow_moments_quadratic
from .pricing import PricingRule, price_impact
from .best_response import (HftSignalGeometry, ItFirstStageResult, SocReport,
                            hft_first_stage, hft_geometry, hft_second_stage,
                            it_first_stage, it_second_stage, soc_check)
from .equilibrium import (EquilibriumSolution, assemble_residual, continue_path,
                          detect_regime, solve_no_hft, solve_point, solve_regime)
from .specialized import build_reduced_system, solve_specialized
from .limits import LimitSolution, limit_round_tripper, limit_small_it
from .thresholds import (ThresholdResult, critical_gamma,
                         critical_theta1plus_pure, existence_boundary,
                         inverse_rt_boundary, mixed_pure_boundary,
                         profit_thresholds)
from .profits import (ProfitReport, classify_role, deviation_gains,
                      expected_profits)
from .simulate import SimStats, simulate_market
from .verify import VerificationReport, verify_equilibrium

__version__ = "0.1.0"

__all__ = [
    "Config", "GAMMA_INF", "MarketParams", "RawParams", "Regime",
    "StrategyProfile", "to_dimensionless", "validate_population",
    "FlowMoments", "ShockBasis", "flow_moments", "flow_moments_quadratic",
    "PricingRule", "price_impact",
    "HftSignalGeometry", "ItFirstStageResult", "SocReport",
    "hft_first_stage", "hft_geometry", "hft_second_stage",
    "it_first_stage", "it_second_stage", "soc_check",
    "EquilibriumSolution", "assemble_residual", "continue_path",
    "detect_regime", "solve_no_hft", "solve_point", "solve_regime",
    "build_reduced_system", "solve_specialized",
    "LimitSolution", "limit_round_tripper", "limit_small_it",
    "ThresholdResult", "critical_gamma", "critical_theta1plus_pure",
    "existence_boundary", "inverse_rt_boundary", "mixed_pure_boundary",
    "profit_thresholds",
    "ProfitReport", "classify_role", "deviation_gains", "expected_profits",
    "SimStats", "simulate_market",
    "VerificationReport", "verify_equilibrium",
]
