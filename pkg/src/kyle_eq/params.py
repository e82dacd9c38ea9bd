"""Market environment: raw parameters, dimensionless conversion, population tags.

Internally every computation runs in the dimensionless system (sigma_v =
sigma_1 = 1); raw scales are kept only so results can be re-dimensionalized
at the boundary.  Infinite inventory aversion is the float ``math.inf`` and
is always handled by explicit branching -- no formula ever evaluates an
expression like ``lambda_22 + inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence

from .errors import ParameterDomainError, UnsupportedConfigurationError

GAMMA_INF = math.inf


class Config(Enum):
    """Routing key for the specialized solvers."""

    NO_HFT = "no_hft"
    SINGLE_GENERAL_GAMMA = "single_general_gamma"
    ALL_SMALL_IT = "all_small_it"
    ALL_ROUND_TRIPPER = "all_round_tripper"
    MIXED_TYPES = "mixed_types"


@dataclass(frozen=True)
class RawParams:
    """Dimensional market environment.

    gammas holds one inventory-aversion coefficient per HFT; entries are
    finite nonnegative floats or ``math.inf``.
    """

    p0: float = 0.0
    sigma_v: float = 1.0
    sigma_1: float = 1.0
    sigma_1plus: float = 1.0
    sigma_2: float = 1.0
    sigma_eps: float = 0.0
    gammas: tuple = ()

    def __post_init__(self):
        for name in ("sigma_v", "sigma_1", "sigma_1plus", "sigma_2"):
            v = getattr(self, name)
            if not (v > 0.0) or not math.isfinite(v):
                raise ParameterDomainError(f"{name} must be strictly positive, got {v!r}")
        if not (self.sigma_eps >= 0.0):
            raise ParameterDomainError(f"sigma_eps must be nonnegative, got {self.sigma_eps!r}")
        object.__setattr__(self, "gammas", tuple(float(g) for g in self.gammas))
        for g in self.gammas:
            if math.isnan(g) or g < 0.0:
                raise ParameterDomainError(f"inventory aversion must be >= 0 or inf, got {g!r}")


@dataclass(frozen=True)
class MarketParams:
    """Dimensionless market environment.

    theta_1plus, theta_2, theta_eps are noise-size ratios relative to the
    time-1 noise variance.  The HFT population is either j1 traders with
    zero aversion plus j2 with infinite aversion, or a single trader with
    finite dimensionless aversion ``gamma``.
    """

    theta_1plus: float
    theta_2: float
    theta_eps: float
    j1: int = 0
    j2: int = 0
    gamma: Optional[float] = None
    scale: tuple = (1.0, 1.0, 0.0)  # (sigma_v, sigma_1, p0)

    def __post_init__(self):
        if not (self.theta_1plus > 0.0 and self.theta_2 > 0.0):
            raise ParameterDomainError(
                f"theta_1plus and theta_2 must be positive, got "
                f"{self.theta_1plus!r}, {self.theta_2!r}")
        if not (self.theta_eps >= 0.0):
            raise ParameterDomainError(f"theta_eps must be nonnegative, got {self.theta_eps!r}")
        if self.j1 < 0 or self.j2 < 0:
            raise ParameterDomainError("HFT counts must be nonnegative")
        if self.gamma is not None:
            if self.j1 or self.j2:
                raise UnsupportedConfigurationError(
                    "a finite general aversion cannot be mixed with typed populations")
            if math.isinf(self.gamma):
                raise UnsupportedConfigurationError(
                    "use j2=1 for an infinitely averse trader, not gamma=inf")
            if self.gamma < 0.0:
                raise ParameterDomainError("gamma must be nonnegative")

    # -- population ------------------------------------------------------

    @property
    def n_hft(self) -> int:
        return 1 if self.gamma is not None else self.j1 + self.j2

    def gamma_list(self) -> list:
        """Per-agent aversion list: j1 zeros, then j2 infinities, or [gamma]."""
        if self.gamma is not None:
            return [self.gamma]
        return [0.0] * self.j1 + [GAMMA_INF] * self.j2

    def config(self) -> Config:
        return validate_population(self)

    # -- scale handling ----------------------------------------------------

    def with_scale(self, sigma_v: float, sigma_1: float, p0: float = 0.0) -> "MarketParams":
        return replace(self, scale=(float(sigma_v), float(sigma_1), float(p0)))

    def to_raw(self) -> RawParams:
        """Re-dimensionalize using the stored scale anchors."""
        sigma_v, sigma_1, p0 = self.scale
        gammas: Sequence[float]
        if self.gamma is not None:
            gammas = (self.gamma * sigma_v / sigma_1,)
        else:
            gammas = (0.0,) * self.j1 + (GAMMA_INF,) * self.j2
        return RawParams(
            p0=p0,
            sigma_v=sigma_v,
            sigma_1=sigma_1,
            sigma_1plus=math.sqrt(self.theta_1plus) * sigma_1,
            sigma_2=math.sqrt(self.theta_2) * sigma_1,
            sigma_eps=math.sqrt(self.theta_eps) * sigma_1,
            gammas=tuple(gammas),
        )


def to_dimensionless(raw: RawParams) -> MarketParams:
    """Reduce a dimensional environment to the ratios the equilibrium
    depends on, partitioning the population by aversion type."""
    s1sq = raw.sigma_1 ** 2
    finite = [g for g in raw.gammas if not math.isinf(g)]
    n_inf = sum(1 for g in raw.gammas if math.isinf(g))
    nonzero_finite = [g for g in finite if g > 0.0]

    j1 = j2 = 0
    gamma = None
    if nonzero_finite:
        if len(raw.gammas) != 1:
            raise UnsupportedConfigurationError(
                "a finite nonzero aversion is only supported for a single-HFT market; "
                "use aversion 0 or inf for populations")
        gamma = nonzero_finite[0] / (raw.sigma_v / raw.sigma_1)
    else:
        j1 = len(finite)
        j2 = n_inf

    return MarketParams(
        theta_1plus=raw.sigma_1plus ** 2 / s1sq,
        theta_2=raw.sigma_2 ** 2 / s1sq,
        theta_eps=raw.sigma_eps ** 2 / s1sq,
        j1=j1,
        j2=j2,
        gamma=gamma,
        scale=(raw.sigma_v, raw.sigma_1, raw.p0),
    )


def validate_population(params: MarketParams) -> Config:
    """Classify the population into the configuration tag used to route
    specialized solvers."""
    if params.gamma is not None:
        return Config.SINGLE_GENERAL_GAMMA
    if params.j1 == 0 and params.j2 == 0:
        return Config.NO_HFT
    if params.j2 == 0:
        return Config.ALL_SMALL_IT
    if params.j1 == 0:
        return Config.ALL_ROUND_TRIPPER
    return Config.MIXED_TYPES


class Regime(Enum):
    PURE = "pure"
    MIXED = "mixed"
    NO_EQUILIBRIUM = "none"


@dataclass(frozen=True)
class StrategyProfile:
    """All linear strategy coefficients, per HFT type.

    a1 and a21 are the informed trader's dimensionless intensities; theta_z
    is her randomization intensity (0 in the pure regime).  beta11/beta21/
    beta22/beta23 belong to the zero-aversion type (or to the single
    general-aversion trader); beta12 is the infinitely averse type's first
    trade -- her second trade is the forced unwind -x_1j.
    """

    a1: float
    theta_z: float
    a21: float
    alpha22: float
    beta11: float = 0.0
    beta21: float = 0.0
    beta22: float = 0.0
    beta23: float = 0.0
    beta12: float = 0.0

    def expand(self, params: MarketParams):
        """Per-agent coefficient arrays (beta1, b21, b22, b23, gamma)."""
        beta1, b21, b22, b23, gam = [], [], [], [], []
        if params.gamma is not None:
            beta1.append(self.beta11)
            b21.append(self.beta21)
            b22.append(self.beta22)
            b23.append(self.beta23)
            gam.append(params.gamma)
        else:
            for _ in range(params.j1):
                beta1.append(self.beta11)
                b21.append(self.beta21)
                b22.append(self.beta22)
                b23.append(self.beta23)
                gam.append(0.0)
            for _ in range(params.j2):
                beta1.append(self.beta12)
                b21.append(0.0)
                b22.append(0.0)
                b23.append(-1.0)
                gam.append(GAMMA_INF)
        return beta1, b21, b22, b23, gam


NO_HFT_PROFILE_FIELDS = ("a1", "theta_z", "a21", "alpha22")
