"""Exception hierarchy for the kyle_eq package."""


class KyleEqError(Exception):
    """Base class for all kyle_eq errors."""


class ParameterDomainError(KyleEqError):
    """A raw or dimensionless parameter violates its domain (e.g. sigma_1 <= 0)."""


class UnsupportedConfigurationError(KyleEqError):
    """The HFT population is outside the supported configurations
    (e.g. a finite general aversion mixed with typed populations, or
    more than one heterogeneous finite aversion)."""


class DegenerateMomentError(KyleEqError):
    """A correlation was requested from a degenerate (zero-variance) flow."""


class CollinearFlowError(KyleEqError):
    """The (y_1+, y_2) flows are numerically collinear; the bivariate
    price-impact projection is singular."""

    def __init__(self, rho: float):
        super().__init__(f"collinear flows: |1 - rho^2| too small (rho={rho!r})")
        self.rho = rho


class ConcavityError(KyleEqError):
    """A second-order condition fails at the point where a best response
    was requested; carries the signed slack."""

    def __init__(self, which: str, slack: float):
        super().__init__(f"{which} violated (slack={slack:.3e})")
        self.which = which
        self.slack = slack


class DegenerateConditioningError(KyleEqError):
    """An HFT's 2x2 conditioning covariance is not positive definite."""


class RegimeMismatchError(KyleEqError):
    """A closed-form limit was requested for a regime in which it does not
    exist (e.g. mixed limit with a non-positive randomization intensity)."""


class LimitUnresolvedError(KyleEqError):
    """A path-extrapolated limit failed to converge."""
