import pytest

from kyle_eq import MarketParams, detect_regime


@pytest.fixture(scope="session")
def sol_small_it_j1():
    """One zero-aversion trader, active fast market: mixed regime."""
    return detect_regime(MarketParams(theta_1plus=1.0, theta_2=1.0,
                                      theta_eps=0.0, j1=1))


@pytest.fixture(scope="session")
def sol_rt_j1():
    """One infinitely averse trader, active fast market: pure regime."""
    return detect_regime(MarketParams(theta_1plus=1.0, theta_2=1.0,
                                      theta_eps=0.0, j2=1))


@pytest.fixture(scope="session")
def sol_small_it_j1_eps1():
    return detect_regime(MarketParams(theta_1plus=1.0, theta_2=1.0,
                                      theta_eps=1.0, j1=1))


@pytest.fixture(scope="session")
def sol_mixed_pop():
    """Two of each type, pure regime."""
    return detect_regime(MarketParams(theta_1plus=0.8, theta_2=1.0,
                                      theta_eps=0.5, j1=2, j2=2))


@pytest.fixture(scope="session")
def sol_no_hft():
    return detect_regime(MarketParams(theta_1plus=1.0, theta_2=1.0,
                                      theta_eps=0.0))
