"""
Shared fixtures: the three-receiver instance, its cycle and a few small
instances used across the service tests.
"""
from fractions import Fraction

import pytest

from app.models.instance import Instance
from app.models.leakage import LeakagePattern
from app.models.utility import PrefixUtility
from app.services.constructors import optimal_private
from app.services.instance_lab import appendix_c_cycle, appendix_c_instance, externality_instance


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-size randomized suites; deselect with -m \"not slow\"")


@pytest.fixture
def instance_c():
    """lambda = 1/2, theta = (3/4, 1/2, 1/4), prefix weights (0, 1, 2, 3)."""
    return appendix_c_instance()


@pytest.fixture
def cycle_c():
    return appendix_c_cycle()


@pytest.fixture
def private_c(instance_c):
    """Optimal private scheme of the three-receiver instance as a binary scheme."""
    return optimal_private(instance_c).to_scheme()


@pytest.fixture
def two_receivers():
    return Instance(
        n=2,
        lam=Fraction(1, 2),
        theta=(Fraction(1, 2), Fraction(1, 4)),
        utility=PrefixUtility(n=2, weights=(0, 1, 2)),
    )


@pytest.fixture
def single_edge_c():
    """Receiver 1 observes receiver 2 and nothing else leaks."""
    return LeakagePattern(n=3, edges=((2, 1),))


@pytest.fixture
def externality():
    """n = 3, epsilon = 1/100, with its response mode."""
    return externality_instance(3, Fraction(1, 100))


@pytest.fixture
def instance_json(instance_c):
    return instance_c.model_dump(mode="json", by_alias=True)
