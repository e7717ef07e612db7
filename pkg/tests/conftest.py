import sys

import numpy as np
import pytest
from hypothesis import settings

from graphlimit import laws
from graphlimit.dynamics import make_rational_attraction, make_sin_squared

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")


def all_laws():
    return [
        laws.make_bernoulli_graphon(laws.ProductKernel()),
        laws.make_garlaschelli_const(0.5),
        laws.make_garlaschelli_const(0.2),
        laws.make_garlaschelli_xy(),
        laws.make_exponential(1.0),
        laws.make_exponential(2.0),
        laws.make_small_world(0.3),
        laws.make_delta(laws.ConstantKernel(0.7)),
        laws.make_delta(laws.make_garlaschelli_xy()),
    ]


@pytest.fixture
def xy():
    return laws.make_garlaschelli_xy()


@pytest.fixture
def sw():
    return laws.make_small_world(0.3)


@pytest.fixture
def D():
    return make_rational_attraction()


@pytest.fixture
def g():
    return make_sin_squared()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
