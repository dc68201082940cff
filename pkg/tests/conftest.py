import math

import numpy as np
import pytest

from levelset import HomogeneousPolynomial, MomentVector
from levelset.polycore import enumerate_degree

from oracles import disk_moment


@pytest.fixture
def disk():
    return HomogeneousPolynomial(2, 2, {(2, 0): 1.0, (0, 2): 1.0})


@pytest.fixture
def quartic():
    return HomogeneousPolynomial(2, 4, {(4, 0): 1.0, (0, 4): 1.0})


@pytest.fixture
def asymmetric():
    return HomogeneousPolynomial(2, 2, {(2, 0): 2.0, (1, 1): 1.0, (0, 2): 1.0})


@pytest.fixture
def disk_moments():
    """Analytic unit-disk moments of orders 0 through 4."""
    values = {a: disk_moment(*a) for k in range(5) for a in enumerate_degree(2, k)}
    return MomentVector(2, values, {}, "analytic")


ACCEPTANCE_LOG = []


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LOG


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LOG:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LOG:
            terminalreporter.write_line(line)
