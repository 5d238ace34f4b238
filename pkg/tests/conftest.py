from fractions import Fraction

import pytest

from twotype_ef1.core import as_allocation
from twotype_ef1.oracle import gen_tightness_norm, gen_tightness_unnorm

EPS = Fraction(1, 1000)

ACCEPTANCE_LINES = []


def alloc(*bundles):
    """Allocation from 1-based item labels, e.g. ``alloc({1, 2}, {3}, ())``."""
    return as_allocation({g - 1 for g in b} for b in bundles)


@pytest.fixture
def eps():
    return EPS


@pytest.fixture
def t_unnorm():
    return gen_tightness_unnorm(EPS)


@pytest.fixture
def t_norm():
    return gen_tightness_norm(EPS)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
