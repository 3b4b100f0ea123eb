import pytest

from helpers import ACCEPTANCE_LINES, SAT_SUITE, brute_sat
from ratproof.sat import CNF


@pytest.fixture(scope="session")
def sat_suite():
    return [(name, CNF(v, c), brute_sat(v, c)) for name, v, c in SAT_SUITE]


@pytest.fixture(scope="session")
def phi1():
    return CNF(2, ((1, 2), (-1,)))


@pytest.fixture(scope="session")
def phi2():
    return CNF(1, ((1,), (-1,)))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
