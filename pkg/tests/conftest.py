import pytest

from spectralcover.bnr import calibrate
from spectralcover.divisor import random_class_of_degree
from spectralcover.exactfield import RngStream
from spectralcover.families import build_family

_FAMILIES = {}

# acceptance criterion number -> report line, printed in the terminal summary
ACCEPTANCE = {}


def family_at(kind: str, p: int, seed: int = 1):
    key = (kind, p, seed)
    if key not in _FAMILIES:
        fam = build_family(kind, p, RngStream(seed, f"tests/{kind}/{p}"))
        samples = [random_class_of_degree(fam.X, RngStream(seed, f"tests/cal/{kind}/{p}/{i}"), fam.n_frak)
                   for i in range(3)]
        _FAMILIES[key] = (fam, calibrate(fam.x_side, samples))
    return _FAMILIES[key]


@pytest.fixture(scope="session")
def five():
    return family_at("p1-five", 101)


@pytest.fixture(scope="session")
def six():
    return family_at("p1-six", 101)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
