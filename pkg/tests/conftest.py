import numpy as np
import pytest

from localnonlocal import Partition1D, assemble_system, normalize

UNIT = Partition1D((-1.0, 0.0), (0.0, 1.0))


def box_system(n=64, nB=None, J=None, G=None):
    J = J or normalize("box", 1.0)
    G = G or normalize("box", 1.0)
    return assemble_system(UNIT, J, G, n, n if nB is None else nB)


def mixed_system(nA, nB):
    """Unit partition with unequal kernels: box J radius 1, tent G radius 0.5."""
    return assemble_system(UNIT, normalize("box", 1.0), normalize("tent", 0.5), nA, nB)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def sys64():
    return box_system(64)


@pytest.fixture(scope="session")
def sys6():
    return mixed_system(6, 6)


@pytest.fixture(scope="session")
def sys16():
    return mixed_system(16, 16)


@pytest.fixture(scope="session")
def gap_system():
    """J reaches B only through its left part."""
    return assemble_system(Partition1D((-1.0, 0.0), (0.4, 1.0)), normalize("box", 0.5),
                           normalize("tent", 0.3), 40, 30)


@pytest.fixture(scope="session")
def blind_system():
    """Hypothesis holds on the continuum but no pair of cell centers is within reach of J."""
    return assemble_system(Partition1D((-1.0, 0.0), (0.45, 1.0)), normalize("box", 0.5),
                           normalize("box", 0.5), 2, 2)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
