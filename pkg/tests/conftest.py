import pytest

from penning_ising.crystal import TrapConfig, solve_crystal
from penning_ising.modes import normal_modes

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def trap():
    return TrapConfig()


@pytest.fixture(scope="session")
def crystal19(trap):
    return solve_crystal(19, trap)


@pytest.fixture(scope="session")
def crystal127(trap):
    return solve_crystal(127, trap)


@pytest.fixture(scope="session")
def spectrum19(crystal19):
    return normal_modes(crystal19)


@pytest.fixture(scope="session")
def spectrum127(crystal127):
    return normal_modes(crystal127)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
