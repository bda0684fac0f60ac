import pytest

from nsse.model import WavePacket
from nsse.quad import QuadSpec
from nsse.units import default_atom, to_internal

# one measurement line per shipping criterion, echoed after the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def units():
    return to_internal(default_atom(), a=1.0)


@pytest.fixture(scope="session")
def packet(units):
    return WavePacket(a=units.a)


@pytest.fixture(scope="session")
def quadspec():
    # the figure preset: order-24 Hermite, verified against order 40
    return QuadSpec().figures()


@pytest.fixture(scope="session")
def acceptance_report():
    def add(line: str) -> None:
        ACCEPTANCE_LINES.append(line)
        print(line)
    return add


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
