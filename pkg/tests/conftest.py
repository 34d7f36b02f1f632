import pytest

from adaptive_sta import Scenario, simulate

# Lines recorded by the acceptance suite, echoed in the terminal summary.
CRITERIA: list[str] = []


@pytest.fixture(scope="session")
def fig2_full():
    """Ten seconds of the reference scenario, one row per step."""
    return simulate(Scenario(), decimation=1)


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA:
            terminalreporter.write_line(line)
