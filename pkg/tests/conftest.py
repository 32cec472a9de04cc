import pytest

from symentropy import DigitSetSchedule, SubshiftSpec


@pytest.fixture
def full2():
    return SubshiftSpec.full(2)


@pytest.fixture
def golden():
    return SubshiftSpec.golden_mean()


@pytest.fixture
def half_free():
    """Even positions free, odd positions pinned to 0."""
    return DigitSetSchedule.periodic(2, [{0, 1}, {0}])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
