import mpmath
import pytest


@pytest.fixture(autouse=True)
def _high_precision():
    # comparisons in tests happen outside library calls, so they need the working precision too
    with mpmath.mp.workdps(64):
        yield


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
