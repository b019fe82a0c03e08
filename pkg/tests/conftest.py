import pytest

from hodgelocus import fixtures
from hodgelocus.linalg import set_default_tol


@pytest.fixture(autouse=True)
def _default_tol():
    set_default_tol(1e-9)
    yield
    set_default_tol(1e-9)


@pytest.fixture(scope="session")
def suite_orbits():
    return {name: fixtures.get(name) for name in fixtures.REP_NAMES}


@pytest.fixture(scope="session")
def suite_reps():
    return {name: fixtures.rep(name) for name in fixtures.REP_NAMES}


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if not test_acceptance.VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(test_acceptance.VERDICTS):
        terminalreporter.write_line(test_acceptance.VERDICTS[n])
