import pytest

from sturmdos.bands import BandTree, build_band_tree
from sturmdos.cf import Frequency

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict = {}


@pytest.fixture(scope="session")
def fib():
    return Frequency.fibonacci()


@pytest.fixture(scope="session")
def silver():
    return Frequency.constant(2)


@pytest.fixture(scope="session")
def fib_tree(fib):
    return build_band_tree(fib, 24, 9)


@pytest.fixture(scope="session")
def silver_tree(silver):
    return build_band_tree(silver, 24, 6)


@pytest.fixture(scope="session")
def lazy_fib_tree(fib):
    return BandTree(fib, 24)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
