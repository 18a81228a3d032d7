import pytest

from qtmsim import load_machine
from qtmsim.cli import fixture_path

ACCEPTANCE_RESULTS = {}


@pytest.fixture
def machine():
    """Load a bundled fixture by file name."""
    return lambda name: load_machine(fixture_path(name))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {key:>2}: {detail}")
