"""Suite-wide fixtures and the acceptance summary printout."""

from __future__ import annotations

import pytest

from wildgrid.config import builtin_world, world_names

# criterion name -> human line, filled in by tests/test_acceptance.py
ACCEPTANCE_RESULTS: dict[str, str] = {}


@pytest.fixture(scope="session")
def default_world():
    return builtin_world("default")


@pytest.fixture(scope="session")
def all_worlds():
    return {name: builtin_world(name) for name in world_names()}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, line in ACCEPTANCE_RESULTS.items():
        terminalreporter.write_line(f"{name}: {line}")
