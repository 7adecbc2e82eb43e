import sys
from pathlib import Path

import pytest

# make the shared reference implementations importable from every test file
sys.path.insert(0, str(Path(__file__).parent))

from support import canonical_histories  # noqa: E402


@pytest.fixture(scope="session")
def instance_sets():
    """Canonical complete differentiated histories, cached per size."""
    cache = {}

    def get(ne, nd):
        if (ne, nd) not in cache:
            cache[(ne, nd)] = canonical_histories(ne, nd)
        return cache[(ne, nd)]

    return get


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # surface the acceptance suite's one-line-per-criterion verdicts even
    # when stdout capture swallowed the live prints
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "REPORT_LINES", None) if mod else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
