"""Shared fixtures: acceptance-line reporting.

Each acceptance test registers exactly one summary line (criterion number,
verdict, measured numbers); the lines are replayed in a dedicated block at
the end of the pytest run so they are visible regardless of capture mode.
"""

import pytest

_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_line():
    """Record (and immediately print) one acceptance summary line."""

    def _record(line):
        _ACCEPTANCE_LINES.append(line)
        print(line)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
