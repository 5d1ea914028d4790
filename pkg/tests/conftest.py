"""Shared fixtures; collects acceptance-criterion lines for the summary."""

import pytest

_CRITERION_LINES: list[str] = []


@pytest.fixture(scope="session")
def criterion_report():
    """Append 'PASS/FAIL criterion N: detail' lines; printed at exit."""
    return _CRITERION_LINES


def pytest_terminal_summary(terminalreporter):
    if not _CRITERION_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in _CRITERION_LINES:
        terminalreporter.write_line(line)
