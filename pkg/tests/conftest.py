"""Shared pytest plumbing.

The acceptance tests register one line per criterion; the terminal summary
prints them after the run so pass/fail status survives output capture.
"""

import pytest

_LINES = []


def _record(num, title, passed, detail=""):
    line = f"ACCEPTANCE {num} {title}: {'PASS' if passed else 'FAIL'}"
    if detail:
        line += f"  ({detail})"
    _LINES.append((num, line))


@pytest.fixture(scope="session")
def acceptance():
    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _LINES:
        return
    terminalreporter.section("acceptance")
    for _, line in sorted(_LINES):
        terminalreporter.write_line(line)
