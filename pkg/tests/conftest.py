import os

import pytest

from epa_complexity.log import EventLog

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")
FIG2 = ["abcdfe", "acbdfe", "acbde", "abcde"]


def seq_log(seqs, **kw):
    """Log from strings or lists; one character (or item) per activity."""
    return EventLog.from_sequences([list(s) for s in seqs], **kw)


@pytest.fixture
def fig2_log():
    return seq_log(FIG2, source_name="fig2")


@pytest.fixture
def fixture_path():
    return lambda name: os.path.join(FIXTURES, name)


ACCEPTANCE = []  # (criterion, passed, detail), filled by test_acceptance


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {crit}: {detail}")
