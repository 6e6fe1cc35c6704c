"""Shared pytest hooks: print the per-criterion verdict lines at the end."""

import time
from pathlib import Path

REPORT = Path(__file__).resolve().parent.parent / ".accept_cache" / "criteria_report.txt"

_session_start = 0.0


def pytest_sessionstart(session):
    global _session_start
    _session_start = time.time()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # only show verdicts produced (or re-confirmed) by this session
    if REPORT.exists() and REPORT.stat().st_mtime >= _session_start - 1.0:
        terminalreporter.section("acceptance criteria")
        for line in REPORT.read_text().splitlines():
            terminalreporter.write_line(line)
