import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA = []


@pytest.fixture
def criterion():
    """Record one acceptance line, then assert it."""

    def record(number: int, title: str, ok: bool, detail: str = ""):
        _CRITERIA.append((number, title, ok, detail))
        assert ok, f"criterion {number} ({title}) failed: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(_CRITERIA, key=lambda r: r[0]):
        mark = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{mark}] {number:2d}. {title}: {detail}")
