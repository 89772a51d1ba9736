import sys
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"

# filled by test_acceptance.py, printed once at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])


sys.path.insert(0, str(Path(__file__).parent))
