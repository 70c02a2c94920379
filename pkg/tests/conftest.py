import os
import sys
from pathlib import Path

sys.path.insert(0, os.path.dirname(__file__))

SAMPLES = Path(__file__).resolve().parent.parent / "samples"

# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
