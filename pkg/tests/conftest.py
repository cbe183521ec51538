import re
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "data"


@pytest.fixture
def iris_path():
    return DATA / "iris.dat"


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when != "call" or "test_acceptance" not in rep.nodeid:
                continue
            m = re.search(r"test_c(\d+)_(\w+)", rep.nodeid)
            if m:
                label = rep.nodeid.split("::")[-1]
                lines.append((int(m.group(1)), label, outcome.upper()))
    if lines:
        terminalreporter.section("acceptance criteria")
        for num, label, outcome in sorted(lines):
            terminalreporter.write_line(f"criterion {num}: {'PASS' if outcome == 'PASSED' else 'FAIL'}  {label}")
