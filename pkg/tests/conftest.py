import csv
import json
from pathlib import Path

import pytest

GOLDEN = Path(__file__).parent / "golden"
_ACCEPTANCE = []


def load_golden(name):
    with open(GOLDEN / name, newline="") as fh:
        return list(csv.DictReader(fh))


def load_golden_json(name):
    return json.loads((GOLDEN / name).read_text())


def decimals(cell: str) -> int:
    return len(cell.split(".")[1]) if "." in cell else 0


@pytest.fixture
def acceptance_log():
    def record(number, passed, detail):
        _ACCEPTANCE.append((number, passed, detail))
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(_ACCEPTANCE, key=lambda t: t[0]):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {detail}")
