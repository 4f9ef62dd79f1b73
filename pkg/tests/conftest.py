"""Shared test helpers: fixture loading and the acceptance summary hook."""

import json
import pathlib

DATA = pathlib.Path(__file__).resolve().parent / "data"


def load_fixture(name):
    return json.loads((DATA / name).read_text())


# The acceptance tests record one (criterion number, passed, detail) entry
# each; the hook below prints them after the run so the per-criterion verdict
# survives pytest's output capture.
ACCEPTANCE_LINES = []


def record_criterion(number: int, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append((number, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(ACCEPTANCE_LINES):
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {verdict} - {detail}")
