"""Shared pytest wiring.

The acceptance tests register a one-line verdict per criterion; the hook
below prints them as a block after the run so the pass/fail ledger is
visible even when individual test output is captured.
"""

ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, name: str, passed: bool, detail: str) -> str:
    status = "PASS" if passed else "FAIL"
    line = f"criterion {number:02d} {name}: {status} — {detail}"
    ACCEPTANCE_LINES.append(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
