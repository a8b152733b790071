"""Collects the one-line acceptance verdicts and prints them after the run."""

ACCEPTANCE_LINES = {}


def record(num: int, name: str, ok: bool, detail: str, seconds: float) -> None:
    verdict = "PASS" if ok else "FAIL"
    line = f"[{verdict}] criterion {num:2d} {name}: {detail} ({seconds:.2f} s)"
    ACCEPTANCE_LINES[num] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
