import pytest

# (criterion, passed, detail) lines filled in by test_acceptance.py
ACCEPTANCE_LINES: list[tuple[str, bool, str]] = []


@pytest.fixture
def acceptance():
    def record(criterion: str, passed: bool, detail: str) -> bool:
        line = f"{'PASS' if passed else 'FAIL'}  {criterion}: {detail}"
        ACCEPTANCE_LINES.append((criterion, passed, detail))
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in ACCEPTANCE_LINES:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {criterion}: {detail}")
