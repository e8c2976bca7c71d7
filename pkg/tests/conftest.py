import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one acceptance line; printed in the terminal summary."""

    def _report(criterion, ok, detail=""):
        ACCEPTANCE_LINES.append((criterion, ok, detail))
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, ok, detail in ACCEPTANCE_LINES:
        status = "PASS" if ok is True else ("FAIL" if ok is False else "INFO")
        terminalreporter.write_line(f"{status}  {criterion}: {detail}")
