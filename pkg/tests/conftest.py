import pytest

_ACCEPTANCE = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line; the summary prints them after the run."""

    def record(label, ok, detail=""):
        _ACCEPTANCE.append((label, bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}")
