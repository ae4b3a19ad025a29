import pytest

# acceptance criteria register (label, passed, detail) here; printed at the end
ACCEPTANCE = []


@pytest.fixture
def record():
    def _record(label, passed, detail=""):
        ACCEPTANCE.append((label, bool(passed), detail))
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in ACCEPTANCE:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {label}: {detail}")
