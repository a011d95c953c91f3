import pytest

ACCEPTANCE = {}


def record(number, ok, detail=""):
    ACCEPTANCE[number] = (ok, detail)
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    return ok


@pytest.fixture
def acceptance():
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
