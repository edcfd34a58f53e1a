import pytest

# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE = {}


def record(n, ok, detail=""):
    prev_ok, prev = ACCEPTANCE.get(n, (True, ""))
    ACCEPTANCE[n] = (prev_ok and ok, "; ".join(x for x in (prev, detail) if x))


@pytest.fixture
def criterion():
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
