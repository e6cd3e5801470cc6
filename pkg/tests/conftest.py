import pytest

# (criterion number, passed, detail) recorded by the acceptance tests
CRITERIA: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, detail = CRITERIA[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}")


@pytest.fixture
def record():
    def _record(n: int, ok: bool, detail: str) -> None:
        CRITERIA[n] = (bool(ok), detail)
        print(f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}")
        assert ok, detail

    return _record
