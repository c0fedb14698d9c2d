import pytest

_criteria: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record ``(name, passed, detail)`` for the acceptance summary, then assert."""
    def record(name, passed, detail=""):
        ok, prev = _criteria.get(name, (True, ""))
        _criteria[name] = (ok and bool(passed), "; ".join(x for x in (prev, detail) if x))
        assert passed, f"{name}: {detail}"
    return record


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria):
        ok, detail = _criteria[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
