import pytest

_CRITERIA = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line; call as ``criterion(ok, detail)``."""

    def check(ok, detail=""):
        _CRITERIA.append((request.node.name, bool(ok), detail))
        assert ok, detail

    return check


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _CRITERIA:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
