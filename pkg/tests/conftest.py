import pytest

_RESULTS = []


@pytest.fixture
def report():
    """Record one acceptance line; it is printed again in the terminal summary."""

    def _report(number, ok, detail):
        line = f"ACCEPTANCE {number:>2} {'PASS' if ok else 'FAIL'}: {detail}"
        print(line)
        _RESULTS.append(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if _RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_RESULTS, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
