import pytest

_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES] = []


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line for the criterion under test."""
    lines = request.config.stash[_LINES]

    def report(number, passed, detail, elapsed, limit):
        ok = bool(passed) and elapsed < limit
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}  [{elapsed:.2f}s / limit {limit:g}s]"
        lines.append((number, line))
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
