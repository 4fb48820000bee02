import pytest

_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record ``(criterion, passed, detail)`` lines for the terminal summary."""
    lines = request.config.stash.setdefault(_KEY, [])

    def record(num: int, title: str, ok: bool, detail: str):
        lines.append((num, f"criterion {num:2d} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"))
        return ok
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
