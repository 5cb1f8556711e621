import pytest

ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def acceptance_log(request):
    """Criterion number -> list of (part, passed, note); printed at the end."""
    return request.config.stash.setdefault(ACCEPTANCE, {})


def pytest_terminal_summary(terminalreporter, config):
    log = config.stash.get(ACCEPTANCE, None)
    if not log:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for crit in sorted(log, key=int):
        parts = log[crit]
        ok = all(p[1] for p in parts)
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {crit}")
        for part, passed, note in parts:
            terminalreporter.write_line(f"    [{'PASS' if passed else 'FAIL'}] {part}: {note}")
