from collections import defaultdict

import pytest
from hypothesis import settings

settings.register_profile("memrc", max_examples=40, deadline=None)
settings.load_profile("memrc")

_RESULTS = defaultdict(list)


@pytest.fixture
def acceptance():
    """Record ``(criterion, part, passed, detail)`` for the summary lines."""
    def record(criterion, part, passed, detail=""):
        _RESULTS[criterion].append((part, bool(passed), detail))
        return bool(passed)
    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(_RESULTS):
        parts = _RESULTS[criterion]
        status = "PASS" if all(ok for _, ok, _ in parts) else "FAIL"
        detail = "; ".join(f"{name} {'ok' if ok else 'FAILED'} ({info})" for name, ok, info in parts)
        terminalreporter.write_line(f"criterion {criterion}: {status} - {detail}")
