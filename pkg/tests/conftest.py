import os

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.register_profile("thorough", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


_LINES = pytest.StashKey[list]()


@pytest.fixture
def acceptance_line(request):
    """Record one 'criterion N: PASS|FAIL|INFO ...' line; all of them are echoed at the end of the run."""
    lines = request.config.stash.setdefault(_LINES, [])

    def record(label: str, ok, detail: str) -> None:
        status = "INFO" if ok is None else ("PASS" if ok else "FAIL")
        line = f"{label}: {status}  {detail}"
        lines.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
