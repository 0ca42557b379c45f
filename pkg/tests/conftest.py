import json
import os

import pytest

HERE = os.path.dirname(__file__)


@pytest.fixture(scope="session")
def golden():
    with open(os.path.join(HERE, "golden", "derived.json")) as fh:
        return json.load(fh)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
