"""Shared fixtures and the acceptance tally.

Frozen reference values live in _fixtures.json; they were produced by
independent oracles (tools/gen_fixtures.py) and must not be edited by
hand.  Acceptance tests append one line each to ACCEPTANCE_LINES, echoed
at the end of the run.
"""

import json
import os

import pytest

_HERE = os.path.dirname(__file__)

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def fx():
    with open(os.path.join(_HERE, "_fixtures.json")) as fh:
        return json.load(fh)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
