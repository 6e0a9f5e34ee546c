import sys

import pytest

from dfvs.digraph import DiGraph
from figures import fig1


@pytest.fixture
def fig1_graph() -> DiGraph:
    return fig1()


def pytest_terminal_summary(terminalreporter):
    # one line per acceptance criterion, recorded by test_acceptance.py
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    RESULTS = mod.RESULTS
    terminalreporter.section("acceptance criteria")
    for num in sorted(RESULTS):
        ok, detail = RESULTS[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
