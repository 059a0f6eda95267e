import sys

import pytest

from tplq.datasets import load_example


@pytest.fixture
def l1():
    return load_example("l1")


@pytest.fixture
def claims():
    return load_example("toy_claims")


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.summary_lines():
        terminalreporter.write_line(line)
