import sys

import pytest

from simulcomp.dataset import embedded_liver_dataset
from simulcomp.inference import joint_dunnett


@pytest.fixture(scope="session")
def liver():
    return embedded_liver_dataset()


@pytest.fixture(scope="session")
def joint(liver):
    """Joint analysis of the bundled data at seed 42, shared across modules."""
    return joint_dunnett(liver, seed=42)


def pytest_terminal_summary(terminalreporter):
    acc = sys.modules.get("test_acceptance")
    if acc is None or not acc.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(acc.RESULTS):
        terminalreporter.write_line(acc.RESULTS[number])
