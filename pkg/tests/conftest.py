import warnings

import numpy as np
import pytest

from overdet.pde import HopfViolationWarning


@pytest.fixture(autouse=True)
def _hopf_is_an_error():
    # every solve in the suite must keep the outer normal derivative negative
    with warnings.catch_warnings():
        warnings.simplefilter("error", HopfViolationWarning)
        yield


@pytest.fixture
def theta():
    return 2 * np.pi * np.arange(512) / 512


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
