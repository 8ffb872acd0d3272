import warnings

import numpy as np
import pytest

from wavecascade.cascade import StraightGuide
from wavecascade.config import example_config
from wavecascade.pipeline import SolverSettings, solve_structure

ACCEPTANCE_LINES = {}


def record(criterion, ok, detail):
    ACCEPTANCE_LINES[criterion] = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture(scope="session")
def example_elements():
    return example_config().elements


@pytest.fixture(scope="session")
def example_k15(example_elements):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return solve_structure(example_elements, 15.0, SolverSettings(N=10))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
