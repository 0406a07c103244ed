import numpy as np
import pytest

from conebalance import CurveSpec, analyze, balance


@pytest.fixture(scope="session")
def ellipse_spec():
    return CurveSpec("perturbed_ellipse", {"eps": 0.05, "k": 3}, n=512)


@pytest.fixture(scope="session")
def ellipse_analysis(ellipse_spec):
    return analyze(ellipse_spec)


@pytest.fixture(scope="session")
def ellipse_balanced(ellipse_analysis):
    return balance(ellipse_analysis)


@pytest.fixture(scope="session")
def circle_analysis():
    return analyze(CurveSpec("circular_cone", n=256))


ACCEPTANCE_LINES = pytest.StashKey[list]()


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_LINES, None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
