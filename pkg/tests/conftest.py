import numpy as np
import pytest

from synthprune.config import ExperimentConfig


@pytest.fixture
def base_config():
    """Mixed real/synthetic regime used throughout the concordance tests."""
    return ExperimentConfig(p=200, n=1000, m=1000, n_hat=1000, mu_norm=0.7, gamma=1.0,
                            epsilon=0.2, rho=0.0, phi=1.0, seed=7)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one "criterion N: PASS/FAIL ..." line per acceptance criterion, filled by test_acceptance
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
