import numpy as np
import pytest
import scipy.linalg as sla


def hopping_chain(n):
    """Reference tridiagonal hopping matrix, built independently of the package."""
    return -0.5 * (np.eye(n, k=1) + np.eye(n, k=-1))


def expm_evolve(h, psi, t):
    return sla.expm(-1j * np.asarray(h) * t) @ psi


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS):
        title, passed, detail = RESULTS[key]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {key}. {title}: {detail}")
