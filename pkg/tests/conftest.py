import numpy as np
import pytest


def E(i, j, n):
    """Matrix unit with a 1 at (i, j), zero-based."""
    m = np.zeros((n, n), dtype=complex)
    m[i, j] = 1
    return m


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def rand_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
