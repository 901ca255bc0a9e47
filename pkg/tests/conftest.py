from pathlib import Path

import numpy as np
import pytest

from netsift.network import build_network, read_matrix_csv

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def ten_stocks():
    return read_matrix_csv(DATA / "ten_stocks.csv")


def random_correlation(n, rng, factors=2):
    """Random full-rank correlation matrix from a noisy low-rank factor model."""
    b = rng.normal(size=(n, factors))
    cov = b @ b.T + np.diag(rng.uniform(0.2, 1.0, size=n))
    d = np.sqrt(np.diag(cov))
    corr = cov / np.outer(d, d)
    corr = (corr + corr.T) / 2
    np.fill_diagonal(corr, 1.0)
    return corr


def random_symmetric(n, rng, decimals=None):
    """Symmetric matrix with unit diagonal and off-diagonal entries in [-1, 1]."""
    a = rng.uniform(-1, 1, size=(n, n))
    if decimals is not None:
        a = np.round(a, decimals)
    a = np.triu(a, 1)
    a = a + a.T
    np.fill_diagonal(a, 1.0)
    return a


def labelled(matrix):
    n = matrix.shape[0]
    return build_network([f"v{k}" for k in range(n)], matrix)


# one line per acceptance criterion, echoed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
