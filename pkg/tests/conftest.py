import numpy as np
import pytest

from syndromehash.matrix import LdpcCode, SparseParityCheck
from syndromehash.peg import PegConfig, peg_construct


@pytest.fixture(scope="session")
def code3():
    """n=9600, k=1000, dv=3 lower-triangular PEG code."""
    return peg_construct(PegConfig(9600, 8600, 3, lower_triangular=True, seed=1))


@pytest.fixture(scope="session")
def code5():
    return peg_construct(PegConfig(9600, 8600, 5, lower_triangular=True, seed=1))


@pytest.fixture(scope="session")
def small_code():
    """n=240, k=24 triangular code: quick enough for exhaustive-ish loops."""
    return peg_construct(PegConfig(240, 216, 3, lower_triangular=True, seed=5))


@pytest.fixture(scope="session")
def medium_code():
    return peg_construct(PegConfig(960, 860, 3, lower_triangular=True, seed=2))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_sparse(rng, n, r, density=0.3):
    """Random matrix with at least one entry per row (for structural tests)."""
    dense = (rng.random((r, n)) < density).astype(np.uint8)
    for j in range(r):
        if not dense[j].any():
            dense[j, rng.integers(n)] = 1
    return SparseParityCheck.from_dense(dense)


def random_triangular(rng, n, r, density=0.3):
    k = n - r
    dense = (rng.random((r, n)) < density).astype(np.uint8)
    for j in range(r):
        dense[j, k + j] = 1
        dense[j, k + j + 1:] = 0
    return LdpcCode(SparseParityCheck.from_dense(dense), triangular=True)


_ACCEPTANCE_LINES = []


@pytest.fixture
def record_criterion():
    """Log one pass/fail line for an acceptance criterion and return the verdict."""

    def record(number, title, passed, detail):
        line = f"criterion {number} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
        _ACCEPTANCE_LINES.append((number, line))
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE_LINES, key=lambda x: str(x[0])):
            terminalreporter.write_line(line)
