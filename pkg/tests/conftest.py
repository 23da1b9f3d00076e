import numpy as np
import pytest

from ngdbf.tanner import ParityCheckMatrix, bundled_code

SMALL_ALIST = """3 2
2 2
1 2 1
2 2
1 0
1 2
2 0
1 2
2 3
"""


@pytest.fixture
def small_h():
    """H = [[1,1,0],[0,1,1]]."""
    return ParityCheckMatrix.from_dense([[1, 1, 0], [0, 1, 1]])


@pytest.fixture(scope="session")
def peg():
    return bundled_code("peg1008")


@pytest.fixture(scope="session")
def toy96():
    return bundled_code("toy96")


@pytest.fixture(scope="session")
def hamming():
    return bundled_code("hamming7")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(mod.RESULTS):
        ok, detail = mod.RESULTS[num]
        tr.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    missing = sorted(set(range(1, 13)) - set(mod.RESULTS))
    if missing:
        tr.write_line(f"not run: {missing}")
