import numpy as np
import pytest
from hypothesis import strategies as st

from sofic.perm import Permutation


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@st.composite
def perms(draw, min_n=1, max_n=12, n=None):
    if n is None:
        n = draw(st.integers(min_n, max_n))
    return Permutation(draw(st.permutations(range(n))))


@st.composite
def perm_pairs(draw, min_n=1, max_n=12):
    n = draw(st.integers(min_n, max_n))
    return draw(perms(n=n)), draw(perms(n=n))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)
