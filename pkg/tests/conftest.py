import numpy as np
import pytest
from hypothesis import strategies as st

from boxball.lattice import Boundary, Configuration


@st.composite
def configurations(draw, kappas=(1, 2, 3, 5), max_len=40,
                   boundaries=(Boundary.FINITE_SUPPORT, Boundary.WINDOWED)):
    kappa = draw(st.sampled_from(kappas))
    length = draw(st.integers(min_value=0, max_value=max_len))
    cells = tuple(draw(st.lists(st.integers(0, kappa), min_size=length,
                                max_size=length)))
    boundary = draw(st.sampled_from(boundaries))
    if boundary is Boundary.WINDOWED:
        # windowed encodings must touch the anchor: n_min <= 1 and n_max >= 0
        if length == 0:
            offset = 1
        else:
            offset = draw(st.integers(min_value=1 - length, max_value=1))
    else:
        offset = draw(st.integers(min_value=-2 * max_len, max_value=2 * max_len))
    return Configuration(kappa=kappa, offset=offset, cells=cells, boundary=boundary)


def random_finite_config(rng: np.random.Generator, kappa: int, length: int,
                         offset=None) -> Configuration:
    cells = tuple(int(c) for c in rng.integers(0, kappa + 1, size=length))
    if offset is None:
        offset = int(rng.integers(-length - 5, length + 5)) if length else 1
    return Configuration(kappa=kappa, offset=offset, cells=cells,
                         boundary=Boundary.FINITE_SUPPORT)


@pytest.fixture
def rng():
    return np.random.default_rng(987654321)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # replay the per-criterion acceptance lines after capture ends
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
