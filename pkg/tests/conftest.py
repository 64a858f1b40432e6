from fractions import Fraction
from importlib import resources

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from mplcheck.maxplus import EPS, MaxPlusMatrix, parse_matrix

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def bundled(name: str) -> str:
    return (resources.files("mplcheck.data") / name).read_text()


@pytest.fixture
def A1():
    return MaxPlusMatrix([[2, 5], [3, 3]])


@pytest.fixture
def underground():
    return parse_matrix(bundled("underground.mat"))


small_rationals = st.builds(Fraction, st.integers(-12, 12), st.integers(1, 4))
scalars = st.one_of(st.just(EPS), small_rationals)


@st.composite
def matrices(draw, rows=None, cols=None, max_dim=4, eps_weight=0.3, regular=False):
    r = rows or draw(st.integers(1, max_dim))
    c = cols or draw(st.integers(1, max_dim))
    grid = []
    for _ in range(r):
        row = [EPS if draw(st.floats(0, 1)) < eps_weight else draw(small_rationals) for _ in range(c)]
        if regular and all(a is EPS for a in row):
            row[draw(st.integers(0, c - 1))] = draw(small_rationals)
        grid.append(row)
    return MaxPlusMatrix(grid)
