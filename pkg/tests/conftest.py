from pathlib import Path

import pytest

from kappazero.contour import make_contour_config
from kappazero.tail import make_tail_config
from kappazero.zeros import derive_weights, load_zero_table

DATA = Path(__file__).parent / "data"

PAPER_BREAKPOINTS = [
    ("0", "0"), ("1/32", "0.489819"), ("1/8", "1.85802"),
    ("3/16", "2.04829"), ("3/8", "2.90189"), ("1/2", "pi"),
]


@pytest.fixture(scope="session")
def table200():
    return load_zero_table(DATA / "zeros200.txt")


@pytest.fixture(scope="session")
def weights200_n8(table200):
    return derive_weights(table200, 8, prec=256)


@pytest.fixture(scope="session")
def tailcfg200_n8(table200):
    return make_tail_config(table200, 8, 150)


@pytest.fixture(scope="session")
def paper_contour_small():
    """Paper contour constants on a coarse mesh, for fast unit tests."""
    return make_contour_config("0.132737", "0.0468918", "0.14", 64,
                               PAPER_BREAKPOINTS)
