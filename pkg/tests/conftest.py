import pathlib

import numpy as np
import pytest

from matrix_partition.labels import Category, Label
from matrix_partition.obstructions import nontrivial_targets, odd_cycle_empty
from matrix_partition.partition import EDGE_SIGNATURE
from matrix_partition.structures import LStructure

ROOT = pathlib.Path(__file__).parent.parent
FIXTURES = ROOT / "fixtures"


def graph(category, rows):
    return LStructure.from_dense(EDGE_SIGNATURE, category, {"E": np.array(rows, dtype=np.int8)})


def random_structure(rng, signature, category, n):
    codes = np.array(sorted(category.labels), dtype=np.int8)
    arrays = {s.name: rng.choice(codes, size=(n,) * s.arity) for s in signature}
    if not arrays:
        return LStructure(signature, category, n, {})
    return LStructure.from_dense(signature, category, arrays)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def k2():
    return graph(Category.CAT01, [[0, 1], [1, 0]])


@pytest.fixture
def empty_cycle():
    return odd_cycle_empty


@pytest.fixture(scope="session")
def star_targets():
    """Non-trivial ⋆-graphs with at most two elements, up to isomorphism."""
    return nontrivial_targets(EDGE_SIGNATURE, Category.CATSTAR, 2)


@pytest.fixture
def star_loop():
    return graph(Category.CATSTAR, [[Label.STAR]])
