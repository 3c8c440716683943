import pytest

from conftest import graph, random_structure

from matrix_partition.cores import core_of, core_with_retraction, hom_equivalent, is_core
from matrix_partition.errors import CapExceeded
from matrix_partition.labels import Category
from matrix_partition.solver import hom_exists
from matrix_partition.structures import Signature, induced_substructure


def test_k2_is_a_core(k2):
    assert is_core(k2)
    assert core_of(k2) == k2


def test_two_zero_loops_collapse():
    S = graph(Category.CAT01, [[0, 0], [0, 0]])
    core, kept = core_with_retraction(S)
    assert kept == (0,)
    assert core == graph(Category.CAT01, [[0]])


def test_single_element_is_core():
    assert is_core(graph(Category.CATSTAR, [[2]]))


def test_least_element_set_is_kept():
    # 0 and 2 are twins with 1-loops; greedy retraction would avoid 0 first
    S = graph(Category.CATSTAR, [[1, 0, 1], [0, 0, 0], [1, 0, 1]])
    assert not is_core(S)
    core, kept = core_with_retraction(S)
    assert kept == (0, 1)
    assert core == graph(Category.CATSTAR, [[1, 0], [0, 0]])


def test_directed_empty_cycles_are_cores(empty_cycle, k2):
    for n in (3, 4, 5):
        assert is_core(empty_cycle(n))
    assert not hom_equivalent(empty_cycle(4), k2)


def test_core_properties(rng):
    sig = Signature.parse("E/2 U/1")
    for _ in range(25):
        S = random_structure(rng, sig, Category.CATSTAR, 4)
        core, kept = core_with_retraction(S)
        assert is_core(core)
        assert core == induced_substructure(S, kept)
        assert hom_exists(S, core) and hom_exists(core, S)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_core_of_core_is_itself(rng, n):
    S = random_structure(rng, Signature.parse("E/2"), Category.CATEMPTY, n)
    core = core_of(S)
    assert core_of(core) == core


def test_core_respects_map_cap(empty_cycle):
    with pytest.raises(CapExceeded):
        core_with_retraction(empty_cycle(5), max_maps=5**5 - 1)
    assert core_of(empty_cycle(5), max_maps=5**5) == empty_cycle(5)
