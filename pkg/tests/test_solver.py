import numpy as np
import pytest

from conftest import graph, random_structure

from matrix_partition.errors import CapExceeded, SearchTimeout, ValidationError
from matrix_partition.labels import Category, Label
from matrix_partition.solver import (
    HomSolver,
    SolverOptions,
    check_maps,
    enumerate_homomorphisms,
    find_homomorphism,
    first_map_bruteforce,
    hom_exists,
    is_homomorphism,
)
from matrix_partition.structures import HomMap, LStructure, Signature, empty_structure, induced_substructure


def test_k2_to_k2(k2):
    h = find_homomorphism(k2, k2)
    assert h.image == (0, 1)
    assert is_homomorphism(k2, k2, h)
    assert [m.image for m in enumerate_homomorphisms(k2, k2)] == [(0, 1), (1, 0)]


def test_empty_cycles_into_k2(k2, empty_cycle):
    assert find_homomorphism(empty_cycle(3), k2) is None
    assert find_homomorphism(empty_cycle(4), k2).image == (0, 1, 0, 1)
    assert find_homomorphism(empty_cycle(5), k2) is None


def test_star_absorbs():
    G = graph(Category.CAT01, [[1, 0], [1, 1]])
    H = graph(Category.CATSTAR, [[Label.STAR]])
    assert find_homomorphism(G, H).image == (0, 0)
    assert find_homomorphism(H, G) is None


def test_loops_are_constrained():
    # a 0-loop cannot go to a 1-loop in the 01 order
    G = graph(Category.CAT01, [[0]])
    H = graph(Category.CAT01, [[1]])
    assert not hom_exists(G, H)
    assert not is_homomorphism(G, H, HomMap(1, 1, (0,)))


def test_empty_domains(k2):
    empty = empty_structure(k2.signature, Category.CAT01)
    assert find_homomorphism(empty, k2).image == ()
    assert find_homomorphism(k2, empty) is None
    assert hom_exists(empty, empty)


def test_pins_and_initial_domains(k2):
    options = SolverOptions(pinned=((0, 1),))
    assert find_homomorphism(k2, k2, options).image == (1, 0)
    domains = np.array([[True, False], [True, False]])
    assert HomSolver(k2, k2, initial_domains=domains).find() is None
    with pytest.raises(ValidationError):
        HomSolver(k2, k2, initial_domains=np.ones((3, 2), dtype=bool))
    with pytest.raises(ValidationError):
        SolverOptions(order="random")


def test_brute_force_cap(k2, empty_cycle):
    with pytest.raises(CapExceeded):
        first_map_bruteforce(empty_cycle(5), k2, max_maps=16)
    assert first_map_bruteforce(empty_cycle(4), k2, max_maps=16).image == (0, 1, 0, 1)


def test_timeout_raises(k2):
    # the deadline is checked on the first node
    with pytest.raises(SearchTimeout):
        find_homomorphism(k2, k2, SolverOptions(timeout_secs=0))


def test_check_maps_vectorized(k2):
    maps = np.array([[0, 0], [0, 1], [1, 0], [1, 1]])
    assert check_maps(k2, k2, maps, Category.CAT01).tolist() == [False, True, True, False]


@pytest.mark.parametrize("cat", [Category.CAT01, Category.CATSTAR, Category.CATEMPTY], ids=lambda c: c.token)
def test_solver_agrees_with_brute_force(rng, cat):
    sig = Signature.parse("E/2 U/1 R/3")
    for _ in range(40):
        G = random_structure(rng, sig, cat, int(rng.integers(1, 4)))
        H = random_structure(rng, sig, Category.CATSTAR, int(rng.integers(1, 3)))
        if cat is Category.CATEMPTY:
            H = H.lift(Category.CATEMPTY)
        expected = first_map_bruteforce(G, H)
        for options in (SolverOptions(), SolverOptions(order="static", lookahead=False)):
            found = find_homomorphism(G, H, options)
            assert (found is None) == (expected is None)
            if found is not None:
                assert is_homomorphism(G, H, found)
        static = list(enumerate_homomorphisms(G, H))
        if expected is not None:
            assert static[0] == expected
        assert len(static) == len(set(static))


def test_parallel_matches_sequential(k2, empty_cycle):
    G = empty_cycle(4)
    sequential = find_homomorphism(G, k2, SolverOptions(order="static"))
    parallel = find_homomorphism(G, k2, SolverOptions(order="static", jobs=2))
    assert parallel == sequential


def pullback(rng, H, n, category):
    """Structure on n elements that maps into H along a random map."""
    p = rng.integers(H.domain_size, size=n)
    arrays = {}
    for symbol in H.signature:
        labels = H.dense(symbol.name)[np.ix_(*([p] * symbol.arity))]
        if category is Category.CAT01:
            labels = np.where(labels == Label.STAR, rng.integers(0, 2, size=labels.shape), labels)
        arrays[symbol.name] = labels.astype(np.int8)
    return LStructure.from_dense(H.signature, category, arrays), HomMap(n, H.domain_size, tuple(p))


def test_witnesses_compose(rng):
    sig = Signature.parse("E/2 U/1")
    for _ in range(30):
        K = random_structure(rng, sig, Category.CATSTAR, int(rng.integers(1, 3)))
        H, _ = pullback(rng, K, 3, Category.CATSTAR)
        G, _ = pullback(rng, H, 4, Category.CAT01)
        f = find_homomorphism(G, H)
        g = find_homomorphism(H, K)
        assert f is not None and g is not None
        assert is_homomorphism(G, K, f.compose(g))


def test_substructures_keep_homomorphisms(rng):
    sig = Signature.parse("E/2 U/1")
    for _ in range(30):
        H = random_structure(rng, sig, Category.CATSTAR, 2)
        G, p = pullback(rng, H, 5, Category.CAT01)
        assert is_homomorphism(G, H, p)
        X = sorted(set(rng.integers(5, size=3).tolist()))
        sub = induced_substructure(G, X)
        assert hom_exists(sub, H)
        assert is_homomorphism(sub, H, HomMap(len(X), 2, tuple(p(x) for x in X)))
