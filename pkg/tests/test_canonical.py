import itertools

import numpy as np
import pytest

from conftest import graph, random_structure

from matrix_partition.canonical import canonical_form, canonical_structure, cell_maps, is_isomorphic
from matrix_partition.errors import CapExceeded
from matrix_partition.labels import Category
from matrix_partition.structures import Signature, empty_structure, relabel


def test_relabelings_share_a_form(rng):
    sig = Signature.parse("E/2 U/1 R/3")
    for _ in range(20):
        S = random_structure(rng, sig, Category.CATEMPTY, 3)
        forms = {canonical_form(relabel(S, p)) for p in itertools.permutations(range(3))}
        assert len(forms) == 1
        assert canonical_structure(S) == canonical_structure(relabel(S, [2, 0, 1]))


def test_form_distinguishes():
    path = graph(Category.CAT01, [[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    out_star = graph(Category.CAT01, [[0, 1, 1], [0, 0, 0], [0, 0, 0]])
    assert not is_isomorphic(path, out_star)
    assert not is_isomorphic(path, path.lift(Category.CATSTAR))


def test_header_and_empty():
    sig = Signature.of(("E", 2))
    assert canonical_form(empty_structure(sig, Category.CAT01)) == b"01|E/2|0|empty"
    form = canonical_form(graph(Category.CATSTAR, [[2]]))
    assert form == b"star|E/2|1|" + bytes([2])


def test_least_labeling_is_chosen():
    S = graph(Category.CAT01, [[0, 1], [0, 0]])
    # E(1, 0) = 1 flattens to 0 0 1 0, smaller than 0 1 0 0
    assert canonical_structure(S).dense("E").tolist() == [[0, 0], [1, 0]]


def test_cap():
    with pytest.raises(CapExceeded):
        canonical_form(graph(Category.CAT01, np.zeros((4, 4))), max_size=3)


def test_cell_maps_match_relabel(rng):
    sig = Signature.parse("E/2 U/1")
    S = random_structure(rng, sig, Category.CATSTAR, 3)
    perms = np.array(list(itertools.permutations(range(3))))
    flat = np.concatenate([S.dense(n).ravel() for n in sig.names])
    rows = flat[cell_maps(sig, 3, perms)]
    for perm, row in zip(perms, rows):
        moved = relabel(S, perm)
        assert row.tolist() == np.concatenate([moved.dense(n).ravel() for n in sig.names]).tolist()


def isomorphic_by_search(G, H):
    return any(relabel(G, p) == H for p in itertools.permutations(range(G.domain_size)))


@pytest.mark.parametrize("cat", [Category.CAT01, Category.CATEMPTY], ids=lambda c: c.token)
def test_forms_agree_with_permutation_search(rng, cat):
    sig = Signature.parse("E/2 U/1")
    distinct = same = 0
    while distinct < 100:
        G = random_structure(rng, sig, cat, 3)
        H = relabel(G, rng.permutation(3).tolist())
        if rng.integers(2):
            H = random_structure(rng, sig, cat, 3)
        by_search = isomorphic_by_search(G, H)
        assert (canonical_form(G) == canonical_form(H)) == by_search
        assert is_isomorphic(G, H) == by_search
        if by_search:
            same += 1
        else:
            distinct += 1
    assert same > 0
