import math

import numpy as np
import pytest

from conftest import graph, random_structure

from matrix_partition.blowup import (
    block_size,
    largest_image_share,
    parse_projection,
    recover_homomorphism,
    serialize_projection,
    star_to_01,
)
from matrix_partition.errors import ParseError, ValidationError
from matrix_partition.hadamard import sylvester
from matrix_partition.labels import Category, Label
from matrix_partition.partition import EDGE_SIGNATURE
from matrix_partition.solver import find_homomorphism, hom_exists, is_homomorphism
from matrix_partition.structures import LStructure, Signature


@pytest.mark.parametrize("m, expected", [(1, 8), (2, 32), (3, 64), (4, 128)])
def test_block_size(m, expected):
    assert block_size(m) == expected


def test_block_size_bound():
    for m in range(1, 101):
        b = block_size(m)
        assert b > 4 * m * m + 1
        assert b // 2 <= 4 * m * m + 1
        assert b / (2 * m) >= math.sqrt(4 * m * m + 1)
    with pytest.raises(ValidationError):
        block_size(0)


def test_star_loop_becomes_hadamard_pattern(star_loop):
    result = star_to_01(star_loop, 1)
    assert result.block_size == 8
    assert result.structure.category == Category.CAT01
    expected = (sylvester(3).entries.astype(int) + 1) // 2
    assert np.array_equal(result.structure.dense("E"), expected)


def test_star_free_structure_is_copied_blockwise(k2):
    result = star_to_01(k2, 1)
    labels = result.structure.dense("E")
    assert labels.shape == (16, 16)
    assert (labels[:8, :8] == Label.ZERO).all()
    assert (labels[:8, 8:] == Label.ONE).all()
    assert list(result.block(1)) == list(range(8, 16))


def test_projection_is_a_surjective_homomorphism(rng):
    for _ in range(10):
        G = random_structure(rng, EDGE_SIGNATURE, Category.CATSTAR, 3)
        result = star_to_01(G, 1)
        assert result.projection.is_surjective()
        assert is_homomorphism(result.structure, G, result.projection)


def test_higher_arity_uses_first_two_indices():
    sig = Signature.parse("R/3")
    G = LStructure(sig, Category.CATSTAR, 1, {"R": Label.STAR})
    labels = star_to_01(G, 1).structure.dense("R")
    expected = (sylvester(3).entries.astype(int) + 1) // 2
    for k in range(8):
        assert np.array_equal(labels[:, :, k], expected)


def test_unary_star_rejected():
    sig = Signature.parse("U/1 E/2")
    G = LStructure(sig, Category.CATSTAR, 1, {"U": Label.STAR, "E": Label.ZERO})
    with pytest.raises(ValidationError):
        star_to_01(G, 1)
    empty_version = LStructure(sig, Category.CATEMPTY, 1, {"U": Label.ZERO, "E": Label.EMPTY})
    with pytest.raises(ValidationError):
        star_to_01(empty_version, 1)


def check_equivalence(G, H):
    result = star_to_01(G, H.domain_size)
    expected = hom_exists(G, H)
    witness = find_homomorphism(result.structure, H)
    assert (witness is not None) == expected
    if witness is not None:
        recovered = recover_homomorphism(result, witness)
        assert is_homomorphism(G, H, recovered)
        shares = largest_image_share(result, witness)
        assert min(shares) * H.domain_size >= result.block_size
    return expected


def test_equivalence_single_element_targets(rng):
    targets = [graph(Category.CATSTAR, [[label]]) for label in (Label.ZERO, Label.ONE, Label.STAR)]
    outcomes = set()
    for _ in range(20):
        G = random_structure(rng, EDGE_SIGNATURE, Category.CATSTAR, int(rng.integers(1, 3)))
        for H in targets:
            outcomes.add(check_equivalence(G, H))
    assert outcomes == {True, False}


@pytest.mark.slow
def test_equivalence_two_element_targets(rng, star_targets):
    for _ in range(50):
        G = random_structure(rng, EDGE_SIGNATURE, Category.CATSTAR, int(rng.integers(1, 4)))
        for H in star_targets:
            check_equivalence(G, H)


def test_projection_file_round_trip():
    result = star_to_01(graph(Category.CAT01, [[0]]), 1)
    text = serialize_projection(result.projection)
    assert text.splitlines()[:2] == ["0 -> 0", "1 -> 0"]
    assert parse_projection(text, 1) == result.projection


@pytest.mark.parametrize(
    "text, error",
    [
        ("0 -> 0\n0 -> 0\n", ParseError),
        ("0 => 0\n", ParseError),
        ("0 -> x\n", ParseError),
        ("1 -> 0\n", ValidationError),
    ],
)
def test_projection_parse_errors(text, error):
    with pytest.raises(error):
        parse_projection(text, 1)


def test_recover_checks_source(k2):
    result = star_to_01(k2, 1)
    with pytest.raises(ValidationError):
        recover_homomorphism(result, find_homomorphism(k2, k2))
