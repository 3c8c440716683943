import pytest

from conftest import FIXTURES, graph

from matrix_partition.canonical import canonical_form, canonical_structure, is_isomorphic
from matrix_partition.cores import is_core
from matrix_partition.errors import CapExceeded, SignatureMismatch, ValidationError
from matrix_partition.labels import Category, Label
from matrix_partition.mps import read_family, read_structure
from matrix_partition.obstructions import (
    DualityResult,
    ObstructionMode,
    Universe,
    duality_holds,
    enumerate_stack,
    enumerate_structures,
    hom_minimal_obstructions,
    hom_minimality_witness,
    inclusion_minimal_obstructions,
    is_hom_minimal_obstruction,
    is_inclusion_minimal_obstruction,
    nontrivial_targets,
    odd_cycle_empty,
    stack_maps_into,
    two_vertex_star_counterexample,
)
from matrix_partition.partition import EDGE_SIGNATURE
from matrix_partition.solver import hom_exists
from matrix_partition.structures import LStructure, Signature, delete_element


@pytest.fixture
def one_loop():
    return graph(Category.CAT01, [[1]])


@pytest.fixture
def k1():
    return graph(Category.CAT01, [[0]])


@pytest.mark.parametrize(
    "n, category, count",
    [
        (1, Category.CAT01, 2),
        (1, Category.CATSTAR, 3),
        (1, Category.CATEMPTY, 4),
        (2, Category.CAT01, 10),
        (2, Category.CATSTAR, 45),
    ],
)
def test_enumeration_counts(n, category, count):
    assert len(list(enumerate_structures(EDGE_SIGNATURE, n, category))) == count


def test_enumeration_representatives_are_canonical():
    structures = list(enumerate_structures(EDGE_SIGNATURE, 2, Category.CATSTAR))
    forms = [canonical_form(S) for S in structures]
    assert forms == sorted(set(forms))
    for S in structures:
        assert canonical_structure(S) == S


def test_enumeration_over_two_symbols():
    sig = Signature.parse("E/2 U/1")
    # 2^6 labelings; the swap fixes the 2^3 symmetric ones
    assert len(enumerate_stack(sig, 2, Category.CAT01)) == (64 + 8) // 2


def test_enumeration_edge_cases():
    (empty,) = enumerate_structures(EDGE_SIGNATURE, 0, Category.CATSTAR)
    assert empty.domain_size == 0
    with pytest.raises(CapExceeded):
        enumerate_stack(EDGE_SIGNATURE, 3, Category.CATEMPTY, cap=1000)
    with pytest.raises(ValidationError):
        enumerate_stack(Signature.parse("R_0/2 R_1/2"), 1, Category.CATCSP)


def test_stack_checks_signature(one_loop):
    stack = enumerate_stack(Signature.parse("R/2"), 1, Category.CAT01)
    with pytest.raises(SignatureMismatch):
        stack_maps_into(stack, one_loop)


def test_stack_delete_matches_structures():
    stack = enumerate_stack(EDGE_SIGNATURE, 3, Category.CAT01)
    smaller = stack.delete(1)
    for i in (0, 7, len(stack) - 1):
        assert smaller.structure(i) == delete_element(stack.structure(i), 1)


def test_stacked_checks_agree_with_solver(k2):
    stack = enumerate_stack(EDGE_SIGNATURE, 3, Category.CATSTAR)
    fits = stack_maps_into(stack, k2)
    for i in range(0, len(stack), 97):
        assert fits[i] == hom_exists(stack.structure(i), k2)


def test_inclusion_minimal_examples(one_loop, k2, empty_cycle):
    assert is_inclusion_minimal_obstruction(one_loop, k2)
    assert is_inclusion_minimal_obstruction(empty_cycle(3), k2)
    assert is_inclusion_minimal_obstruction(empty_cycle(5), k2)
    assert not is_inclusion_minimal_obstruction(empty_cycle(4), k2)
    assert not is_inclusion_minimal_obstruction(k2, k2)
    for v in range(3):
        assert hom_exists(delete_element(empty_cycle(3), v), k2)


def test_odd_cycle_labels(empty_cycle):
    C3 = empty_cycle(3)
    assert C3.category == Category.CATEMPTY
    assert C3.label("E", (0, 1)) == Label.ONE
    assert C3.label("E", (2, 0)) == Label.ONE
    assert C3.label("E", (1, 0)) == Label.EMPTY
    assert C3.label("E", (1, 1)) == Label.EMPTY
    with pytest.raises(ValidationError):
        empty_cycle(0)


def test_hom_minimal_single_loop(one_loop, k2):
    assert is_hom_minimal_obstruction(one_loop, k2, universe_bound=3)


def test_two_vertex_counterexample(k2):
    G, weakened = two_vertex_star_counterexample(k2)
    assert G.dense("E").tolist() == [[Label.ZERO, Label.STAR], [Label.STAR, Label.ZERO]]
    assert weakened.label("E", (1, 0)) == Label.ZERO
    assert is_core(G)
    assert is_inclusion_minimal_obstruction(G, k2)
    for bound in (2, 3):
        assert not is_hom_minimal_obstruction(G, k2, universe_bound=bound)

    witness = hom_minimality_witness(G, k2, universe_bound=2)
    assert hom_exists(witness, G)
    assert not hom_exists(G, witness)
    assert not hom_exists(witness, k2)
    assert hom_exists(weakened, G) and not hom_exists(G, weakened)
    assert not hom_exists(weakened, k2)


def test_counterexample_needs_graphs():
    H = LStructure(Signature.parse("R/3"), Category.CAT01, 1, {"R": Label.ZERO})
    with pytest.raises(ValidationError):
        two_vertex_star_counterexample(H)


@pytest.mark.slow
def test_empty_cycles_in_the_k2_report(k2, empty_cycle):
    report = inclusion_minimal_obstructions(k2, Category.CATEMPTY, 3)
    assert canonical_form(empty_cycle(3)) in report.members
    assert all(not hom_exists(S, k2) for S in report.structures)


def test_k1_report_matches_fixture_family(k1):
    report = inclusion_minimal_obstructions(k1, Category.CAT01, 3)
    family = read_family(FIXTURES / "obstructions_K1")
    assert report.mode is ObstructionMode.INCLUSION
    assert len(report.structures) == 3
    assert sorted(canonical_form(F) for F in family) == list(report.members)
    assert report.structures[0].domain_size == 1


def test_report_text(k1):
    report = hom_minimal_obstructions(k1, Category.CAT01, 2, universe_bound=2)
    text = report.to_text()
    header, *blocks = text.split("\n\n")
    lines = header.splitlines()
    assert lines[0] == "# obstruction report"
    assert lines[1].startswith("target-sha256 ")
    assert lines[2:] == ["category 01", "mode hom", "max-size 2", "universe-bound 2", "members 3"]
    assert len(blocks) == 3
    assert blocks[0].startswith("category 01\nsignature E/2\ndomain 1\n")


def test_trivial_target_is_skipped(star_loop):
    report = inclusion_minimal_obstructions(star_loop, Category.CATSTAR, 3)
    assert report.trivial_target
    assert report.members == ()
    assert "trivial-target yes" in report.to_text()
    assert hom_minimal_obstructions(star_loop, Category.CATSTAR, 3, 3).members == ()


def test_hom_members_are_inclusion_members(k2):
    inc = inclusion_minimal_obstructions(k2, Category.CAT01, 3)
    hom = hom_minimal_obstructions(k2, Category.CAT01, 3, universe_bound=3)
    assert set(hom.members) <= set(inc.members)
    assert all(is_core(S) for S in hom.structures)


@pytest.mark.slow
def test_inclusion_and_hom_agree_for_01_instances(star_targets):
    for H in star_targets:
        inc = inclusion_minimal_obstructions(H, Category.CAT01, 3)
        hom = hom_minimal_obstructions(H, Category.CAT01, 3, universe_bound=3)
        assert inc.members == hom.members, H


@pytest.mark.slow
def test_star_hom_members_are_01(k2, star_targets):
    for H in [k2.lift(Category.CATSTAR)] + star_targets:
        star = hom_minimal_obstructions(H, Category.CATSTAR, 3, universe_bound=3)
        plain = hom_minimal_obstructions(H, Category.CAT01, 3, universe_bound=3)
        for S in star.structures:
            assert S.used_labels() <= {Label.ZERO, Label.ONE}
        assert set(star.members) == {canonical_form(S.lift(Category.CATSTAR)) for S in plain.structures}


def test_counterexample_separates_star_reports(k2):
    G, _ = two_vertex_star_counterexample(k2)
    H = k2.lift(Category.CATSTAR)
    inc = inclusion_minimal_obstructions(H, Category.CATSTAR, 2)
    hom = hom_minimal_obstructions(H, Category.CATSTAR, 2, universe_bound=2)
    assert canonical_form(G) in inc.members
    assert canonical_form(G) not in hom.members


def test_duality_with_hom_members(k2):
    report = hom_minimal_obstructions(k2, Category.CAT01, 3, universe_bound=3)
    result = duality_holds(report.structures, k2, Category.CAT01, 3)
    assert result
    assert result.reason == "holds up to size 3"


def test_duality_fixture_family(k1):
    family = read_family(FIXTURES / "obstructions_K1")
    assert duality_holds(family, k1, Category.CAT01, 3)
    assert not duality_holds(family[:1], k1, Category.CAT01, 3)


def test_duality_failures(k2):
    result = duality_holds([], k2, Category.CAT01, 3)
    assert not result
    assert result.reason == "not covered by the family"
    assert not hom_exists(result.counterexample, k2)

    result = duality_holds([k2], k2, Category.CAT01, 3)
    assert result == DualityResult(False, k2, "family member maps to the target")


def test_universe_caches(k2):
    universe = Universe.build(EDGE_SIGNATURE, Category.CAT01, 2)
    assert len(universe) == 2 + 10
    first = universe.maps_into(2, k2)
    assert universe.maps_into(2, k2) is first


def test_nontrivial_targets():
    targets = nontrivial_targets(EDGE_SIGNATURE, Category.CATSTAR, 1)
    assert [T.dense("E").tolist() for T in targets] == [[[0]], [[1]]]


def test_fixture_cycles_match_constructor(empty_cycle):
    for n in (3, 4, 5):
        assert is_isomorphic(read_structure(FIXTURES / f"C{n}.mps"), empty_cycle(n))
