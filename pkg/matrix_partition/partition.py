"""Trivial targets and matrix partitions as homomorphisms to ⋆-graphs."""

from typing import Optional, Sequence, Union

import numpy as np

from .errors import ValidationError
from .labels import Category, Label
from .solver import SolverOptions, find_homomorphism
from .structures import HomMap, LStructure, Signature

EDGE_SIGNATURE = Signature.of(("E", 2))

MatrixLike = Sequence[Sequence[Union[Label, str, int]]]


def is_trivial_target(H: LStructure) -> bool:
    """True iff some element carries ⋆ on the diagonal of every relation.

    Such an element absorbs every structure, so MP(H) accepts everything.
    """
    if H.domain_size == 0:
        return False
    absorbing = np.ones(H.domain_size, dtype=bool)
    for symbol in H.signature:
        absorbing &= H.diagonal(symbol.name) == Label.STAR
    return bool(absorbing.any())


def _as_label(value: Union[Label, str, int]) -> Label:
    if isinstance(value, str):
        return Label.from_token(value)
    return Label(value)


def matrix_target(matrix: MatrixLike) -> LStructure:
    """The ⋆-graph whose adjacency labels are the entries of a square matrix."""
    rows = [[_as_label(v) for v in row] for row in matrix]
    n = len(rows)
    if any(len(row) != n for row in rows):
        raise ValidationError("partition matrix must be square")
    arr = np.array(rows, dtype=np.int8).reshape(n, n)
    return LStructure.from_dense(EDGE_SIGNATURE, Category.CATSTAR, {"E": arr})


def has_matrix_partition(
    G: LStructure,
    matrix: MatrixLike,
    loopless: bool = False,
    options: Optional[SolverOptions] = None,
) -> Optional[HomMap]:
    """Find a partition of G's elements into the parts indexed by ``matrix``.

    Element x goes to part h(x); the pair (x, y) must satisfy
    E(x, y) ⪯ M[h(x), h(y)]. With ``loopless`` only distinct pairs are
    constrained, which is done by relabeling G's diagonal to ∅.
    """
    if G.signature != EDGE_SIGNATURE:
        raise ValidationError(f"matrix partitions need signature [{EDGE_SIGNATURE}], got [{G.signature}]")
    target = matrix_target(matrix)
    if loopless:
        arr = G.dense("E").copy()
        np.fill_diagonal(arr, Label.EMPTY)
        G = LStructure.from_dense(EDGE_SIGNATURE, Category.CATEMPTY, {"E": arr})
    return find_homomorphism(G, target, options)
