"""Signature rewrites: packing many relations into one, and back.

Packing adds a marker element ``c`` (serialized last) and one relation R of
arity k + p - 1, where k is the largest base arity and p the number of base
symbols. The i-th base relation lives on the tuples
``(c, ..., c, t, c, ..., c)`` with i - 1 leading markers (family A1), the
all-marker tuple is labeled 1 (A2) and every other tuple 0 (A3).

The binary rewrites move between a single edge relation and a signature
whose first symbol has arity at least two.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import SignatureMismatch, ValidationError
from .labels import Category, Label, join_codes, join_presence
from .structures import LStructure, Signature, Symbol, empty_structure

logger = logging.getLogger(__name__)

PACKED_NAME = "R"


@dataclass(frozen=True)
class PackedSignature:
    base: Signature
    packed: Signature

    @classmethod
    def of(cls, base: Signature, name: str = PACKED_NAME) -> "PackedSignature":
        if not len(base):
            raise ValidationError("cannot pack an empty signature")
        arity = base.max_arity + len(base) - 1
        return cls(base, Signature((Symbol(name, arity),)))

    @property
    def arity(self) -> int:
        return self.packed.symbols[0].arity

    @property
    def name(self) -> str:
        return self.packed.symbols[0].name

    def slot(self, i: int, marker: int, payload: Union[slice, Sequence[int]]) -> Tuple:
        """Index of the A1 block of the i-th symbol (1-based) in a packed tensor."""
        ki = self.base.symbols[i - 1].arity
        if isinstance(payload, slice):
            payload = (payload,) * ki
        trailing = self.arity - (i - 1) - ki
        return (marker,) * (i - 1) + tuple(payload) + (marker,) * trailing


class TupleFamily(Enum):
    A1 = "A1"
    A2 = "A2"
    A3 = "A3"


@dataclass(frozen=True)
class TupleFamilyTag:
    family: TupleFamily
    symbol_index: Optional[int] = None
    payload: Optional[Tuple[int, ...]] = None

    def __str__(self) -> str:
        if self.family is TupleFamily.A1:
            return f"A1({self.symbol_index},{self.payload})"
        return self.family.value


def classify_packed_tuple(t: Sequence[int], base: Signature, marker: int) -> TupleFamilyTag:
    packed = PackedSignature.of(base)
    t = tuple(t)
    if len(t) != packed.arity:
        raise ValidationError(f"packed tuples have {packed.arity} entries, got {len(t)}")
    non_marker = [pos for pos, x in enumerate(t) if x != marker]
    if not non_marker:
        return TupleFamilyTag(TupleFamily.A2)
    i = non_marker[0] + 1
    if i > len(base):
        return TupleFamilyTag(TupleFamily.A3)
    ki = base.symbols[i - 1].arity
    payload = t[i - 1 : i - 1 + ki]
    if marker in payload or any(x != marker for x in t[i - 1 + ki :]):
        return TupleFamilyTag(TupleFamily.A3)
    return TupleFamilyTag(TupleFamily.A1, i, payload)


def family_masks(packed: PackedSignature, size: int, marker: int) -> Dict[TupleFamily, np.ndarray]:
    """Boolean masks of the three families over a packed tuple space of ``size`` elements."""
    shape = (size,) * packed.arity
    a1 = np.zeros(shape, dtype=bool)
    a2 = np.zeros(shape, dtype=bool)
    non_marker = slice(0, marker)
    for i in range(1, len(packed.base) + 1):
        a1[packed.slot(i, marker, non_marker)] = True
    a2[(marker,) * packed.arity] = True
    return {TupleFamily.A1: a1, TupleFamily.A2: a2, TupleFamily.A3: ~(a1 | a2)}


def pack_structure(A: LStructure) -> LStructure:
    """Pack A into one relation; the marker is element ``|A|``."""
    if A.category not in (Category.CAT01, Category.CATSTAR):
        raise ValidationError(f"packing expects a 01 or star structure, got {A.category.token}")
    if A.domain_size == 0:
        raise ValidationError("packing needs a nonempty structure")
    packed = PackedSignature.of(A.signature)
    n = A.domain_size
    marker = n
    arr = np.full((n + 1,) * packed.arity, Label.ZERO, dtype=np.int8)
    arr[(marker,) * packed.arity] = Label.ONE
    for i, symbol in enumerate(A.signature, 1):
        arr[packed.slot(i, marker, slice(0, n))] = A.dense(symbol.name)
    return LStructure.from_dense(packed.packed, A.category, {packed.name: arr})


class NoCertificateReason(Enum):
    STAR_LOOP = "star-loop"
    MARKER_TUPLE = "marker-tuple"
    MIXED_TUPLE = "mixed-tuple"


@dataclass(frozen=True)
class NoCertificate:
    """The packed instance maps into no packed target."""

    reason: NoCertificateReason

    def __str__(self) -> str:
        return f"no-certificate: {self.reason.value}"


def designated_no_instance(base: Signature) -> LStructure:
    """One element with ⋆ on every diagonal; it maps only into trivial targets."""
    return LStructure(base, Category.CATSTAR, 1, {name: Label.STAR for name in base.names})


def unpack_instance(packed_instance: LStructure, base: Signature) -> Union[LStructure, NoCertificate]:
    """Recover a base-signature instance equivalent to a packed one.

    Elements with diagonal 1 must all go to the marker, so they are merged
    into one marker class and every packed tuple class is labeled with the
    join of its members. The merged structure must look like a packed
    target (all-marker tuple 1, other non-A1 tuples 0); the A1 blocks then
    give the base relations.
    """
    packed = PackedSignature.of(base)
    if len(base) < 2:
        raise ValidationError("unpacking needs a base signature with at least two symbols")
    symbols = packed_instance.signature.symbols
    if len(symbols) != 1 or symbols[0].arity != packed.arity:
        raise SignatureMismatch(
            f"expected a single relation of arity {packed.arity} for [{base}], got [{packed_instance.signature}]"
        )
    if packed_instance.category not in (Category.CAT01, Category.CATSTAR):
        raise ValidationError("packed instances must be 01 or star structures")
    K = packed.arity
    name = symbols[0].name
    arr = packed_instance.dense(name)
    diagonal = packed_instance.diagonal(name)

    if (diagonal == Label.STAR).any():
        return NoCertificate(NoCertificateReason.STAR_LOOP)

    ones = diagonal == Label.ONE
    rest = np.flatnonzero(~ones)
    marker = len(rest)
    size = marker + 1
    project = np.full(packed_instance.domain_size, marker, dtype=np.int64)
    project[rest] = np.arange(marker)

    # class index of every packed tuple after merging
    classes = np.zeros(arr.shape, dtype=np.int64)
    for d in range(K):
        axis_shape = (1,) * d + (-1,) + (1,) * (K - 1 - d)
        classes = classes + project.reshape(axis_shape) * size ** (K - 1 - d)
    present = np.zeros((3, size**K), dtype=bool)
    for label in (Label.ZERO, Label.ONE, Label.STAR):
        present[label, classes[arr == label]] = True
    merged = join_presence(*present).reshape((size,) * K)

    masks = family_masks(packed, size, marker)
    occupied = merged != Label.EMPTY
    if ones.any() and merged[(marker,) * K] != Label.ONE:
        return NoCertificate(NoCertificateReason.MARKER_TUPLE)
    if (merged[masks[TupleFamily.A3] & occupied] != Label.ZERO).any():
        return NoCertificate(NoCertificateReason.MIXED_TUPLE)
    if not ones.any():
        # every marker-free tuple is an A3 tuple, so every packed target accepts it
        logger.debug("[arity] no diagonal-1 elements; unpacked to the empty structure")
        return empty_structure(base, Category.CATSTAR)

    arrays = {s.name: merged[packed.slot(i, marker, slice(0, marker))] for i, s in enumerate(base, 1)}
    return LStructure.from_dense(base, Category.CATSTAR, arrays)


def _lift_relation(source: LStructure, sigma: Signature) -> LStructure:
    symbols = source.signature.symbols
    if len(symbols) != 1:
        raise SignatureMismatch(f"expected a single-relation structure, got [{source.signature}]")
    if not len(sigma):
        raise ValidationError("target signature is empty")
    if source.category not in (Category.CAT01, Category.CATSTAR):
        raise ValidationError("expected a 01 or star structure")
    ell = symbols[0].arity
    first = sigma.symbols[0]
    if first.arity < 2:
        raise ValidationError(f"first symbol {first} needs arity >= 2")
    if ell < 2 or ell > first.arity:
        raise ValidationError(f"source relation of arity {ell} does not fit {first}")
    n = source.domain_size
    labels = source.dense(symbols[0].name)
    arrays = {
        first.name: np.broadcast_to(labels.reshape(labels.shape + (1,) * (first.arity - ell)), (n,) * first.arity)
    }
    for symbol in sigma.symbols[1:]:
        arrays[symbol.name] = np.full((n,) * symbol.arity, Label.STAR, dtype=np.int8)
    return LStructure.from_dense(sigma, Category.CATSTAR, arrays)


def binary_to_many_target(H: LStructure, sigma: Signature) -> LStructure:
    """R_1(x_1, ..., x_k) = E(x_1, x_2); every other relation is ⋆ everywhere."""
    return _lift_relation(H, sigma)


def binary_to_many_instance(G: LStructure, sigma: Signature) -> LStructure:
    return _lift_relation(G, sigma)


def many_to_binary_instance(B: LStructure, arity: int = 2, name: str = "E") -> LStructure:
    """E(x, y) is the join of R_1 over all tuples starting with (x, y)."""
    if not len(B.signature):
        raise ValidationError("signature is empty")
    if B.category not in (Category.CAT01, Category.CATSTAR):
        raise ValidationError("expected a 01 or star structure")
    first = B.signature.symbols[0]
    if arity < 2 or first.arity < arity:
        raise ValidationError(f"cannot project {first} onto {arity} coordinates")
    labels = B.dense(first.name)
    if first.arity > arity:
        labels = join_codes(labels, axes=tuple(range(arity, first.arity)))
    return LStructure.from_dense(Signature((Symbol(name, arity),)), Category.CATSTAR, {name: labels})
