"""Label alphabets and their partial orders.

Labels are small integers so that whole label tensors can be compared with
one lookup into a 4x4 order table.
"""

from enum import Enum, IntEnum
from functools import cached_property
from typing import Dict, FrozenSet, Tuple

import numpy as np

from .errors import ValidationError


class Label(IntEnum):
    ZERO = 0
    ONE = 1
    STAR = 2
    EMPTY = 3

    @property
    def token(self) -> str:
        return LABEL_TOKENS[self]

    @classmethod
    def from_token(cls, token: str) -> "Label":
        try:
            return TOKEN_LABELS[token]
        except KeyError:
            raise ValidationError(f"unknown label token '{token}'")


LABEL_TOKENS: Dict[Label, str] = {
    Label.ZERO: "0",
    Label.ONE: "1",
    Label.STAR: "*",
    Label.EMPTY: "e",
}
TOKEN_LABELS: Dict[str, Label] = {v: k for k, v in LABEL_TOKENS.items()}

# Strict relations; reflexivity is added in Category.leq_table.
_STRICT_ORDER: Dict[str, Tuple[Tuple[Label, Label], ...]] = {
    "01": (),
    "star": ((Label.ZERO, Label.STAR), (Label.ONE, Label.STAR)),
    "empty": (
        (Label.EMPTY, Label.ZERO),
        (Label.EMPTY, Label.ONE),
        (Label.EMPTY, Label.STAR),
        (Label.ZERO, Label.STAR),
        (Label.ONE, Label.STAR),
    ),
    "csp": ((Label.ZERO, Label.ONE),),
}

_ADMITTED: Dict[str, FrozenSet[Label]] = {
    "01": frozenset({Label.ZERO, Label.ONE}),
    "star": frozenset({Label.ZERO, Label.ONE, Label.STAR}),
    "empty": frozenset(Label),
    "csp": frozenset({Label.ZERO, Label.ONE}),
}


class Category(Enum):
    """A label alphabet together with its order. Values are the file tokens."""

    CAT01 = "01"
    CATSTAR = "star"
    CATEMPTY = "empty"
    CATCSP = "csp"

    @classmethod
    def from_token(cls, token: str) -> "Category":
        try:
            return cls(token)
        except ValueError:
            raise ValidationError(f"unknown category '{token}'")

    @property
    def token(self) -> str:
        return self.value

    @property
    def labels(self) -> FrozenSet[Label]:
        return _ADMITTED[self.value]

    @property
    def label_count(self) -> int:
        return len(self.labels)

    @cached_property
    def leq_table(self) -> np.ndarray:
        """Boolean table T with T[a, b] true iff a ⪯ b (false off the alphabet)."""
        table = np.zeros((4, 4), dtype=bool)
        for label in self.labels:
            table[label, label] = True
        for a, b in _STRICT_ORDER[self.value]:
            table[a, b] = True
        table.flags.writeable = False
        return table

    @cached_property
    def join_table(self) -> np.ndarray:
        """Table J with J[a, b] the least upper bound of a and b (-1 when undefined)."""
        table = np.full((4, 4), -1, dtype=np.int8)
        leq = self.leq_table
        for a in self.labels:
            for b in self.labels:
                bounds = [c for c in self.labels if leq[a, c] and leq[b, c]]
                least = [c for c in bounds if all(leq[c, d] for d in bounds)]
                if least:
                    table[a, b] = least[0]
        table.flags.writeable = False
        return table

    def admits(self, label: Label) -> bool:
        return label in self.labels

    def check_admitted(self, label: Label) -> None:
        if label not in self.labels:
            raise ValidationError(f"label '{Label(label).token}' is not admitted by category {self.token}")

    def admits_array(self, codes: np.ndarray) -> bool:
        mask = np.zeros(4, dtype=bool)
        mask[list(self.labels)] = True
        return bool(mask[codes].all())


# CAT01 ⊂ CATSTAR ⊂ CATEMPTY as sub-posets; CATCSP stands alone.
_CHAIN_RANK = {Category.CAT01: 0, Category.CATSTAR: 1, Category.CATEMPTY: 2}


def label_leq(a: Label, b: Label, cat: Category) -> bool:
    cat.check_admitted(a)
    cat.check_admitted(b)
    return bool(cat.leq_table[a, b])


def label_join(a: Label, b: Label, cat: Category) -> Label:
    """Least upper bound of ``a`` and ``b`` in the ⋆ or ∅ order."""
    if cat not in (Category.CATSTAR, Category.CATEMPTY):
        raise ValidationError(f"join is defined for star and empty categories, not {cat.token}")
    cat.check_admitted(a)
    cat.check_admitted(b)
    return Label(int(cat.join_table[a, b]))


def join_category(first: Category, second: Category) -> Category:
    """Smallest category whose order contains both as sub-posets."""
    if first == second:
        return first
    if first in _CHAIN_RANK and second in _CHAIN_RANK:
        return first if _CHAIN_RANK[first] >= _CHAIN_RANK[second] else second
    raise ValidationError(f"categories {first.token} and {second.token} cannot be compared")


def join_presence(has_zero: np.ndarray, has_one: np.ndarray, has_star: np.ndarray) -> np.ndarray:
    """Join of a set of ⋆-order labels given which of 0, 1, ⋆ occur.

    An empty set joins to ``Label.EMPTY``, the bottom of the ∅ order.
    """
    result = np.full(has_zero.shape, Label.EMPTY, dtype=np.int8)
    result[has_zero] = Label.ZERO
    result[has_one] = Label.ONE
    result[has_star | (has_zero & has_one)] = Label.STAR
    return result


def join_codes(codes: np.ndarray, axes: Tuple[int, ...]) -> np.ndarray:
    """Join of ⋆-order label codes along ``axes``."""
    return join_presence(
        (codes == Label.ZERO).any(axis=axes),
        (codes == Label.ONE).any(axis=axes),
        (codes == Label.STAR).any(axis=axes),
    )
