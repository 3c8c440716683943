"""Translation between ∅-structures and relational structures.

Each symbol R becomes two symbols ``R_0`` and ``R_1``; ``R_j`` holds a tuple
exactly when j ⪯ R(t) in the ∅ order. The translation preserves
homomorphisms and their witnesses.
"""

from dataclasses import dataclass

import numpy as np

from .errors import SignatureMismatch, ValidationError
from .labels import Category, Label
from .structures import LStructure, Signature, Symbol

_EMPTY_LEQ = Category.CATEMPTY.leq_table

# (R_0, R_1) membership -> ∅-label
_DECODE = np.array(
    [[Label.EMPTY, Label.ONE], [Label.ZERO, Label.STAR]],
    dtype=np.int8,
)


@dataclass(frozen=True)
class DoubledSignature:
    base: Signature
    derived: Signature

    @classmethod
    def of(cls, base: Signature) -> "DoubledSignature":
        derived = []
        for symbol in base:
            derived.append(Symbol(f"{symbol.name}_0", symbol.arity))
            derived.append(Symbol(f"{symbol.name}_1", symbol.arity))
        return cls(base, Signature(tuple(derived)))

    @classmethod
    def recover(cls, derived: Signature) -> "DoubledSignature":
        """Find the base signature of a doubled one."""
        symbols = derived.symbols
        if len(symbols) % 2:
            raise SignatureMismatch(f"[{derived}] has an odd number of symbols")
        base = []
        for zero, one in zip(symbols[0::2], symbols[1::2]):
            if not (zero.name.endswith("_0") and one.name.endswith("_1")):
                raise SignatureMismatch(f"[{derived}] is not of the form R_0 R_1 ...")
            name = zero.name[:-2]
            if one.name[:-2] != name or zero.arity != one.arity or not name:
                raise SignatureMismatch(f"{zero} and {one} do not form a doubled pair")
            base.append(Symbol(name, zero.arity))
        result = cls(Signature(tuple(base)), derived)
        if cls.of(result.base).derived != derived:
            raise SignatureMismatch(f"[{derived}] is not a doubled signature")
        return result


def to_csp(A: LStructure) -> LStructure:
    """Encode an ∅-structure (or a ⋆/01 one) over the doubled signature."""
    if A.category == Category.CATCSP:
        raise ValidationError("to_csp expects a 01, star or empty structure")
    doubled = DoubledSignature.of(A.signature)
    arrays = {}
    for symbol in A.signature:
        labels = A.dense(symbol.name)
        for j in (Label.ZERO, Label.ONE):
            holds = _EMPTY_LEQ[j, labels]
            arrays[f"{symbol.name}_{int(j)}"] = np.where(holds, Label.ONE, Label.ZERO).astype(np.int8)
    if not arrays:
        return LStructure(doubled.derived, Category.CATCSP, A.domain_size, {})
    return LStructure.from_dense(doubled.derived, Category.CATCSP, arrays)


def from_csp(A: LStructure) -> LStructure:
    if A.category != Category.CATCSP:
        raise ValidationError("from_csp expects a csp structure")
    doubled = DoubledSignature.recover(A.signature)
    arrays = {}
    for symbol in doubled.base:
        zero = A.dense(f"{symbol.name}_0").astype(np.intp)
        one = A.dense(f"{symbol.name}_1").astype(np.intp)
        arrays[symbol.name] = _DECODE[zero, one]
    if not arrays:
        return LStructure(doubled.base, Category.CATEMPTY, A.domain_size, {})
    return LStructure.from_dense(doubled.base, Category.CATEMPTY, arrays)
