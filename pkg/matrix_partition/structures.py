"""Signatures, labeled structures and maps between their domains.

A structure stores, per relation symbol, a default label plus sparse
overrides; the labeling is total on the full tuple space. All computation
goes through the dense view, one ``int8`` tensor of shape ``(n,) * arity``
per symbol, built lazily and shared read-only.
"""

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, Iterator, Mapping, Sequence, Tuple

import numpy as np

from .errors import SignatureMismatch, ValidationError
from .labels import Category, Label, join_category

Tuple_ = Tuple[int, ...]

_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


@dataclass(frozen=True)
class Symbol:
    name: str
    arity: int

    def __str__(self) -> str:
        return f"{self.name}/{self.arity}"


@dataclass(frozen=True)
class Signature:
    """Ordered relation symbols. Declaration order is significant."""

    symbols: Tuple[Symbol, ...]

    def __post_init__(self):
        seen = set()
        for symbol in self.symbols:
            if not _NAME_RE.match(symbol.name):
                raise ValidationError(f"invalid symbol name '{symbol.name}'")
            if symbol.arity < 1:
                raise ValidationError(f"symbol {symbol.name} must have arity >= 1")
            if symbol.name in seen:
                raise ValidationError(f"duplicate symbol '{symbol.name}'")
            seen.add(symbol.name)

    @classmethod
    def of(cls, *pairs: Tuple[str, int]) -> "Signature":
        return cls(tuple(Symbol(name, arity) for name, arity in pairs))

    @classmethod
    def parse(cls, text: str) -> "Signature":
        """Parse ``"E/2 R/3"`` (commas are accepted as separators)."""
        symbols = []
        for token in text.replace(",", " ").split():
            name, sep, arity = token.partition("/")
            if not sep or not arity.isdigit():
                raise ValidationError(f"malformed symbol '{token}', expected NAME/ARITY")
            symbols.append(Symbol(name, int(arity)))
        return cls(tuple(symbols))

    def __str__(self) -> str:
        return " ".join(str(s) for s in self.symbols)

    def __iter__(self) -> Iterator[Symbol]:
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(s.name for s in self.symbols)

    @property
    def max_arity(self) -> int:
        return max((s.arity for s in self.symbols), default=0)

    def arity(self, name: str) -> int:
        return self.symbol(name).arity

    def symbol(self, name: str) -> Symbol:
        for symbol in self.symbols:
            if symbol.name == name:
                return symbol
        raise ValidationError(f"unknown symbol '{name}'")

    def index(self, name: str) -> int:
        return self.names.index(self.symbol(name).name)


@dataclass(frozen=True, eq=False)
class LStructure:
    """Finite domain ``0..n-1`` with a total labeling of every tuple space.

    Immutable once validated; treat ``defaults`` and ``overrides`` as
    read-only.
    """

    signature: Signature
    category: Category
    domain_size: int
    defaults: Dict[str, Label]
    overrides: Dict[str, Dict[Tuple_, Label]] = field(default_factory=dict)

    def __post_init__(self):
        if self.domain_size < 0:
            raise ValidationError("domain size must be non-negative")
        defaults = {}
        overrides = {}
        for symbol in self.signature:
            if symbol.name not in self.defaults:
                raise ValidationError(f"missing default label for {symbol.name}")
            default = Label(self.defaults[symbol.name])
            self.category.check_admitted(default)
            defaults[symbol.name] = default
            table = {}
            for t, label in self.overrides.get(symbol.name, {}).items():
                t = tuple(int(x) for x in t)
                self._check_tuple(symbol, t)
                label = Label(label)
                self.category.check_admitted(label)
                table[t] = label
            overrides[symbol.name] = table
        extra = (set(self.defaults) | set(self.overrides)) - set(self.signature.names)
        if extra:
            raise ValidationError(f"labels given for undeclared symbols: {sorted(extra)}")
        object.__setattr__(self, "defaults", defaults)
        object.__setattr__(self, "overrides", overrides)

    def _check_tuple(self, symbol: Symbol, t: Tuple_) -> None:
        if len(t) != symbol.arity:
            raise ValidationError(f"{symbol.name} expects {symbol.arity} elements, got {len(t)}")
        for x in t:
            if not 0 <= x < self.domain_size:
                raise ValidationError(f"element {x} out of range for domain of size {self.domain_size}")

    @classmethod
    def from_dense(
        cls, signature: Signature, category: Category, arrays: Mapping[str, np.ndarray]
    ) -> "LStructure":
        """Build from dense label tensors, picking each symbol's majority label as default."""
        n = None
        defaults = {}
        overrides = {}
        dense = {}
        for symbol in signature:
            arr = np.asarray(arrays[symbol.name], dtype=np.int8)
            if arr.ndim != symbol.arity or len(set(arr.shape)) > 1:
                raise ValidationError(f"dense labels for {symbol.name} must be a cube of rank {symbol.arity}")
            size = arr.shape[0]
            if n is None:
                n = size
            elif size != n:
                raise ValidationError("dense label tensors disagree on the domain size")
            if not category.admits_array(arr):
                raise ValidationError(f"labels of {symbol.name} not admitted by category {category.token}")
            default = majority_label(arr)
            defaults[symbol.name] = default
            overrides[symbol.name] = {
                tuple(int(x) for x in idx): Label(int(arr[tuple(idx)]))
                for idx in np.argwhere(arr != default)
            }
            frozen = arr.copy()
            frozen.flags.writeable = False
            dense[symbol.name] = frozen
        structure = cls(signature, category, n or 0, defaults, overrides)
        if dense:
            structure.__dict__["_dense"] = dense
        return structure

    @cached_property
    def _dense(self) -> Dict[str, np.ndarray]:
        result = {}
        for symbol in self.signature:
            arr = np.full((self.domain_size,) * symbol.arity, self.defaults[symbol.name], dtype=np.int8)
            for t, label in self.overrides[symbol.name].items():
                arr[t] = label
            arr.flags.writeable = False
            result[symbol.name] = arr
        return result

    def dense(self, name: str) -> np.ndarray:
        self.signature.symbol(name)
        return self._dense[name]

    @property
    def elements(self) -> range:
        return range(self.domain_size)

    def label(self, name: str, t: Sequence[int]) -> Label:
        return get_label(self, name, t)

    def diagonal(self, name: str) -> np.ndarray:
        arr = self.dense(name)
        idx = np.arange(self.domain_size)
        return arr[(idx,) * arr.ndim]

    def used_labels(self) -> frozenset:
        found = set()
        for arr in self._dense.values():
            found.update(int(x) for x in np.unique(arr))
        return frozenset(Label(x) for x in found)

    def lift(self, category: Category) -> "LStructure":
        """View this structure in a larger category of the 01 ⊂ ⋆ ⊂ ∅ chain."""
        if join_category(self.category, category) != category:
            raise ValidationError(f"cannot lift {self.category.token} into {category.token}")
        return LStructure(self.signature, category, self.domain_size, self.defaults, self.overrides)

    def key(self) -> Tuple:
        return (
            self.signature,
            self.category,
            self.domain_size,
            tuple(self._dense[name].tobytes() for name in self.signature.names),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LStructure):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"LStructure({self.category.token}, [{self.signature}], n={self.domain_size})"


def majority_label(arr: np.ndarray) -> Label:
    """Most frequent label; ties go to the smallest code. Empty tensors give 0."""
    counts = np.bincount(arr.ravel().astype(np.int64), minlength=4)
    return Label(int(np.argmax(counts)))


def get_label(S: LStructure, name: str, t: Sequence[int]) -> Label:
    symbol = S.signature.symbol(name)
    t = tuple(int(x) for x in t)
    S._check_tuple(symbol, t)
    return S.overrides[name].get(t, S.defaults[name])


def empty_structure(signature: Signature, category: Category) -> LStructure:
    return LStructure(signature, category, 0, {name: Label.ZERO for name in signature.names})


def constant_structure(signature: Signature, category: Category, n: int, label: Label) -> LStructure:
    return LStructure(signature, category, n, {name: label for name in signature.names})


def induced_substructure(S: LStructure, subset: Iterable[int]) -> LStructure:
    """Restrict to ``subset``, relabeling it 0.. in increasing element order."""
    keep = sorted(set(int(x) for x in subset))
    for x in keep:
        if not 0 <= x < S.domain_size:
            raise ValidationError(f"element {x} out of range for domain of size {S.domain_size}")
    idx = np.array(keep, dtype=np.intp)
    arrays = {}
    for symbol in S.signature:
        arrays[symbol.name] = S.dense(symbol.name)[np.ix_(*([idx] * symbol.arity))]
    if not S.signature.symbols:
        return LStructure(S.signature, S.category, len(keep), {})
    return LStructure.from_dense(S.signature, S.category, arrays)


def delete_element(S: LStructure, x: int) -> LStructure:
    return induced_substructure(S, (y for y in S.elements if y != x))


def relabel(S: LStructure, perm: Sequence[int]) -> LStructure:
    """Isomorphic copy where old element ``perm[i]`` becomes ``i``."""
    idx = np.asarray(perm, dtype=np.intp)
    if sorted(idx.tolist()) != list(range(S.domain_size)):
        raise ValidationError("relabeling must be a permutation of the domain")
    arrays = {s.name: S.dense(s.name)[np.ix_(*([idx] * s.arity))] for s in S.signature}
    return LStructure.from_dense(S.signature, S.category, arrays) if arrays else S


def check_same_signature(G: LStructure, H: LStructure) -> None:
    if G.signature != H.signature:
        raise SignatureMismatch(f"signatures differ: [{G.signature}] vs [{H.signature}]")


def all_tuples(S: LStructure, name: str) -> Iterator[Tuple_]:
    return itertools.product(range(S.domain_size), repeat=S.signature.arity(name))


@dataclass(frozen=True)
class HomMap:
    """Total map from ``0..source_size-1`` into ``0..target_size-1``."""

    source_size: int
    target_size: int
    image: Tuple[int, ...]

    def __post_init__(self):
        image = tuple(int(x) for x in self.image)
        if len(image) != self.source_size:
            raise ValidationError(f"map must have {self.source_size} images, got {len(image)}")
        for x in image:
            if not 0 <= x < self.target_size:
                raise ValidationError(f"image {x} outside target of size {self.target_size}")
        object.__setattr__(self, "image", image)

    def __call__(self, x: int) -> int:
        return self.image[x]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.image, dtype=np.intp)

    def compose(self, after: "HomMap") -> "HomMap":
        """``after ∘ self``: apply this map first."""
        if after.source_size != self.target_size:
            raise ValidationError("maps are not composable")
        return HomMap(self.source_size, after.target_size, tuple(after.image[x] for x in self.image))

    def is_surjective(self) -> bool:
        return len(set(self.image)) == self.target_size

    def __str__(self) -> str:
        return " ".join(str(x) for x in self.image)


def identity_map(n: int) -> HomMap:
    return HomMap(n, n, tuple(range(n)))

