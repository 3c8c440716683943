"""Sylvester Hadamard matrices and monochromatic submatrix checks."""

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

import numpy as np

from .errors import CapExceeded, ValidationError

DEFAULT_MAX_K = 20


@dataclass(frozen=True, eq=False)
class HadamardMatrix:
    """±1 matrix of order 2^k with M·Mᵀ = order·I."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.int8)
        order = entries.shape[0]
        if order & (order - 1) or order == 0:
            raise ValidationError(f"order {order} is not a power of two")
        if not verify_hadamard(entries):
            raise ValidationError("matrix rows are not orthogonal")
        entries = entries.copy()
        entries.flags.writeable = False
        object.__setattr__(self, "entries", entries)

    @property
    def order(self) -> int:
        return self.entries.shape[0]

    def __getitem__(self, index):
        return self.entries[index]


def sylvester(k: int, max_k: int = DEFAULT_MAX_K) -> HadamardMatrix:
    if k < 0:
        raise ValidationError("k must be non-negative")
    if k > max_k:
        raise CapExceeded(f"sylvester order 2^{k} exceeds the guard 2^{max_k}")
    M = np.ones((1, 1), dtype=np.int8)
    for _ in range(k):
        M = np.block([[M, M], [M, -M]])
    return HadamardMatrix(M)


def _as_sign_matrix(M) -> np.ndarray:
    arr = np.asarray(M.entries if isinstance(M, HadamardMatrix) else M)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {arr.shape}")
    if not np.isin(arr, (-1, 1)).all():
        raise ValidationError("entries must be +1 or -1")
    return arr.astype(np.int64)


def verify_hadamard(M) -> bool:
    arr = _as_sign_matrix(M)
    n = arr.shape[0]
    return bool(np.array_equal(arr @ arr.T, n * np.eye(n, dtype=np.int64)))


def submatrix_monochromatic(M, rows: Iterable[int], cols: Iterable[int]) -> bool:
    arr = _as_sign_matrix(M)
    rows, cols = sorted(set(rows)), sorted(set(cols))
    for i in rows + cols:
        if not 0 <= i < arr.shape[0]:
            raise ValidationError(f"index {i} outside order {arr.shape[0]}")
    sub = arr[np.ix_(rows, cols)]
    return sub.size == 0 or bool((sub == sub.flat[0]).all())


def find_monochromatic_pair(M, size: int) -> Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """Disjoint row and column sets of ``size`` with a monochromatic submatrix.

    Scans every row set; the columns outside it on which the selected rows
    are constant are then exactly the usable column choices.
    """
    arr = _as_sign_matrix(M)
    n = arr.shape[0]
    if size < 1 or 2 * size > n:
        return None
    combos = np.array(list(itertools.combinations(range(n), size)), dtype=np.intp)
    sub = arr[combos]  # (combinations, size, n)
    inside = np.zeros((len(combos), n), dtype=bool)
    np.put_along_axis(inside, combos, True, axis=1)
    for sign in (1, -1):
        usable = (sub == sign).all(axis=1) & ~inside
        hits = np.flatnonzero(usable.sum(axis=1) >= size)
        if hits.size:
            i = int(hits[0])
            cols = tuple(int(c) for c in np.flatnonzero(usable[i])[:size])
            return tuple(int(r) for r in combos[i]), cols
    return None


def lemma_sizes(order: int) -> range:
    """Set sizes strictly above √order that still admit a disjoint pair."""
    return range(math.isqrt(order) + 1, order // 2 + 1)


def dump_grid(M) -> str:
    arr = _as_sign_matrix(M)
    return "\n".join("".join("+" if x > 0 else "-" for x in row) for row in arr) + "\n"
