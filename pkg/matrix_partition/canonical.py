"""Canonical forms by exhaustive permutation minimization.

A structure's labeling is flattened symbol by symbol (declaration order,
each tensor in C order). Relabeling the domain permutes these cells; the
canonical form is the lexicographically least flattened labeling over all
relabelings, prefixed by category, signature and size.
"""

import itertools
from typing import Tuple

import numpy as np

from .errors import CapExceeded
from .structures import LStructure, Signature, relabel

DEFAULT_MAX_SIZE = 8


def all_permutations(n: int) -> np.ndarray:
    if n == 0:
        return np.zeros((1, 0), dtype=np.intp)
    return np.array(list(itertools.permutations(range(n))), dtype=np.intp).reshape(-1, n)


def cell_maps(signature: Signature, n: int, perms: np.ndarray) -> np.ndarray:
    """``maps[i, c]`` is the cell whose label lands in cell c under ``perms[i]``.

    Relabeling by q sends the tuple (q[t1], ..., q[tk]) to (t1, ..., tk).
    """
    p = perms.shape[0]
    parts = []
    offset = 0
    for symbol in signature:
        k = symbol.arity
        cells = np.arange(n**k, dtype=np.intp).reshape((n,) * k)
        index = tuple(perms.reshape((p,) + (1,) * d + (n,) + (1,) * (k - 1 - d)) for d in range(k))
        parts.append(cells[index].reshape(p, -1) + offset)
        offset += n**k
    if not parts:
        return np.zeros((p, 0), dtype=np.intp)
    return np.concatenate(parts, axis=1)


def flat_labels(S: LStructure) -> np.ndarray:
    parts = [S.dense(name).ravel() for name in S.signature.names]
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int8)


def header(signature: Signature, category, n: int) -> bytes:
    return f"{category.token}|{signature}|{n}|".encode()


def _least_row(rows: np.ndarray) -> int:
    if rows.shape[1] == 0:
        return 0
    return int(np.lexsort(rows.T[::-1])[0])


def _canonical_perm(S: LStructure, max_size: int) -> Tuple[np.ndarray, np.ndarray]:
    n = S.domain_size
    if n > max_size:
        raise CapExceeded(f"canonical form needs domain size <= {max_size}, got {n}")
    perms = all_permutations(n)
    rows = flat_labels(S)[cell_maps(S.signature, n, perms)]
    best = _least_row(rows)
    return perms[best], rows[best]


def canonical_form(S: LStructure, max_size: int = DEFAULT_MAX_SIZE) -> bytes:
    prefix = header(S.signature, S.category, S.domain_size)
    if S.domain_size == 0:
        return prefix + b"empty"
    _, row = _canonical_perm(S, max_size)
    return prefix + row.astype(np.uint8).tobytes()


def canonical_structure(S: LStructure, max_size: int = DEFAULT_MAX_SIZE) -> LStructure:
    """The isomorphic copy whose labeling is the canonical one."""
    if S.domain_size == 0:
        return S
    perm, _ = _canonical_perm(S, max_size)
    return relabel(S, perm)


def is_isomorphic(G: LStructure, H: LStructure, max_size: int = DEFAULT_MAX_SIZE) -> bool:
    if (G.signature, G.category, G.domain_size) != (H.signature, H.category, H.domain_size):
        return False
    return canonical_form(G, max_size) == canonical_form(H, max_size)
