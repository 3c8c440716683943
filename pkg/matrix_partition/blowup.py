"""Replace ⋆ labels by Hadamard patterns over blocks of copies.

Every element g becomes a block V_g of ``block_size(m)`` copies. A tuple of
copies keeps the label of the underlying tuple unless that label is ⋆, in
which case it is read off the Hadamard matrix at the first two intra-block
indices. The blown-up 01-structure maps to a ⋆-structure H with at most m
elements iff the original does.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List

import numpy as np

from .errors import ParseError, ValidationError
from .hadamard import sylvester
from .labels import Category, Label
from .structures import HomMap, LStructure

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BlowupResult:
    structure: LStructure
    block_size: int
    projection: HomMap
    original: LStructure

    def block(self, g: int) -> range:
        return range(g * self.block_size, (g + 1) * self.block_size)


def block_size(m: int) -> int:
    """Smallest 2^k (k ≥ 1) with 2^k > 4m² + 1."""
    if m < 1:
        raise ValidationError("target size must be at least 1")
    k = 1
    while 2**k <= 4 * m * m + 1:
        k += 1
    return 2**k


def star_to_01(G: LStructure, target_size: int) -> BlowupResult:
    if G.category not in (Category.CAT01, Category.CATSTAR):
        raise ValidationError(f"blow-up expects a 01 or star structure, got {G.category.token}")
    for symbol in G.signature:
        if symbol.arity == 1 and (G.dense(symbol.name) == Label.STAR).any():
            raise ValidationError(f"unary symbol {symbol.name} carries a * label; the blow-up needs arity >= 2")
    b = block_size(target_size)
    hadamard = sylvester(b.bit_length() - 1)
    n = G.domain_size
    size = n * b
    owner = np.repeat(np.arange(n), b)
    offset = np.tile(np.arange(b), n)
    # (H[i, j] + 1) / 2 as a 0/1 label code
    pattern = ((hadamard.entries[np.ix_(offset, offset)].astype(np.int16) + 1) // 2).astype(np.int8)

    arrays = {}
    for symbol in G.signature:
        k = symbol.arity
        base = G.dense(symbol.name)[np.ix_(*([owner] * k))]
        if k == 1:
            arrays[symbol.name] = base
            continue
        hadamard_labels = pattern.reshape((size, size) + (1,) * (k - 2))
        arrays[symbol.name] = np.where(base == Label.STAR, hadamard_labels, base).astype(np.int8)
    if arrays:
        structure = LStructure.from_dense(G.signature, Category.CAT01, arrays)
    else:
        structure = LStructure(G.signature, Category.CAT01, size, {})
    projection = HomMap(size, n, tuple(int(g) for g in owner))
    logger.info("[blowup] %d elements -> %d (block size %d)", n, size, b)
    return BlowupResult(structure, b, projection, G)


def largest_image_share(result: BlowupResult, witness: HomMap) -> List[int]:
    """For each block, how many of its copies share the most common image."""
    images = witness.as_array().reshape(result.original.domain_size, result.block_size)
    return [int(np.bincount(row, minlength=witness.target_size).max()) for row in images]


def recover_homomorphism(result: BlowupResult, witness: HomMap) -> HomMap:
    """Map each element to the image most of its copies share (smallest on ties)."""
    if witness.source_size != result.structure.domain_size:
        raise ValidationError("witness does not start at the blown-up structure")
    n = result.original.domain_size
    images = witness.as_array().reshape(n, result.block_size)
    chosen = tuple(int(np.argmax(np.bincount(row, minlength=witness.target_size))) for row in images)
    return HomMap(n, witness.target_size, chosen)


def serialize_projection(projection: HomMap) -> str:
    return "".join(f"{x} -> {g}\n" for x, g in enumerate(projection.image))


def parse_projection(text: str, block_count: int) -> HomMap:
    pairs: Dict[int, int] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        left, arrow, right = line.partition("->")
        if not arrow or not left.strip().isdigit() or not right.strip().isdigit():
            raise ParseError("expected '<element> -> <block>'", lineno)
        x, g = int(left), int(right)
        if x in pairs:
            raise ParseError(f"element {x} listed twice", lineno)
        pairs[x] = g
    if sorted(pairs) != list(range(len(pairs))):
        raise ValidationError("projection must list elements 0..N-1")
    return HomMap(len(pairs), block_count, tuple(pairs[x] for x in range(len(pairs))))
