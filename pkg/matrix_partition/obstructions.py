"""Bounded obstruction sets and duality checks.

Everything here works inside a finite universe: the structures over a
signature and category with at most a given number of elements, one per
isomorphism class. Structures of one size are kept stacked in a single
tensor per symbol, so "does each of these map to X" is one vectorized test
over all candidate maps.
"""

import hashlib
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .canonical import all_permutations, canonical_form, cell_maps
from .cores import is_core
from .errors import CapExceeded, SignatureMismatch, ValidationError
from .labels import Category, Label, join_category
from .mps import serialize_mps
from .partition import is_trivial_target
from .solver import SolverOptions, hom_exists
from .structures import LStructure, Signature, check_same_signature, delete_element

logger = logging.getLogger(__name__)

DEFAULT_ENUMERATION_CAP = 100_000_000
_BATCH_CELLS = 1 << 22


@dataclass
class StructureStack:
    """Structures of one domain size stored as stacked label tensors."""

    signature: Signature
    category: Category
    size: int
    arrays: Dict[str, np.ndarray]

    def __len__(self) -> int:
        if not self.arrays:
            return 0
        return next(iter(self.arrays.values())).shape[0]

    def structure(self, i: int) -> LStructure:
        return LStructure.from_dense(
            self.signature, self.category, {name: arr[i] for name, arr in self.arrays.items()}
        )

    def structures(self) -> Iterator[LStructure]:
        for i in range(len(self)):
            yield self.structure(i)

    def select(self, mask: np.ndarray) -> "StructureStack":
        return StructureStack(
            self.signature, self.category, self.size, {name: arr[mask] for name, arr in self.arrays.items()}
        )

    def delete(self, v: int) -> "StructureStack":
        """Remove element ``v`` from every stacked structure."""
        keep = np.array([x for x in range(self.size) if x != v], dtype=np.intp)
        arrays = {}
        for symbol in self.signature:
            index = (slice(None),) + np.ix_(*([keep] * symbol.arity))
            arrays[symbol.name] = self.arrays[symbol.name][index]
        return StructureStack(self.signature, self.category, self.size - 1, arrays)


def _digits_count(signature: Signature, n: int) -> int:
    return sum(n**s.arity for s in signature)


def _canonical_keys(start: int, stop: int, base: int, cells: int, maps: np.ndarray) -> np.ndarray:
    codes = np.arange(start, stop, dtype=np.int64)
    powers = base ** np.arange(cells - 1, -1, -1, dtype=np.int64)
    rows = (codes[:, None] // powers[None, :]) % base
    permuted = rows[:, maps]  # (rows, perms, cells)
    return np.unique((permuted * powers).sum(axis=2).min(axis=1))


def _canonical_keys_task(task) -> np.ndarray:
    return _canonical_keys(*task)


def enumerate_stack(
    signature: Signature,
    n: int,
    category: Category,
    cap: int = DEFAULT_ENUMERATION_CAP,
    jobs: int = 1,
) -> StructureStack:
    """One representative per isomorphism class, in canonical order.

    Each representative is its own canonical relabeling.
    """
    if n < 0:
        raise ValidationError("domain size must be non-negative")
    if category == Category.CATCSP:
        raise ValidationError("enumeration covers the 01, star and empty categories")
    base = category.label_count
    cells = _digits_count(signature, n)
    total = base**cells
    if total > cap:
        raise CapExceeded(f"{total} labelings of size {n} exceed the enumeration cap of {cap}")
    maps = cell_maps(signature, n, all_permutations(n))
    chunk = max(1, _BATCH_CELLS // max(1, maps.size))
    tasks = [(s, min(total, s + chunk), base, cells, maps) for s in range(0, total, chunk)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_canonical_keys_task, tasks))
    else:
        parts = [_canonical_keys(*task) for task in tasks]
    keys = np.unique(np.concatenate(parts)) if parts else np.zeros(0, dtype=np.int64)

    powers = base ** np.arange(cells - 1, -1, -1, dtype=np.int64)
    rows = ((keys[:, None] // powers[None, :]) % base).astype(np.int8)
    arrays = {}
    offset = 0
    for symbol in signature:
        width = n**symbol.arity
        arrays[symbol.name] = rows[:, offset : offset + width].reshape((len(keys),) + (n,) * symbol.arity)
        offset += width
    logger.debug("[obstructions] size %d: %d labelings, %d classes", n, total, len(keys))
    return StructureStack(signature, category, n, arrays)


def enumerate_structures(
    signature: Signature, n: int, category: Category, cap: int = DEFAULT_ENUMERATION_CAP, jobs: int = 1
) -> Iterator[LStructure]:
    if n == 0:
        yield LStructure(signature, category, 0, {name: Label.ZERO for name in signature.names})
        return
    yield from enumerate_stack(signature, n, category, cap, jobs).structures()


def _comparison(stack: StructureStack, other: LStructure) -> Category:
    if stack.signature != other.signature:
        raise SignatureMismatch(f"signatures differ: [{stack.signature}] vs [{other.signature}]")
    return join_category(stack.category, other.category)


def _all_maps(n: int, m: int) -> np.ndarray:
    if n == 0:
        return np.zeros((1, 0), dtype=np.intp)
    codes = np.arange(m**n, dtype=np.int64)
    powers = m ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((codes[:, None] // powers[None, :]) % m).astype(np.intp)


def _map_index(maps: np.ndarray, k: int) -> Tuple[np.ndarray, ...]:
    c, n = maps.shape
    return tuple(maps.reshape((c,) + (1,) * d + (n,) + (1,) * (k - 1 - d)) for d in range(k))


def stack_maps_into(stack: StructureStack, target: LStructure) -> np.ndarray:
    """For every stacked structure, whether it maps into ``target``."""
    leq = _comparison(stack, target).leq_table
    count = len(stack)
    if stack.size == 0:
        return np.ones(count, dtype=bool)
    if target.domain_size == 0:
        return np.zeros(count, dtype=bool)
    maps = _all_maps(stack.size, target.domain_size)
    result = np.zeros(count, dtype=bool)
    per_item = maps.shape[0] * max(1, _digits_count(stack.signature, stack.size))
    step = max(1, _BATCH_CELLS // per_item)
    for lo in range(0, count, step):
        hi = min(count, lo + step)
        ok = np.ones((hi - lo, maps.shape[0]), dtype=bool)
        for symbol in stack.signature:
            image = target.dense(symbol.name)[_map_index(maps, symbol.arity)]  # (maps, s..s)
            labels = stack.arrays[symbol.name][lo:hi]
            fits = leq[labels[:, None], image[None]]
            ok &= fits.reshape(hi - lo, maps.shape[0], -1).all(axis=2)
        result[lo:hi] = ok.any(axis=1)
    return result


def stack_receives(source: LStructure, stack: StructureStack) -> np.ndarray:
    """For every stacked structure, whether ``source`` maps into it."""
    leq = _comparison(stack, source).leq_table
    count = len(stack)
    if source.domain_size == 0:
        return np.ones(count, dtype=bool)
    if stack.size == 0:
        return np.zeros(count, dtype=bool)
    maps = _all_maps(source.domain_size, stack.size)
    result = np.zeros(count, dtype=bool)
    per_item = maps.shape[0] * max(1, _digits_count(source.signature, source.domain_size))
    step = max(1, _BATCH_CELLS // per_item)
    for lo in range(0, count, step):
        hi = min(count, lo + step)
        ok = np.ones((hi - lo, maps.shape[0]), dtype=bool)
        for symbol in source.signature:
            image = stack.arrays[symbol.name][lo:hi][(slice(None),) + _map_index(maps, symbol.arity)]
            fits = leq[source.dense(symbol.name)[None, None], image]
            ok &= fits.reshape(hi - lo, maps.shape[0], -1).all(axis=2)
        result[lo:hi] = ok.any(axis=1)
    return result


@dataclass
class Universe:
    """All structures with 1..bound elements, grouped by size."""

    signature: Signature
    category: Category
    bound: int
    stacks: Dict[int, StructureStack]
    _into: Dict[Tuple[int, LStructure], np.ndarray] = field(default_factory=dict, repr=False)

    @classmethod
    def build(
        cls, signature: Signature, category: Category, bound: int,
        cap: int = DEFAULT_ENUMERATION_CAP, jobs: int = 1,
    ) -> "Universe":
        stacks = {s: enumerate_stack(signature, s, category, cap, jobs) for s in range(1, bound + 1)}
        return cls(signature, category, bound, stacks)

    def maps_into(self, size: int, target: LStructure) -> np.ndarray:
        key = (size, target)
        if key not in self._into:
            self._into[key] = stack_maps_into(self.stacks[size], target)
        return self._into[key]

    def __len__(self) -> int:
        return sum(len(s) for s in self.stacks.values())


class ObstructionMode(Enum):
    INCLUSION = "inc"
    HOM = "hom"


@dataclass(frozen=True)
class ObstructionReport:
    target: LStructure
    category: Category
    max_size: int
    mode: ObstructionMode
    universe_bound: Optional[int]
    members: Tuple[bytes, ...]
    structures: Tuple[LStructure, ...]
    trivial_target: bool = False

    def to_text(self) -> str:
        digest = hashlib.sha256(serialize_mps(self.target).encode()).hexdigest()
        lines = [
            "# obstruction report",
            f"target-sha256 {digest}",
            f"category {self.category.token}",
            f"mode {self.mode.value}",
            f"max-size {self.max_size}",
        ]
        if self.universe_bound is not None:
            lines.append(f"universe-bound {self.universe_bound}")
        if self.trivial_target:
            lines.append("trivial-target yes")
        lines.append(f"members {len(self.structures)}")
        text = "\n".join(lines) + "\n"
        for structure in self.structures:
            text += "\n" + serialize_mps(structure)
        return text


def is_inclusion_minimal_obstruction(
    G: LStructure, H: LStructure, options: Optional[SolverOptions] = None
) -> bool:
    """G ↛ H while every one-element deletion of G maps to H."""
    check_same_signature(G, H)
    if G.domain_size < 1 or hom_exists(G, H, options):
        return False
    return all(hom_exists(delete_element(G, v), H, options) for v in G.elements)


def hom_minimality_witness(
    G: LStructure,
    H: LStructure,
    universe_bound: int,
    universe: Optional[Universe] = None,
) -> Optional[LStructure]:
    """A structure strictly below G (G' → G, G ↛ G') that still fails to map to H."""
    universe = universe or Universe.build(G.signature, G.category, universe_bound)
    for size in range(1, min(universe_bound, universe.bound) + 1):
        stack = universe.stacks[size]
        bad = ~universe.maps_into(size, H)
        if not bad.any():
            continue
        bad &= stack_maps_into(stack, G)
        if not bad.any():
            continue
        bad &= ~stack_receives(G, stack)
        if bad.any():
            return stack.structure(int(np.argmax(bad)))
    return None


def is_hom_minimal_obstruction(
    G: LStructure,
    H: LStructure,
    universe_bound: int,
    universe: Optional[Universe] = None,
    options: Optional[SolverOptions] = None,
) -> bool:
    """G is a core, G ↛ H, and everything strictly below G inside the universe maps to H.

    Only certified relative to ``universe_bound``.
    """
    check_same_signature(G, H)
    if G.domain_size < 1 or hom_exists(G, H, options):
        return False
    if not is_core(G, options):
        return False
    return hom_minimality_witness(G, H, universe_bound, universe) is None


def _sorted_report(target, category, max_size, mode, bound, found: List[LStructure], trivial=False):
    forms = sorted((canonical_form(s), s) for s in found)
    return ObstructionReport(
        target, category, max_size, mode, bound,
        tuple(f for f, _ in forms), tuple(s for _, s in forms), trivial,
    )


def _inclusion_members(
    H: LStructure, category: Category, max_n: int, cap: int, jobs: int
) -> List[LStructure]:
    found = []
    for size in range(1, max_n + 1):
        stack = enumerate_stack(H.signature, size, category, cap, jobs)
        candidates = ~stack_maps_into(stack, H)
        for v in range(size):
            if not candidates.any():
                break
            candidates &= stack_maps_into(stack.delete(v), H)
        found.extend(stack.select(candidates).structures())
        logger.info("[obstructions] size %d: %d of %d are inclusion-minimal", size, int(candidates.sum()), len(stack))
    return found


def inclusion_minimal_obstructions(
    H: LStructure,
    category: Category,
    max_n: int,
    cap: int = DEFAULT_ENUMERATION_CAP,
    jobs: int = 1,
) -> ObstructionReport:
    mode = ObstructionMode.INCLUSION
    if is_trivial_target(H):
        logger.info("[obstructions] target is trivial, skipping enumeration")
        return _sorted_report(H, category, max_n, mode, None, [], trivial=True)
    return _sorted_report(H, category, max_n, mode, None, _inclusion_members(H, category, max_n, cap, jobs))


def hom_minimal_obstructions(
    H: LStructure,
    category: Category,
    max_n: int,
    universe_bound: int,
    cap: int = DEFAULT_ENUMERATION_CAP,
    jobs: int = 1,
    options: Optional[SolverOptions] = None,
) -> ObstructionReport:
    mode = ObstructionMode.HOM
    if is_trivial_target(H):
        logger.info("[obstructions] target is trivial, skipping enumeration")
        return _sorted_report(H, category, max_n, mode, universe_bound, [], trivial=True)
    if universe_bound >= max_n - 1:
        # inside such a universe every hom-minimal obstruction is inclusion-minimal
        candidates = _inclusion_members(H, category, max_n, cap, jobs)
    else:
        candidates = [
            S for size in range(1, max_n + 1)
            for S in enumerate_stack(H.signature, size, category, cap, jobs).structures()
        ]
    universe = Universe.build(H.signature, category, universe_bound, cap, jobs)
    found = [G for G in candidates if is_hom_minimal_obstruction(G, H, universe_bound, universe, options)]
    logger.info("[obstructions] %d of %d candidates are hom-minimal", len(found), len(candidates))
    return _sorted_report(H, category, max_n, mode, universe_bound, found)


@dataclass(frozen=True)
class DualityResult:
    holds: bool
    counterexample: Optional[LStructure] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.holds


def duality_holds(
    family: Sequence[LStructure],
    H: LStructure,
    category: Category,
    max_n: int,
    cap: int = DEFAULT_ENUMERATION_CAP,
    jobs: int = 1,
) -> DualityResult:
    """Check G ↛ H ⟺ (some F in the family maps to G) for all G with 1..max_n elements."""
    for F in family:
        check_same_signature(F, H)
        if hom_exists(F, H):
            return DualityResult(False, F, "family member maps to the target")
    for size in range(1, max_n + 1):
        stack = enumerate_stack(H.signature, size, category, cap, jobs)
        fails = ~stack_maps_into(stack, H)
        covered = np.zeros(len(stack), dtype=bool)
        for F in family:
            covered |= stack_receives(F, stack)
        mismatch = fails != covered
        if mismatch.any():
            i = int(np.argmax(mismatch))
            reason = "not covered by the family" if fails[i] else "covered but maps to the target"
            return DualityResult(False, stack.structure(i), reason)
    return DualityResult(True, reason=f"holds up to size {max_n}")


def odd_cycle_empty(n: int) -> LStructure:
    """Directed cycle of 1-edges on n elements; every other pair, loops included, is ∅."""
    if n < 1:
        raise ValidationError("cycle length must be at least 1")
    arr = np.full((n, n), Label.EMPTY, dtype=np.int8)
    idx = np.arange(n)
    arr[idx, (idx + 1) % n] = Label.ONE
    return LStructure.from_dense(Signature.of(("E", 2)), Category.CATEMPTY, {"E": arr})


def two_vertex_star_counterexample(H: LStructure, x: int = 0) -> Tuple[LStructure, LStructure]:
    """Two elements with loops E^H(x, x) and ⋆ both ways, plus the copy with E(v, u) = 0.

    The first is inclusion-minimal for a 01-graph H but not hom-minimal;
    the second sits strictly below it and still fails to map to H.
    """
    if H.signature != Signature.of(("E", 2)):
        raise ValidationError("the two-vertex counterexample is defined for graphs")
    loop = H.label("E", (x, x))
    arr = np.array([[loop, Label.STAR], [Label.STAR, loop]], dtype=np.int8)
    G = LStructure.from_dense(H.signature, Category.CATSTAR, {"E": arr})
    weakened = arr.copy()
    weakened[1, 0] = Label.ZERO
    return G, LStructure.from_dense(H.signature, Category.CATSTAR, {"E": weakened})


def nontrivial_targets(signature: Signature, category: Category, max_size: int) -> List[LStructure]:
    """Targets with 1..max_size elements up to isomorphism, trivial ones left out."""
    return [
        H
        for size in range(1, max_size + 1)
        for H in enumerate_structures(signature, size, category)
        if not is_trivial_target(H)
    ]
