"""Homomorphism checking, backtracking search and the brute-force oracle.

The search keeps a boolean domain matrix ``dom[x, a]`` (source element x may
still map to target element a). Unary and diagonal constraints are applied
once up front; after each assignment the binary constraints prune every row
in one vectorized step, and tuples of higher arity are forward checked once
a single coordinate is left open.
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterator, List, Optional, Tuple

import numpy as np

from .errors import CapExceeded, SearchTimeout, ValidationError
from .labels import Category, join_category
from .structures import HomMap, LStructure, check_same_signature

logger = logging.getLogger(__name__)

DEFAULT_MAX_MAPS = 10_000_000
# below this many candidate maps, hom_exists enumerates instead of searching
BRUTE_FORCE_AUTO_LIMIT = 4096
_CHUNK_CELLS = 1 << 21


@dataclass(frozen=True)
class SolverOptions:
    order: str = "mrv"  # "mrv" or "static"
    lookahead: bool = True
    timeout_secs: Optional[float] = None
    jobs: int = 1
    pinned: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.order not in ("mrv", "static"):
            raise ValidationError(f"unknown variable order '{self.order}'")
        if self.jobs < 1:
            raise ValidationError("jobs must be >= 1")

    @classmethod
    def from_settings(cls, settings, **kwargs) -> "SolverOptions":
        return cls(
            lookahead=settings.lookahead,
            timeout_secs=settings.timeout_secs,
            jobs=settings.jobs,
            **kwargs,
        )


def comparison_category(G: LStructure, H: LStructure) -> Category:
    check_same_signature(G, H)
    return join_category(G.category, H.category)


def is_homomorphism(G: LStructure, H: LStructure, h: HomMap) -> bool:
    """Check R^G(t) ⪯ R^H(h(t)) for every symbol and every tuple, loops included."""
    cat = comparison_category(G, H)
    if h.source_size != G.domain_size or h.target_size != H.domain_size:
        raise ValidationError(
            f"map {h.source_size}->{h.target_size} does not fit structures "
            f"{G.domain_size}->{H.domain_size}"
        )
    if G.domain_size == 0:
        return True
    leq = cat.leq_table
    idx = h.as_array()
    for symbol in G.signature:
        image = H.dense(symbol.name)[np.ix_(*([idx] * symbol.arity))]
        if not leq[G.dense(symbol.name), image].all():
            return False
    return True


def _maps_block(start: int, stop: int, n: int, m: int) -> np.ndarray:
    """Maps number start..stop-1 in lexicographic order, one row each."""
    codes = np.arange(start, stop, dtype=np.int64)
    powers = m ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (codes[:, None] // powers[None, :]) % m


def check_maps(G: LStructure, H: LStructure, maps: np.ndarray, cat: Category) -> np.ndarray:
    """Vectorized homomorphism test of every row of ``maps``."""
    c, n = maps.shape
    ok = np.ones(c, dtype=bool)
    leq = cat.leq_table
    for symbol in G.signature:
        k = symbol.arity
        index = tuple(maps.reshape((c,) + (1,) * d + (n,) + (1,) * (k - 1 - d)) for d in range(k))
        image = H.dense(symbol.name)[index]
        ok &= leq[G.dense(symbol.name)[None], image].reshape(c, -1).all(axis=1)
    return ok


def first_map_bruteforce(
    G: LStructure, H: LStructure, max_maps: int = DEFAULT_MAX_MAPS
) -> Optional[HomMap]:
    """Lexicographically least homomorphism by exhaustive enumeration."""
    cat = comparison_category(G, H)
    n, m = G.domain_size, H.domain_size
    if n == 0:
        return HomMap(0, m, ())
    if m == 0:
        return None
    total = m**n
    if total > max_maps:
        raise CapExceeded(f"{total} candidate maps exceed the cap of {max_maps}")
    chunk = max(1, _CHUNK_CELLS // max(1, n ** max(1, G.signature.max_arity)))
    for start in range(0, total, chunk):
        maps = _maps_block(start, min(total, start + chunk), n, m)
        ok = check_maps(G, H, maps, cat)
        if ok.any():
            return HomMap(n, m, tuple(int(x) for x in maps[int(np.argmax(ok))]))
    return None


def hom_exists_bruteforce(G: LStructure, H: LStructure, max_maps: int = DEFAULT_MAX_MAPS) -> bool:
    return first_map_bruteforce(G, H, max_maps) is not None


class HomSolver:
    """Backtracking search for homomorphisms G → H.

    Args:
        G: Source structure.
        H: Target structure over the same signature.
        options: Variable order, lookahead, deadline, parallelism and pins.
        initial_domains: Optional ``(|G|, |H|)`` boolean mask of allowed images.
    """

    def __init__(
        self,
        G: LStructure,
        H: LStructure,
        options: Optional[SolverOptions] = None,
        initial_domains: Optional[np.ndarray] = None,
    ):
        self.G = G
        self.H = H
        self.options = options or SolverOptions()
        self.category = comparison_category(G, H)
        self.initial_domains = initial_domains
        self.nodes = 0
        self._deadline = None

        n, m = G.domain_size, H.domain_size
        self._n, self._m = n, m
        self._arange = np.arange(m)
        leq = self.category.leq_table
        domains = np.ones((n, m), dtype=bool)
        if initial_domains is not None:
            mask = np.asarray(initial_domains, dtype=bool)
            if mask.shape != (n, m):
                raise ValidationError(f"initial domains must have shape {(n, m)}")
            domains &= mask

        self._binary: List[Tuple[np.ndarray, np.ndarray, np.ndarray]] = []
        self._by_var: List[List[Tuple[Tuple[int, ...], np.ndarray]]] = [[] for _ in range(n)]
        for symbol in G.signature:
            if n == 0 or m == 0:
                break
            g = G.dense(symbol.name)
            diag_g = G.diagonal(symbol.name)
            diag_h = H.diagonal(symbol.name)
            domains &= leq[diag_g[:, None], diag_h[None, :]]
            if symbol.arity == 1:
                continue
            # compat[l, a, b, ...] is true iff label l ⪯ R^H(a, b, ...)
            compat = leq[:, H.dense(symbol.name)]
            if symbol.arity == 2:
                self._binary.append((g, compat, compat.transpose(0, 2, 1)))
                continue
            unconstrained = compat.reshape(4, -1).all(axis=1)
            for t in np.argwhere(~unconstrained[g]):
                t = tuple(int(x) for x in t)
                if len(set(t)) == 1:
                    continue
                entry = (t, compat[g[t]])
                for v in set(t):
                    self._by_var[v].append(entry)
        self._initial = domains
        logger.debug(
            "[solver] n=%d m=%d binary=%d higher-tuples=%d",
            n, m, len(self._binary), sum(len(x) for x in self._by_var),
        )

    def _tick(self) -> None:
        self.nodes += 1
        if self._deadline is not None and self.nodes % 256 == 1 and time.monotonic() >= self._deadline:
            raise SearchTimeout(
                f"search exceeded {self.options.timeout_secs}s after {self.nodes} nodes"
            )

    def _assign(self, dom: np.ndarray, assign: np.ndarray, x: int, a: int) -> bool:
        """Set x := a, propagate, and report whether the state is still consistent."""
        lookahead = self.options.lookahead
        assign[x] = a
        dom[x] = False
        dom[x, a] = True
        assigned = np.flatnonzero(assign >= 0)

        for g, out, inn in self._binary:
            mask = out[g[x, :], a, :] & inn[g[:, x], a, :]
            if lookahead:
                dom &= mask
            elif not mask[assigned, assign[assigned]].all():
                return False

        for t, table in self._by_var[x]:
            free = [v for v in dict.fromkeys(t) if assign[v] < 0]
            if not free:
                if not table[tuple(int(assign[v]) for v in t)]:
                    return False
            elif lookahead and len(free) == 1:
                y = free[0]
                index = tuple(self._arange if v == y else int(assign[v]) for v in t)
                dom[y] &= table[index]

        if lookahead:
            if not dom[assigned, assign[assigned]].all():
                return False
            if not dom[assign < 0].any(axis=1).all():
                return False
        return True

    def _choose(self, dom: np.ndarray, free: np.ndarray) -> int:
        if self.options.order == "static":
            return int(free[0])
        counts = dom[free].sum(axis=1)
        return int(free[int(np.argmin(counts))])

    def _root_state(self) -> Optional[Tuple[np.ndarray, np.ndarray]]:
        dom = self._initial.copy()
        assign = np.full(self._n, -1, dtype=np.intp)
        if self._n and not dom.any(axis=1).all():
            return None
        for x, a in self.options.pinned:
            if not (0 <= x < self._n and 0 <= a < self._m):
                raise ValidationError(f"pin {x}->{a} out of range")
            if not dom[x, a] or not self._assign(dom, assign, x, a):
                return None
        return dom, assign

    def _search(self, dom: np.ndarray, assign: np.ndarray) -> Iterator[HomMap]:
        self._tick()
        free = np.flatnonzero(assign < 0)
        if free.size == 0:
            yield HomMap(self._n, self._m, tuple(int(a) for a in assign))
            return
        x = self._choose(dom, free)
        for a in np.flatnonzero(dom[x]):
            next_dom = dom.copy()
            next_assign = assign.copy()
            if self._assign(next_dom, next_assign, x, int(a)):
                yield from self._search(next_dom, next_assign)

    def solutions(self) -> Iterator[HomMap]:
        if self.options.timeout_secs is not None:
            self._deadline = time.monotonic() + self.options.timeout_secs
        state = self._root_state()
        if state is None:
            return
        yield from self._search(*state)

    def find(self) -> Optional[HomMap]:
        if self.options.jobs > 1:
            result = self._find_parallel()
        else:
            result = next(self.solutions(), None)
        logger.debug("[solver] %s after %d nodes", "found" if result else "none", self.nodes)
        return result

    def _find_parallel(self) -> Optional[HomMap]:
        state = self._root_state()
        if state is None:
            return None
        dom, assign = state
        free = np.flatnonzero(assign < 0)
        if free.size == 0:
            return HomMap(self._n, self._m, tuple(int(a) for a in assign))
        x = self._choose(dom, free)
        tasks = [
            (self.G, self.H, replace(self.options, jobs=1, pinned=self.options.pinned + ((x, int(a)),)),
             self.initial_domains)
            for a in np.flatnonzero(dom[x])
        ]
        logger.info("[solver] splitting on element %d into %d branches", x, len(tasks))
        with ProcessPoolExecutor(max_workers=self.options.jobs) as pool:
            results = list(pool.map(_solve_branch, tasks))
        # least branch value wins, exactly as in sequential order
        return next((r for r in results if r is not None), None)


def _solve_branch(task) -> Optional[HomMap]:
    G, H, options, initial_domains = task
    return HomSolver(G, H, options, initial_domains).find()


def find_homomorphism(
    G: LStructure, H: LStructure, options: Optional[SolverOptions] = None
) -> Optional[HomMap]:
    return HomSolver(G, H, options).find()


def enumerate_homomorphisms(
    G: LStructure, H: LStructure, options: Optional[SolverOptions] = None
) -> Iterator[HomMap]:
    """Every homomorphism exactly once, in lexicographic order of the image."""
    options = replace(options or SolverOptions(), order="static", jobs=1)
    return HomSolver(G, H, options).solutions()


def hom_exists(G: LStructure, H: LStructure, options: Optional[SolverOptions] = None) -> bool:
    """Decide G → H, enumerating directly when the map space is tiny."""
    comparison_category(G, H)
    n, m = G.domain_size, H.domain_size
    if n == 0:
        return True
    if m == 0:
        return False
    if m**n <= BRUTE_FORCE_AUTO_LIMIT:
        return first_map_bruteforce(G, H, BRUTE_FORCE_AUTO_LIMIT) is not None
    return find_homomorphism(G, H, options) is not None
