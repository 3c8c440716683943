"""Cores, retractions and homomorphic equivalence."""

import itertools
import logging
from typing import Optional, Tuple

import numpy as np

from .errors import CapExceeded
from .solver import DEFAULT_MAX_MAPS, HomSolver, SolverOptions, hom_exists
from .structures import HomMap, LStructure, induced_substructure

logger = logging.getLogger(__name__)


def endomorphism_avoiding(
    S: LStructure, x: int, options: Optional[SolverOptions] = None
) -> Optional[HomMap]:
    """Least endomorphism whose image misses element ``x``, if any."""
    n = S.domain_size
    if n <= 1:
        return None
    domains = np.ones((n, n), dtype=bool)
    domains[:, x] = False
    return HomSolver(S, S, options, initial_domains=domains).find()


def is_core(S: LStructure, options: Optional[SolverOptions] = None) -> bool:
    # a bijective endomorphism of a finite structure is an automorphism,
    # so only non-surjective ones need to be ruled out
    return all(endomorphism_avoiding(S, x, options) is None for x in S.elements)


def core_size(S: LStructure, options: Optional[SolverOptions] = None) -> int:
    """Size of the core, by retracting until no endomorphism avoids an element."""
    current = S
    while True:
        for x in current.elements:
            h = endomorphism_avoiding(current, x, options)
            if h is not None:
                break
        else:
            return current.domain_size
        image = sorted(set(h.image))
        logger.debug("[core] retract %d -> %d elements", current.domain_size, len(image))
        current = induced_substructure(current, image)


def core_with_retraction(
    S: LStructure, options: Optional[SolverOptions] = None, max_maps: int = DEFAULT_MAX_MAPS
) -> Tuple[LStructure, Tuple[int, ...]]:
    """The core on the lexicographically least element set that S retracts onto.

    Any endomorphism whose image fits in a set of core size has exactly that
    set as image, so the first such set in lexicographic order is taken.
    Returns the core and the original elements it keeps.
    """
    n = S.domain_size
    if n**n > max_maps:
        raise CapExceeded(f"{n**n} candidate endomorphisms exceed the cap of {max_maps}")
    k = core_size(S, options)
    if k == S.domain_size:
        return S, tuple(S.elements)
    for subset in itertools.combinations(S.elements, k):
        domains = np.zeros((S.domain_size,) * 2, dtype=bool)
        domains[:, list(subset)] = True
        if HomSolver(S, S, options, initial_domains=domains).find() is not None:
            return induced_substructure(S, subset), subset
    raise AssertionError("no retract of core size")


def core_of(
    S: LStructure, options: Optional[SolverOptions] = None, max_maps: int = DEFAULT_MAX_MAPS
) -> LStructure:
    return core_with_retraction(S, options, max_maps)[0]


def hom_equivalent(G: LStructure, H: LStructure, options: Optional[SolverOptions] = None) -> bool:
    return hom_exists(G, H, options) and hom_exists(H, G, options)
