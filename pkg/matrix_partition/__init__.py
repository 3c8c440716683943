"""Matrix partition toolkit: labeled structures, homomorphisms and the reductions between them."""

from .errors import CapExceeded, MatrixPartitionError, ParseError, SearchTimeout, ValidationError
from .labels import Category, Label
from .mps import parse_mps, serialize_mps
from .solver import SolverOptions, find_homomorphism, hom_exists, is_homomorphism
from .structures import HomMap, LStructure, Signature

__version__ = "0.1.0"
