"""3-SAT to matrix partition with an oriented tree as the instance.

A formula is a conjunction of negated 3-conjunctions; each literal carries
a sign (1 = negated). A DIMACS clause (l1 v l2 v l3) is read as
¬(¬l1 ∧ ¬l2 ∧ ¬l3), so a positive DIMACS literal gets sign 1.

The instance T is a 01-tree: from a root r_T, every clause gets an oriented
path encoding its signs, one more edge, and the three variable paths of its
literals. The target H repeats this per clause, with one branch edge for
every assignment of the clause positions that satisfies the clause; each
variable path copy is tagged with its value, and the leaf endpoints of
copies of the same variable tagged 1 and 0 are joined by a 1-edge. Every
pair not mentioned is labeled 0, so a homomorphism has to respect
non-edges too.
"""

import itertools
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .errors import CapExceeded, NotAHomomorphism, ParseError, ValidationError
from .labels import Category, Label
from .partition import EDGE_SIGNATURE
from .solver import SolverOptions, find_homomorphism, is_homomorphism
from .structures import HomMap, LStructure

logger = logging.getLogger(__name__)

CLAUSE_PATH_VARS = 8
DEFAULT_SAT_MAX_VARS = 20


class ClauseLiteral(NamedTuple):
    var: int  # 1-based
    sign: int  # 1 = negated inside the conjunction


Clause = Tuple[ClauseLiteral, ClauseLiteral, ClauseLiteral]


@dataclass(frozen=True)
class Cnf3:
    num_vars: int
    clauses: Tuple[Clause, ...]

    def __post_init__(self):
        if self.num_vars < 0:
            raise ValidationError("number of variables must be non-negative")
        clauses = []
        for clause in self.clauses:
            if len(clause) != 3:
                raise ValidationError(f"clause {clause} has {len(clause)} literals, expected 3")
            lits = tuple(ClauseLiteral(int(v), int(s)) for v, s in clause)
            for lit in lits:
                if not 1 <= lit.var <= self.num_vars:
                    raise ValidationError(f"variable {lit.var} out of range 1..{self.num_vars}")
                if lit.sign not in (0, 1):
                    raise ValidationError(f"literal sign must be 0 or 1, got {lit.sign}")
            clauses.append(lits)
        object.__setattr__(self, "clauses", tuple(clauses))

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def satisfies(self, assignment: Sequence[int]) -> bool:
        if len(assignment) != self.num_vars:
            raise ValidationError(f"assignment needs {self.num_vars} values, got {len(assignment)}")
        return all(clause_satisfied(c, tuple(assignment[lit.var - 1] for lit in c)) for c in self.clauses)


def clause_satisfied(clause: Clause, values: Sequence[int]) -> bool:
    """¬(n1x1 ∧ n2x2 ∧ n3x3) holds unless every literal evaluates to true."""
    return not all((v ^ lit.sign) == 1 for lit, v in zip(clause, values))


def parse_dimacs(text: str) -> Cnf3:
    num_vars = None
    expected_clauses = 0
    literals: List[Tuple[int, int]] = []  # (literal, line)
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if num_vars is not None:
                raise ParseError("duplicate problem line", lineno)
            if len(parts) != 4 or parts[1] != "cnf" or not parts[2].isdigit() or not parts[3].isdigit():
                raise ParseError("malformed header, expected 'p cnf VARS CLAUSES'", lineno)
            num_vars, expected_clauses = int(parts[2]), int(parts[3])
            continue
        if num_vars is None:
            raise ParseError("clause before the 'p cnf' header", lineno)
        for token in line.split():
            try:
                literals.append((int(token), lineno))
            except ValueError:
                raise ParseError(f"invalid literal '{token}'", lineno)
    if num_vars is None:
        raise ParseError("missing 'p cnf' header")

    clauses: List[Clause] = []
    current: List[Tuple[int, int]] = []
    for lit, lineno in literals:
        if lit != 0:
            if abs(lit) > num_vars:
                raise ParseError(f"variable {abs(lit)} exceeds the declared {num_vars}", lineno)
            current.append((lit, lineno))
            continue
        if len(current) != 3:
            raise ParseError(f"clause has {len(current)} literals, expected 3", lineno)
        clauses.append(tuple(ClauseLiteral(abs(x), 1 if x > 0 else 0) for x, _ in current))
        current = []
    if current:
        raise ParseError("last clause is not terminated by 0", current[-1][1])
    if len(clauses) != expected_clauses:
        raise ParseError(f"header declares {expected_clauses} clauses, found {len(clauses)}")
    return Cnf3(num_vars, tuple(clauses))


def serialize_dimacs(formula: Cnf3) -> str:
    lines = [f"p cnf {formula.num_vars} {formula.num_clauses}"]
    for clause in formula.clauses:
        lines.append(" ".join(str(lit.var if lit.sign else -lit.var) for lit in clause) + " 0")
    return "\n".join(lines) + "\n"


def brute_force_sat(formula: Cnf3, max_vars: int = DEFAULT_SAT_MAX_VARS) -> Optional[Tuple[int, ...]]:
    """Lexicographically least satisfying assignment (x1 most significant), or None."""
    n = formula.num_vars
    if n > max_vars:
        raise CapExceeded(f"{n} variables exceed the brute-force cap of {max_vars}")
    codes = np.arange(2**n, dtype=np.int64)
    values = ((codes[:, None] >> np.arange(n - 1, -1, -1)) & 1).astype(np.int8)
    ok = np.ones(len(codes), dtype=bool)
    for clause in formula.clauses:
        all_true = np.ones(len(codes), dtype=bool)
        for lit in clause:
            all_true &= (values[:, lit.var - 1] ^ lit.sign) == 1
        ok &= ~all_true
    if not ok.any():
        return None
    return tuple(int(x) for x in values[int(np.argmax(ok))])


def random_cnf(rng: np.random.Generator, n: int, m: int, distinct: bool = True) -> Cnf3:
    if distinct and n < 3:
        raise ValidationError("three distinct variables per clause need n >= 3")
    if n < 1 and m > 0:
        raise ValidationError("clauses need at least one variable")
    clauses = []
    for _ in range(m):
        if distinct:
            variables = rng.choice(n, size=3, replace=False) + 1
        else:
            variables = rng.integers(1, n + 1, size=3)
        signs = rng.integers(0, 2, size=3)
        clauses.append(tuple(ClauseLiteral(int(v), int(s)) for v, s in zip(variables, signs)))
    return Cnf3(n, tuple(clauses))


@dataclass(frozen=True)
class OrientedPath:
    """Path on positions 0..num_vertices-1; each edge is a (tail, head) pair."""

    num_vertices: int
    edges: Tuple[Tuple[int, int], ...]

    @property
    def length(self) -> int:
        return len(self.edges)


def variable_path(i: int, n: int) -> OrientedPath:
    """n + 5 elements, all edges forward except the one between positions i and i + 1."""
    if not 1 <= i <= n:
        raise ValidationError(f"variable path index {i} out of range 1..{n}")
    edges = tuple((p + 1, p) if p == i else (p, p + 1) for p in range(n + 4))
    return OrientedPath(n + 5, edges)


def clause_path(n1: int, n2: int, n3: int) -> OrientedPath:
    for s in (n1, n2, n3):
        if s not in (0, 1):
            raise ValidationError(f"clause signs must be 0 or 1, got {(n1, n2, n3)}")
    return variable_path(4 * n1 + 2 * n2 + n3 + 1, CLAUSE_PATH_VARS)


def path_structure(path: OrientedPath) -> LStructure:
    arr = np.zeros((path.num_vertices,) * 2, dtype=np.int8)
    for a, b in path.edges:
        arr[a, b] = Label.ONE
    return LStructure.from_dense(EDGE_SIGNATURE, Category.CAT01, {"E": arr})


def clause_branches(clause: Clause) -> List[Tuple[int, int, int]]:
    """Value triples for the clause positions, consistent on repeated variables, that satisfy it."""
    branches = []
    for values in itertools.product((0, 1), repeat=3):
        seen: Dict[int, int] = {}
        if any(seen.setdefault(lit.var, v) != v for lit, v in zip(clause, values)):
            continue
        if clause_satisfied(clause, values):
            branches.append(values)
    return branches


def expected_sizes(formula: Cnf3) -> Tuple[int, int]:
    n = formula.num_vars
    tree = 1 + formula.num_clauses * (3 * n + 25)
    target = 1 + sum(12 + len(clause_branches(c)) * (3 * n + 13) for c in formula.clauses)
    return tree, target


@dataclass(frozen=True)
class ElementTag:
    side: str
    clause: Optional[int] = None
    branch: Optional[int] = None
    path: str = "root"
    literal: Optional[int] = None
    pos: int = 0
    value: Optional[int] = None

    def key(self) -> Tuple:
        return (self.clause, self.branch, self.path, self.literal, self.pos)

    def __str__(self) -> str:
        def show(x):
            return "-" if x is None else str(x)

        return (
            f"side={self.side} clause={show(self.clause)} branch={show(self.branch)} "
            f"path={self.path} literal={show(self.literal)} pos={self.pos} value={show(self.value)}"
        )


class _GadgetBuilder:
    def __init__(self, side: str):
        self.side = side
        self.tags: List[ElementTag] = []
        self.edges: List[Tuple[int, int]] = []

    def add(self, **fields) -> int:
        self.tags.append(ElementTag(self.side, **fields))
        return len(self.tags) - 1

    def attach(self, start: int, path: OrientedPath, /, **fields) -> List[int]:
        """Concatenate ``path`` with its left end identified with ``start``."""
        elements = [start] + [self.add(pos=p, **fields) for p in range(1, path.num_vertices)]
        self.edges.extend((elements[a], elements[b]) for a, b in path.edges)
        return elements

    def structure(self, category: Category) -> LStructure:
        n = len(self.tags)
        arr = np.zeros((n, n), dtype=np.int8)
        if self.edges:
            tails, heads = zip(*self.edges)
            arr[list(tails), list(heads)] = Label.ONE
        return LStructure.from_dense(EDGE_SIGNATURE, category, {"E": arr})


def _clause_spine(builder: _GadgetBuilder, root: int, c: int, clause: Clause) -> int:
    spine = builder.attach(root, clause_path(*(lit.sign for lit in clause)), clause=c, path="N")
    return spine[-1]


def build_instance_tree(formula: Cnf3) -> Tuple[LStructure, int, Tuple[ElementTag, ...]]:
    builder = _GadgetBuilder("T")
    root = builder.add()
    n = formula.num_vars
    for c, clause in enumerate(formula.clauses):
        end = _clause_spine(builder, root, c, clause)
        head = builder.add(clause=c, path="edge", pos=1)
        builder.edges.append((end, head))
        for l, lit in enumerate(clause, 1):
            builder.attach(head, variable_path(lit.var, n), clause=c, path=f"P{lit.var}", literal=l)
    return builder.structure(Category.CAT01), root, tuple(builder.tags)


def build_target(formula: Cnf3) -> Tuple[LStructure, int, Tuple[ElementTag, ...]]:
    builder = _GadgetBuilder("H")
    root = builder.add()
    n = formula.num_vars
    # endpoints[var][value] = leaf endpoints of the copies of P_var tagged value
    endpoints: Dict[int, Tuple[List[int], List[int]]] = {}
    for c, clause in enumerate(formula.clauses):
        end = _clause_spine(builder, root, c, clause)
        for b, values in enumerate(clause_branches(clause)):
            head = builder.add(clause=c, branch=b, path="edge", pos=1)
            builder.edges.append((end, head))
            for l, (lit, v) in enumerate(zip(clause, values), 1):
                copy = builder.attach(
                    head, variable_path(lit.var, n),
                    clause=c, branch=b, path=f"P{lit.var}", literal=l, value=v,
                )
                endpoints.setdefault(lit.var, ([], []))[v].append(copy[-1])
    for var in sorted(endpoints):
        zeros, ones = endpoints[var]
        builder.edges.extend(itertools.product(ones, zeros))
    return builder.structure(Category.CATSTAR), root, tuple(builder.tags)


@dataclass(frozen=True, eq=False)
class GadgetPair:
    formula: Cnf3
    instance_tree: LStructure
    target: LStructure
    root_T: int
    root_H: int
    tree_tags: Tuple[ElementTag, ...]
    target_tags: Tuple[ElementTag, ...]

    @cached_property
    def target_index(self) -> Dict[Tuple, int]:
        return {tag.key(): e for e, tag in enumerate(self.target_tags)}

    @cached_property
    def path_endpoints(self) -> Dict[Tuple[int, int, int], Tuple[int, int]]:
        """(clause, literal position, branch) -> (leaf endpoint, value) in H."""
        last = self.formula.num_vars + 4
        return {
            (tag.clause, tag.literal, tag.branch): (e, tag.value)
            for e, tag in enumerate(self.target_tags)
            if tag.literal is not None and tag.pos == last
        }

    @cached_property
    def tree_endpoints(self) -> Dict[Tuple[int, int], int]:
        """(clause, literal position) -> leaf endpoint in T."""
        last = self.formula.num_vars + 4
        return {
            (tag.clause, tag.literal): e
            for e, tag in enumerate(self.tree_tags)
            if tag.literal is not None and tag.pos == last
        }


def build_gadget(formula: Cnf3) -> GadgetPair:
    tree, root_t, tree_tags = build_instance_tree(formula)
    target, root_h, target_tags = build_target(formula)
    logger.info(
        "[satgadget] n=%d m=%d |T|=%d |H|=%d",
        formula.num_vars, formula.num_clauses, tree.domain_size, target.domain_size,
    )
    return GadgetPair(formula, tree, target, root_t, root_h, tree_tags, target_tags)


def is_oriented_tree(S: LStructure) -> bool:
    """The 1-labeled pairs form a tree without loops or opposite pairs."""
    arr = S.dense("E")
    if (np.diagonal(arr) == Label.ONE).any():
        return False
    ones = arr == Label.ONE
    if (ones & ones.T).any():
        return False
    graph = nx.DiGraph()
    graph.add_nodes_from(range(S.domain_size))
    graph.add_edges_from(map(tuple, np.argwhere(ones)))
    return S.domain_size > 0 and nx.is_tree(graph)


def assignment_to_hom(gadget: GadgetPair, assignment: Sequence[int]) -> HomMap:
    """Send each clause's subtree into the branch chosen by ``assignment``."""
    formula = gadget.formula
    if not formula.satisfies(assignment):
        raise ValidationError("assignment does not satisfy the formula")
    chosen = {}
    for c, clause in enumerate(formula.clauses):
        values = tuple(int(assignment[lit.var - 1]) for lit in clause)
        chosen[c] = clause_branches(clause).index(values)
    index = gadget.target_index
    image = []
    for tag in gadget.tree_tags:
        if tag.path == "root":
            image.append(gadget.root_H)
            continue
        branch = None if tag.path == "N" else chosen[tag.clause]
        image.append(index[(tag.clause, branch, tag.path, tag.literal, tag.pos)])
    return HomMap(gadget.instance_tree.domain_size, gadget.target.domain_size, tuple(image))


def hom_to_assignment(gadget: GadgetPair, h: HomMap) -> Tuple[int, ...]:
    """Read each variable's value off the tagged copies its paths land in; unused variables get 0."""
    if not is_homomorphism(gadget.instance_tree, gadget.target, h):
        raise NotAHomomorphism("map is not a homomorphism T -> H")
    values: Dict[int, int] = {}
    for (c, l), leaf in sorted(gadget.tree_endpoints.items()):
        var = gadget.formula.clauses[c][l - 1].var
        tag = gadget.target_tags[h(leaf)]
        if tag.value is None or tag.path != f"P{var}":
            raise ValidationError(f"endpoint of clause {c} literal {l} lands outside the copies of P{var}")
        if values.setdefault(var, tag.value) != tag.value:
            raise ValidationError(f"variable {var} gets both values")
    return tuple(values.get(v, 0) for v in range(1, gadget.formula.num_vars + 1))


@dataclass(frozen=True)
class ReductionReport:
    num_vars: int
    num_clauses: int
    sat: bool
    hom: bool
    root_check: Optional[bool]
    witness_check: Optional[bool]
    sizes: Tuple[int, int]
    expected: Tuple[int, int]

    @property
    def equivalent(self) -> bool:
        return self.sat == self.hom

    @property
    def size_check(self) -> bool:
        return self.sizes == self.expected

    @property
    def passed(self) -> bool:
        return self.equivalent and self.size_check and self.root_check is not False and self.witness_check is not False

    def to_text(self) -> str:
        def verdict(flag: Optional[bool]) -> str:
            return "vacuous" if flag is None else ("pass" if flag else "fail")

        def word(flag: bool) -> str:
            return "true" if flag else "false"

        return (
            f"formula vars={self.num_vars} clauses={self.num_clauses}\n"
            f"SAT={word(self.sat)} HOM={word(self.hom)} EQUIV={word(self.equivalent)}\n"
            f"root_check={verdict(self.root_check)}\n"
            f"witness_check={verdict(self.witness_check)}\n"
            f"size_check={verdict(self.size_check)} T={self.sizes[0]} H={self.sizes[1]} "
            f"expected_T={self.expected[0]} expected_H={self.expected[1]}\n"
        )


def verify_reduction(
    formula: Cnf3,
    options: Optional[SolverOptions] = None,
    max_vars: int = DEFAULT_SAT_MAX_VARS,
) -> ReductionReport:
    options = options or SolverOptions()
    assignment = brute_force_sat(formula, max_vars)
    gadget = build_gadget(formula)
    T, H = gadget.instance_tree, gadget.target
    witness = find_homomorphism(T, H, options)

    root_check = None
    witness_check = None
    if witness is not None:
        pinned = SolverOptions(
            order=options.order, lookahead=options.lookahead, timeout_secs=options.timeout_secs,
            pinned=((gadget.root_T, gadget.root_H),),
        )
        root_check = witness(gadget.root_T) == gadget.root_H and find_homomorphism(T, H, pinned) is not None
        witness_check = formula.satisfies(hom_to_assignment(gadget, witness))
    if assignment is not None:
        forward = is_homomorphism(T, H, assignment_to_hom(gadget, assignment))
        witness_check = forward if witness_check is None else (witness_check and forward)

    report = ReductionReport(
        formula.num_vars, formula.num_clauses, assignment is not None, witness is not None,
        root_check, witness_check, (T.domain_size, H.domain_size), expected_sizes(formula),
    )
    logger.info("[satgadget] SAT=%s HOM=%s", report.sat, report.hom)
    return report


def serialize_bookkeeping(gadget: GadgetPair) -> str:
    lines = [f"{e} {tag}" for e, tag in enumerate(gadget.tree_tags)]
    lines += [f"{e} {tag}" for e, tag in enumerate(gadget.target_tags)]
    return "\n".join(lines) + "\n"
