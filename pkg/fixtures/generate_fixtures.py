#!/usr/bin/env python3
"""Regenerate the structure and formula fixtures in this directory, then the
golden CLI outputs under tests/golden from their .args files.

Usage: python fixtures/generate_fixtures.py
"""

import contextlib
import io
import os
import shlex
import tempfile

import numpy as np

from matrix_partition.arity import pack_structure
from matrix_partition.cli import main
from matrix_partition.encodings import to_csp
from matrix_partition.labels import Category, Label
from matrix_partition.mps import write_structure
from matrix_partition.obstructions import inclusion_minimal_obstructions, odd_cycle_empty
from matrix_partition.partition import EDGE_SIGNATURE
from matrix_partition.satgadget import ClauseLiteral, Cnf3, serialize_dimacs
from matrix_partition.structures import LStructure, Signature

output_dir = os.path.dirname(os.path.abspath(__file__))
root_dir = os.path.dirname(output_dir)
golden_dir = os.path.join(root_dir, "tests", "golden")


def graph(category, rows):
    return LStructure.from_dense(EDGE_SIGNATURE, category, {"E": np.array(rows, dtype=np.int8)})


def formula(num_vars, *clauses):
    """Clauses in DIMACS literals; a positive literal has sign 1."""
    return Cnf3(num_vars, tuple(tuple(ClauseLiteral(abs(x), int(x > 0)) for x in c) for c in clauses))


structures = {
    "K1": graph(Category.CAT01, [[0]]),
    "K2": graph(Category.CAT01, [[0, 1], [1, 0]]),
    "two_loops": graph(Category.CAT01, [[0, 0], [0, 0]]),
    "C3": odd_cycle_empty(3),
    "C4": odd_cycle_empty(4),
    "C5": odd_cycle_empty(5),
    "star_loop": graph(Category.CATSTAR, [[Label.STAR]]),
    "mixed": graph(Category.CATEMPTY, [[Label.ZERO, Label.STAR], [Label.ONE, Label.EMPTY]]),
    "RS": LStructure.from_dense(
        Signature.parse("R/2 S/1"),
        Category.CATSTAR,
        {"R": np.array([[0, Label.STAR], [1, 0]], dtype=np.int8), "S": np.array([1, 0], dtype=np.int8)},
    ),
}
structures["mixed_csp"] = to_csp(structures["mixed"])
structures["RS_packed"] = pack_structure(structures["RS"])


formulas = {
    "sat1": ("not(x1 and x2 and x3)", formula(3, (-1, -2, -3))),
    "sat2": (None, formula(3, (1, -2, 3), (-1, 2, -3))),
    "unsat2": ("x1 forced false by the first clause, true by the second", formula(1, (-1, -1, -1), (1, 1, 1))),
    "unsat3": ("x1 forced true, then x2 must be both false and true", formula(2, (1, 1, 1), (-1, -2, -2), (-1, 2, 2))),
}

obstruction_names = {1: ["loop"], 2: ["arc", "digon"]}

for name, structure in structures.items():
    write_structure(structure, os.path.join(output_dir, f"{name}.mps"))

for name, (comment, phi) in formulas.items():
    with open(os.path.join(output_dir, f"{name}.cnf"), "w") as f:
        if comment:
            f.write(f"c {comment}\n")
        f.write(serialize_dimacs(phi))

with open(os.path.join(output_dir, "split.matrix"), "w") as f:
    f.write("0 *\n* 1\n")

report = inclusion_minimal_obstructions(structures["K1"], Category.CAT01, 3)
family_dir = os.path.join(output_dir, "obstructions_K1")
os.makedirs(family_dir, exist_ok=True)
by_size = {}
for member in report.structures:
    by_size.setdefault(member.domain_size, []).append(member)
for size, members in by_size.items():
    # canonical order: the arc's labeling sorts before the digon's
    for name, member in zip(obstruction_names[size], members):
        write_structure(member, os.path.join(family_dir, f"{name}.mps"))

print(f"Wrote {len(structures)} structures, {len(formulas)} formulas and {len(report.structures)} obstructions")

# golden CLI outputs: line 1 of each .args file holds the arguments, line 2 the exit code
os.chdir(root_dir)
goldens = sorted(name for name in os.listdir(golden_dir) if name.endswith(".args"))
for name in goldens:
    args_path = os.path.join(golden_dir, name)
    with open(args_path) as f:
        arg_line = f.readline().rstrip("\n")
    stdout = io.StringIO()
    with tempfile.TemporaryDirectory() as tmp:
        args = [arg.replace("{tmp}", tmp) for arg in shlex.split(arg_line)]
        with contextlib.redirect_stdout(stdout):
            code = main(args)
    with open(args_path, "w") as f:
        f.write(f"{arg_line}\n{code}\n")
    with open(args_path[: -len(".args")] + ".out", "w") as f:
        f.write(stdout.getvalue())

print(f"Wrote {len(goldens)} golden CLI outputs")
