"""Text format for labeled structures.

Example (K2 as a 01-graph)::

    category 01
    signature E/2
    domain 2
    default E 0
    E 0 1 = 1
    E 1 0 = 1

``#`` starts a comment. The header lines come first, in this order; default
and override lines may then appear in any order. Serialization is canonical:
each default is the symbol's majority label and overrides are sorted.
"""

from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from .errors import ParseError, ValidationError
from .labels import Category, Label
from .structures import LStructure, Signature, majority_label

PathLike = Union[str, Path]

_HEADER = ("category", "signature", "domain")


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _parse_label(token: str, category: Category, lineno: int) -> Label:
    try:
        label = Label.from_token(token)
    except ValidationError:
        raise ParseError(f"unknown label '{token}'", lineno)
    if not category.admits(label):
        raise ParseError(f"label '{token}' is not admitted by category {category.token}", lineno)
    return label


def _parse_header(lines) -> Tuple[Category, Signature, int]:
    values = {}
    for key in _HEADER:
        try:
            lineno, tokens = next(lines)
        except StopIteration:
            raise ParseError(f"missing '{key}' line")
        if tokens[0] != key:
            raise ParseError(f"expected '{key}', got '{tokens[0]}'", lineno)
        values[key] = (lineno, tokens[1:])

    lineno, rest = values["category"]
    if len(rest) != 1:
        raise ParseError("category line takes exactly one token", lineno)
    try:
        category = Category.from_token(rest[0])
    except ValidationError as e:
        raise ParseError(str(e), lineno)

    lineno, rest = values["signature"]
    try:
        signature = Signature.parse(" ".join(rest))
    except ValidationError as e:
        raise ParseError(str(e), lineno)

    lineno, rest = values["domain"]
    if len(rest) != 1 or not rest[0].isdigit():
        raise ParseError("domain line takes one non-negative integer", lineno)
    return category, signature, int(rest[0])


def parse_mps(text: str) -> LStructure:
    lines = _lines(text)
    category, signature, n = _parse_header(lines)
    defaults: Dict[str, Label] = {}
    overrides: Dict[str, Dict[Tuple[int, ...], Label]] = {name: {} for name in signature.names}

    for lineno, tokens in lines:
        if tokens[0] in _HEADER:
            raise ParseError(f"repeated or misplaced '{tokens[0]}' line", lineno)
        if tokens[0] == "default":
            if len(tokens) != 3:
                raise ParseError("expected 'default NAME LABEL'", lineno)
            name = tokens[1]
            if name not in overrides:
                raise ParseError(f"unknown symbol '{name}'", lineno)
            if name in defaults:
                raise ParseError(f"duplicate default for {name}", lineno)
            defaults[name] = _parse_label(tokens[2], category, lineno)
            continue

        name = tokens[0]
        if name not in overrides:
            raise ParseError(f"unknown symbol '{name}'", lineno)
        arity = signature.arity(name)
        if len(tokens) != arity + 3 or tokens[-2] != "=":
            raise ParseError(f"expected '{name}' followed by {arity} elements, '=' and a label", lineno)
        elements = tokens[1 : arity + 1]
        if not all(e.isdigit() for e in elements):
            raise ParseError("elements must be non-negative integers", lineno)
        t = tuple(int(e) for e in elements)
        if any(x >= n for x in t):
            raise ParseError(f"element out of range for domain of size {n}", lineno)
        if t in overrides[name]:
            raise ParseError(f"duplicate tuple {name} {' '.join(elements)}", lineno)
        overrides[name][t] = _parse_label(tokens[-1], category, lineno)

    missing = [name for name in signature.names if name not in defaults]
    if missing:
        raise ParseError(f"missing default line for {', '.join(missing)}")
    return LStructure(signature, category, n, defaults, overrides)


def serialize_mps(S: LStructure) -> str:
    lines = [
        f"category {S.category.token}",
        f"signature {S.signature}".rstrip(),
        f"domain {S.domain_size}",
    ]
    body: List[str] = []
    for symbol in S.signature:
        arr = S.dense(symbol.name)
        default = majority_label(arr)
        lines.append(f"default {symbol.name} {default.token}")
        for idx in np.argwhere(arr != default):
            elements = " ".join(str(int(x)) for x in idx)
            body.append(f"{symbol.name} {elements} = {Label(int(arr[tuple(idx)])).token}")
    return "\n".join(lines + body) + "\n"


def read_structure(path: PathLike) -> LStructure:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ValidationError(f"cannot read {path}: {e.strerror}")
    try:
        return parse_mps(text)
    except ParseError as e:
        raise ParseError(f"{path.name}: {e.reason}", e.line)


def write_structure(S: LStructure, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_mps(S))
    return path


def parse_matrix(text: str) -> np.ndarray:
    """Square matrix over 0, 1 and * given as whitespace-separated rows."""
    rows = list(_lines(text))
    n = len(rows)
    if n == 0:
        raise ParseError("matrix is empty")
    result = np.zeros((n, n), dtype=np.int8)
    for i, (lineno, tokens) in enumerate(rows):
        if len(tokens) != n:
            raise ParseError(f"row {i} has {len(tokens)} entries, expected {n}", lineno)
        for j, token in enumerate(tokens):
            result[i, j] = _parse_label(token, Category.CATSTAR, lineno)
    return result


def read_matrix(path: PathLike) -> np.ndarray:
    path = Path(path)
    try:
        return parse_matrix(path.read_text())
    except OSError as e:
        raise ValidationError(f"cannot read {path}: {e.strerror}")


def read_family(directory: PathLike, signature: Optional[Signature] = None) -> List[LStructure]:
    """Every ``*.mps`` file in a directory, in file name order."""
    directory = Path(directory)
    if not directory.is_dir():
        raise ValidationError(f"{directory} is not a directory")
    family = [read_structure(p) for p in sorted(directory.glob("*.mps"))]
    if signature is not None:
        for p, S in zip(sorted(directory.glob("*.mps")), family):
            if S.signature != signature:
                raise ValidationError(f"{p.name}: signature [{S.signature}] differs from [{signature}]")
    return family
