"""Tabular summaries over batteries of formulas and sweeps of targets."""

import glob
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .labels import Category
from .mps import serialize_mps
from .obstructions import hom_minimal_obstructions, inclusion_minimal_obstructions
from .satgadget import Cnf3, parse_dimacs, random_cnf, verify_reduction
from .solver import SolverOptions
from .structures import LStructure

logger = logging.getLogger(__name__)

# report field -> column title
BATTERY_COLUMNS = {
    "formula": "Formula",
    "vars": "Vars",
    "clauses": "Clauses",
    "sat": "SAT",
    "hom": "HOM",
    "equiv": "EQUIV",
    "root_check": "Root",
    "witness_check": "Witness",
    "size_T": "|T|",
    "size_H": "|H|",
    "size_check": "Sizes",
}

SWEEP_COLUMNS = {
    "target": "Target",
    "size": "|H|",
    "inclusion": "Inclusion-minimal",
    "hom": "Hom-minimal",
    "agree": "Agree",
}


def load_formulas(paths: Sequence[str]) -> List[Tuple[str, Cnf3]]:
    """Read DIMACS files; directories contribute every ``*.cnf`` inside, sorted."""
    formulas = []
    for path in paths:
        if os.path.isdir(path):
            files = sorted(glob.glob(os.path.join(path, "**", "*.cnf"), recursive=True))
            if not files:
                logger.warning("[battery] no .cnf files in %s", path)
        else:
            files = [path]
        for file_path in files:
            formulas.append((Path(file_path).name, parse_dimacs(Path(file_path).read_text())))
    return formulas


def random_formulas(seed: int, count: int, num_vars: int, num_clauses: int) -> List[Tuple[str, Cnf3]]:
    rng = np.random.default_rng(seed)
    distinct = num_vars >= 3
    return [
        (f"random-{seed}-{i}", random_cnf(rng, num_vars, num_clauses, distinct=distinct))
        for i in range(count)
    ]


def _check(flag: Optional[bool]) -> str:
    return "n/a" if flag is None else ("pass" if flag else "fail")


def run_battery(
    formulas: Sequence[Tuple[str, Cnf3]],
    options: Optional[SolverOptions] = None,
    max_vars: int = 20,
) -> pd.DataFrame:
    results: List[Dict[str, Any]] = []
    for name, formula in formulas:
        report = verify_reduction(formula, options, max_vars)
        results.append({
            "formula": name,
            "vars": report.num_vars,
            "clauses": report.num_clauses,
            "sat": report.sat,
            "hom": report.hom,
            "equiv": report.equivalent,
            "root_check": _check(report.root_check),
            "witness_check": _check(report.witness_check),
            "size_T": report.sizes[0],
            "size_H": report.sizes[1],
            "size_check": _check(report.size_check),
        })
        logger.info("[battery] %s: SAT=%s HOM=%s", name, report.sat, report.hom)
    return create_dataframe(results, BATTERY_COLUMNS)


def create_dataframe(results: List[Dict[str, Any]], columns: Dict[str, str]) -> pd.DataFrame:
    """Select the known fields, in table order, under their column titles."""
    if not results:
        return pd.DataFrame(columns=list(columns.values()))
    df = pd.DataFrame(results)
    existing = [col for col in columns if col in df.columns]
    return df[existing].rename(columns=columns)


def battery_failures(df: pd.DataFrame) -> pd.DataFrame:
    failed = ~df["EQUIV"]
    for col in ("Root", "Witness", "Sizes"):
        failed |= df[col] == "fail"
    return df[failed]


def obstruction_sweep(
    targets: Sequence[LStructure],
    category: Category,
    max_n: int,
    universe_bound: int,
    cap: int = 100_000_000,
    jobs: int = 1,
) -> pd.DataFrame:
    """Inclusion- and hom-minimal member counts per target, and whether the sets agree."""
    results = []
    for i, H in enumerate(targets):
        inc = inclusion_minimal_obstructions(H, category, max_n, cap, jobs)
        hom = hom_minimal_obstructions(H, category, max_n, universe_bound, cap, jobs)
        results.append({
            "target": serialize_mps(H).replace("\n", "; ").rstrip("; "),
            "size": H.domain_size,
            "inclusion": len(inc.members),
            "hom": len(hom.members),
            "agree": inc.members == hom.members,
        })
        logger.debug("[sweep] target %d: inc=%d hom=%d", i, len(inc.members), len(hom.members))
    return create_dataframe(results, SWEEP_COLUMNS)
