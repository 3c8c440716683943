"""Command-line interface.

Usage:
    mpart solve G.mps H.mps [--all | --brute-force]
    mpart obstructions H.mps --cat 01 --max-size 3 --mode hom --universe-bound 3
    mpart sat verify formula.cnf

Results go to stdout, diagnostics to stderr. Exit codes: 0 yes/success,
1 no/property fails, 2 usage or validation error, 3 resource cap exceeded.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .arity import (
    NoCertificate,
    binary_to_many_instance,
    binary_to_many_target,
    classify_packed_tuple,
    many_to_binary_instance,
    pack_structure,
    unpack_instance,
)
from .blowup import serialize_projection, star_to_01
from .config import Settings, load_settings
from .cores import core_with_retraction
from .encodings import from_csp, to_csp
from .errors import CapExceeded, MatrixPartitionError, ValidationError
from .hadamard import dump_grid, sylvester
from .labels import Category
from .mps import read_family, read_matrix, read_structure, serialize_mps, write_structure
from .obstructions import duality_holds, hom_minimal_obstructions, inclusion_minimal_obstructions
from .partition import has_matrix_partition, is_trivial_target
from .reports import battery_failures, load_formulas, random_formulas, run_battery
from .satgadget import build_gadget, parse_dimacs, serialize_bookkeeping, verify_reduction
from .solver import SolverOptions, enumerate_homomorphisms, find_homomorphism, first_map_bruteforce
from .structures import Signature

logger = logging.getLogger("matrix_partition")

EXIT_YES = 0
EXIT_NO = 1


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") or not text else text + "\n")


def _options(settings: Settings, **kwargs) -> SolverOptions:
    return SolverOptions.from_settings(settings, **kwargs)


def _read_cnf(path: str):
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ValidationError(f"cannot read {path}: {e.strerror}")
    return parse_dimacs(text)


def cmd_solve(args, settings: Settings) -> int:
    G, H = read_structure(args.instance), read_structure(args.target)
    if args.all:
        count = 0
        for h in enumerate_homomorphisms(G, H, _options(settings, order="static")):
            _emit(f"witness: {h}")
            count += 1
        _emit(f"count: {count}")
        return EXIT_YES if count else EXIT_NO
    if args.brute_force:
        h = first_map_bruteforce(G, H, settings.max_maps)
    else:
        h = find_homomorphism(G, H, _options(settings, order=args.order))
    if h is None:
        _emit("hom: no")
        return EXIT_NO
    _emit(f"hom: yes\nwitness: {h}")
    return EXIT_YES


def cmd_core(args, settings: Settings) -> int:
    core, kept = core_with_retraction(read_structure(args.structure), _options(settings), settings.max_maps)
    _emit(f"# kept: {' '.join(map(str, kept))}\n" + serialize_mps(core))
    return EXIT_YES


def cmd_trivial(args, settings: Settings) -> int:
    trivial = is_trivial_target(read_structure(args.target))
    _emit(f"trivial: {'yes' if trivial else 'no'}")
    return EXIT_YES if trivial else EXIT_NO


def cmd_encode_csp(args, settings: Settings) -> int:
    _emit(serialize_mps(to_csp(read_structure(args.structure))))
    return EXIT_YES


def cmd_decode_csp(args, settings: Settings) -> int:
    _emit(serialize_mps(from_csp(read_structure(args.structure))))
    return EXIT_YES


def cmd_hadamard(args, settings: Settings) -> int:
    _emit(dump_grid(sylvester(args.k, settings.sylvester_max_k)))
    return EXIT_YES


def cmd_blowup(args, settings: Settings) -> int:
    G = read_structure(args.instance)
    size = read_structure(args.target).domain_size if args.target else args.target_size
    result = star_to_01(G, size)
    if args.projection:
        Path(args.projection).write_text(serialize_projection(result.projection))
    _emit(serialize_mps(result.structure))
    return EXIT_YES


def cmd_arity_pack(args, settings: Settings) -> int:
    _emit(serialize_mps(pack_structure(read_structure(args.structure))))
    return EXIT_YES


def cmd_arity_unpack(args, settings: Settings) -> int:
    result = unpack_instance(read_structure(args.instance), Signature.parse(args.signature))
    if isinstance(result, NoCertificate):
        _emit(str(result))
        return EXIT_NO
    _emit(serialize_mps(result))
    return EXIT_YES


def cmd_arity_classify(args, settings: Settings) -> int:
    tag = classify_packed_tuple(args.elements, Signature.parse(args.signature), args.marker)
    _emit(str(tag))
    return EXIT_YES


def cmd_b2m(args, settings: Settings) -> int:
    S = read_structure(args.structure)
    sigma = Signature.parse(args.signature)
    rewrite = binary_to_many_target if args.side == "target" else binary_to_many_instance
    _emit(serialize_mps(rewrite(S, sigma)))
    return EXIT_YES


def cmd_m2b(args, settings: Settings) -> int:
    _emit(serialize_mps(many_to_binary_instance(read_structure(args.structure), args.arity)))
    return EXIT_YES


def cmd_obstructions(args, settings: Settings) -> int:
    H = read_structure(args.target)
    category = Category.from_token(args.cat)
    if args.max_size > settings.canonical_max_size:
        raise CapExceeded(f"--max-size {args.max_size} exceeds canonical_max_size {settings.canonical_max_size}")
    if args.mode == "hom":
        bound = args.universe_bound if args.universe_bound is not None else args.max_size
        report = hom_minimal_obstructions(
            H, category, args.max_size, bound, settings.enumeration_cap, settings.jobs, _options(settings)
        )
    else:
        report = inclusion_minimal_obstructions(H, category, args.max_size, settings.enumeration_cap, settings.jobs)
    text = report.to_text()
    if args.out:
        Path(args.out).write_text(text)
    _emit(text)
    return EXIT_YES


def cmd_duality(args, settings: Settings) -> int:
    H = read_structure(args.target)
    family = read_family(args.family, H.signature)
    result = duality_holds(
        family, H, Category.from_token(args.cat), args.max_size, settings.enumeration_cap, settings.jobs
    )
    if result:
        _emit(f"duality: holds up to size {args.max_size}")
        return EXIT_YES
    _emit(f"duality: fails ({result.reason})\n" + serialize_mps(result.counterexample))
    return EXIT_NO


def cmd_mpartition(args, settings: Settings) -> int:
    h = has_matrix_partition(
        read_structure(args.instance), read_matrix(args.matrix), args.loopless, _options(settings)
    )
    if h is None:
        _emit("partition: no")
        return EXIT_NO
    _emit(f"partition: yes\nparts: {h}")
    return EXIT_YES


def cmd_sat_build(args, settings: Settings) -> int:
    gadget = build_gadget(_read_cnf(args.formula))
    out = Path(args.out)
    write_structure(gadget.instance_tree, out / "T.mps")
    write_structure(gadget.target, out / "H.mps")
    (out / "bookkeeping.txt").write_text(serialize_bookkeeping(gadget))
    _emit(
        f"T.mps elements={gadget.instance_tree.domain_size} root={gadget.root_T}\n"
        f"H.mps elements={gadget.target.domain_size} root={gadget.root_H}\n"
        "bookkeeping.txt"
    )
    return EXIT_YES


def cmd_sat_verify(args, settings: Settings) -> int:
    report = verify_reduction(_read_cnf(args.formula), _options(settings), settings.sat_max_vars)
    _emit(report.to_text())
    return EXIT_YES if report.passed else EXIT_NO


def cmd_sat_battery(args, settings: Settings) -> int:
    formulas = load_formulas(args.paths)
    if args.random:
        formulas += random_formulas(args.seed, args.random, args.vars, args.clauses)
    if not formulas:
        raise ValidationError("no formulas given")
    df = run_battery(formulas, _options(settings), settings.sat_max_vars)
    _emit(df.to_string(index=False))
    failures = battery_failures(df)
    _emit(f"formulas: {len(df)} failures: {len(failures)}")
    return EXIT_YES if failures.empty else EXIT_NO


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mpart", description="Matrix partition toolkit")
    parser.add_argument("--config", type=Path, help="YAML settings file")
    parser.add_argument("--max-maps", type=int, help="cap on brute-force map enumeration")
    parser.add_argument("--timeout-secs", type=float, help="solver wall-clock limit")
    parser.add_argument("--jobs", type=int, help="worker processes")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="errors only")
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = commands.add_parser("solve", help="decide G -> H")
    p.add_argument("instance")
    p.add_argument("target")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--all", action="store_true", help="list every homomorphism")
    mode.add_argument("--brute-force", action="store_true", help="exhaustive enumeration")
    p.add_argument("--order", choices=["mrv", "static"], default="mrv")
    p.set_defaults(handler=cmd_solve)

    p = commands.add_parser("core", help="core of a structure")
    p.add_argument("structure")
    p.set_defaults(handler=cmd_core)

    p = commands.add_parser("trivial", help="does some element absorb everything")
    p.add_argument("target")
    p.set_defaults(handler=cmd_trivial)

    p = commands.add_parser("encode-csp", help="empty-structure to doubled relational structure")
    p.add_argument("structure")
    p.set_defaults(handler=cmd_encode_csp)

    p = commands.add_parser("decode-csp", help="doubled relational structure to empty-structure")
    p.add_argument("structure")
    p.set_defaults(handler=cmd_decode_csp)

    p = commands.add_parser("hadamard", help="Sylvester matrix of order 2^K")
    p.add_argument("k", type=int, metavar="K")
    p.set_defaults(handler=cmd_hadamard)

    p = commands.add_parser("blowup", help="replace * labels by Hadamard blocks")
    p.add_argument("instance")
    size = p.add_mutually_exclusive_group(required=True)
    size.add_argument("--target-size", type=int)
    size.add_argument("--target", help="target structure; its size is used")
    p.add_argument("--projection", help="write the block projection here")
    p.set_defaults(handler=cmd_blowup)

    arity = commands.add_parser("arity", help="packing into one relation").add_subparsers(
        dest="arity_command", required=True, metavar="ACTION"
    )
    p = arity.add_parser("pack")
    p.add_argument("structure")
    p.set_defaults(handler=cmd_arity_pack)
    p = arity.add_parser("unpack")
    p.add_argument("instance")
    p.add_argument("--signature", required=True, help='base signature, e.g. "R/2 S/1"')
    p.set_defaults(handler=cmd_arity_unpack)
    p = arity.add_parser("classify")
    p.add_argument("--signature", required=True)
    p.add_argument("--marker", type=int, required=True)
    p.add_argument("elements", type=int, nargs="+")
    p.set_defaults(handler=cmd_arity_classify)

    p = commands.add_parser("b2m", help="binary signature to a richer one")
    p.add_argument("side", choices=["target", "instance"])
    p.add_argument("structure")
    p.add_argument("--signature", required=True)
    p.set_defaults(handler=cmd_b2m)

    m2b = commands.add_parser("m2b", help="richer signature to binary").add_subparsers(
        dest="m2b_command", required=True, metavar="ACTION"
    )
    p = m2b.add_parser("instance")
    p.add_argument("structure")
    p.add_argument("--arity", type=int, default=2)
    p.set_defaults(handler=cmd_m2b)

    p = commands.add_parser("obstructions", help="bounded obstruction sets")
    p.add_argument("target")
    p.add_argument("--cat", required=True, choices=["01", "star", "empty"])
    p.add_argument("--max-size", type=int, required=True)
    p.add_argument("--mode", choices=["inc", "hom"], default="inc")
    p.add_argument("--universe-bound", type=int)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_obstructions)

    p = commands.add_parser("duality", help="check a duality set within a bound")
    p.add_argument("target")
    p.add_argument("--family", required=True, help="directory of .mps files")
    p.add_argument("--max-size", type=int, required=True)
    p.add_argument("--cat", choices=["01", "star", "empty"], default="01")
    p.set_defaults(handler=cmd_duality)

    p = commands.add_parser("mpartition", help="M-partition of a graph")
    p.add_argument("instance")
    p.add_argument("--matrix", required=True)
    p.add_argument("--loopless", action="store_true")
    p.set_defaults(handler=cmd_mpartition)

    sat = commands.add_parser("sat", help="3-SAT gadget").add_subparsers(
        dest="sat_command", required=True, metavar="ACTION"
    )
    p = sat.add_parser("build")
    p.add_argument("formula")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_sat_build)
    p = sat.add_parser("verify")
    p.add_argument("formula")
    p.set_defaults(handler=cmd_sat_verify)
    p = sat.add_parser("battery")
    p.add_argument("paths", nargs="*")
    p.add_argument("--random", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--vars", type=int, default=3)
    p.add_argument("--clauses", type=int, default=2)
    p.set_defaults(handler=cmd_sat_battery)
    return parser


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = logging.DEBUG if verbose else (logging.ERROR if quiet else logging.WARNING)
    logging.basicConfig(level=level, format="%(message)s", stream=sys.stderr, force=True)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code is None else int(e.code)
    configure_logging(args.verbose, args.quiet)
    logger.debug("[cli] command %s", args.command)
    try:
        settings = load_settings(
            args.config,
            overrides={"max_maps": args.max_maps, "timeout_secs": args.timeout_secs, "jobs": args.jobs},
        )
        return args.handler(args, settings)
    except MatrixPartitionError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
