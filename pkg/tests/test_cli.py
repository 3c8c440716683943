import shlex

import pytest

from conftest import FIXTURES, ROOT

from matrix_partition.cli import main
from matrix_partition.mps import read_structure, serialize_mps
from matrix_partition.satgadget import expected_sizes, parse_dimacs

GOLDEN_PATHS = sorted((ROOT / "tests" / "golden").glob("*.args"))


@pytest.fixture(params=GOLDEN_PATHS, ids=lambda p: p.stem)
def golden(request):
    args_path = request.param
    with args_path.open() as f:
        args = shlex.split(next(f))
        code = int(next(f))
    return args, code, args_path.with_suffix(".out").read_text()


def test_golden(golden, capsys, monkeypatch, tmp_path):
    args, code, output = golden
    args = [arg.replace("{tmp}", str(tmp_path)) for arg in args]
    monkeypatch.chdir(ROOT)
    # a second run must reproduce the same bytes
    for _ in range(2):
        assert main(args) == code
        assert capsys.readouterr().out == output


def test_errors_go_to_stderr(capsys):
    assert main(["trivial", str(FIXTURES / "missing.mps")]) == 2
    captured = capsys.readouterr()
    assert captured.out == ""
    assert captured.err.startswith("error: cannot read")


def test_sat_build(tmp_path, capsys):
    formula = FIXTURES / "sat2.cnf"
    assert main(["sat", "build", str(formula), "--out", str(tmp_path)]) == 0
    T = read_structure(tmp_path / "T.mps")
    H = read_structure(tmp_path / "H.mps")
    assert (T.domain_size, H.domain_size) == expected_sizes(parse_dimacs(formula.read_text()))
    bookkeeping = (tmp_path / "bookkeeping.txt").read_text().splitlines()
    assert len(bookkeeping) == T.domain_size + H.domain_size
    out = capsys.readouterr().out.splitlines()
    assert out == [f"T.mps elements={T.domain_size} root=0", f"H.mps elements={H.domain_size} root=0", "bookkeeping.txt"]


def test_sat_build_files_are_reproducible(tmp_path, capsys):
    formula = str(FIXTURES / "sat1.cnf")
    first, second = tmp_path / "first", tmp_path / "second"
    assert main(["sat", "build", formula, "--out", str(first)]) == 0
    assert main(["sat", "build", formula, "--out", str(second)]) == 0
    capsys.readouterr()
    for name in ("T.mps", "H.mps", "bookkeeping.txt"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_blowup_writes_projection(tmp_path, capsys):
    projection = tmp_path / "proj.txt"
    args = ["blowup", str(FIXTURES / "K1.mps"), "--target", str(FIXTURES / "K2.mps"), "--projection", str(projection)]
    assert main(args) == 0
    out = capsys.readouterr().out
    assert out.startswith("category 01\nsignature E/2\ndomain 32\n")
    assert projection.read_text().splitlines()[-1] == "31 -> 0"


def test_pack_then_unpack(tmp_path, capsys):
    assert main(["arity", "pack", str(FIXTURES / "K2.mps")]) == 0
    packed = tmp_path / "packed.mps"
    packed.write_text(capsys.readouterr().out)
    assert main(["arity", "unpack", str(packed), "--signature", "E/2 U/1"]) == 2
    assert "error:" in capsys.readouterr().err


def test_unpack_no_certificate(tmp_path, capsys):
    star = tmp_path / "star.mps"
    star.write_text("category star\nsignature R/3\ndomain 1\ndefault R *\n")
    assert main(["arity", "unpack", str(star), "--signature", "R/2 S/2"]) == 1
    assert capsys.readouterr().out == "no-certificate: star-loop\n"


def test_binary_rewrites_round_trip(tmp_path, capsys):
    assert main(["b2m", "instance", str(FIXTURES / "K2.mps"), "--signature", "R/3 S/1"]) == 0
    lifted = tmp_path / "lifted.mps"
    lifted.write_text(capsys.readouterr().out)
    assert main(["m2b", "instance", str(lifted)]) == 0
    K2 = read_structure(FIXTURES / "K2.mps")
    assert capsys.readouterr().out == serialize_mps(K2).replace("category 01", "category star")


def test_obstructions_report_file(tmp_path, capsys):
    out = tmp_path / "report.txt"
    args = ["obstructions", str(FIXTURES / "K1.mps"), "--cat", "01", "--max-size", "3", "--mode", "hom", "--out", str(out)]
    assert main(args) == 0
    text = out.read_text()
    assert capsys.readouterr().out == text
    assert "universe-bound 3\nmembers 3\n" in text


def test_duality_failure_prints_counterexample(tmp_path, capsys):
    family = tmp_path / "family"
    family.mkdir()
    args = ["duality", str(FIXTURES / "K1.mps"), "--family", str(family), "--max-size", "2"]
    assert main(args) == 1
    assert capsys.readouterr().out.startswith("duality: fails (not covered by the family)\ncategory 01\n")


def test_global_flags(capsys):
    assert main(["--timeout-secs", "5", "--jobs", "1", "-q", "hadamard", "0"]) == 0
    assert capsys.readouterr().out == "+\n"
    assert main(["--max-maps", "1", "solve", str(FIXTURES / "C4.mps"), str(FIXTURES / "K2.mps"), "--brute-force"]) == 3
    assert main(["-v", "-q", "hadamard", "0"]) == 2


def test_sat_battery(capsys):
    assert main(["sat", "battery", str(FIXTURES), "--random", "2", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    assert "random-1-1" in out
    assert out.splitlines()[-1] == "formulas: 6 failures: 0"
