import json
import subprocess
import sys
from fractions import Fraction as Fr
from pathlib import Path

import pytest

from wconformal import io
from wconformal.cli import BAD_INPUT, OK, VIOLATIONS, main
from wconformal.cohomology import gamma_cochain, linear_map_cochain
from wconformal.deformation import trivial_first_order
from wconformal.reduced import QuadraticForm, ReducedSpace

from .spaces import SU2, levi_civita, non_lie

GOLDEN = Path(__file__).parent / "golden"

SU2_SPACE = {"grades": [{"dim": 1, "fields": ["X1", "X2", "X3"]}]}
SU2_F = [
    {"A": "X1", "B": "X2", "C": "X3", "value": "1"},
    {"A": "X2", "B": "X3", "C": "X1", "value": "1"},
    {"A": "X3", "B": "X1", "C": "X2", "value": "1"},
]
NON_LIE_F = [
    {"A": "X1", "B": "X2", "C": "X1", "value": "1"},
    {"A": "X2", "B": "X3", "C": "X2", "value": "1"},
    {"A": "X1", "B": "X3", "C": "X3", "value": "1"},
]


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        p = tmp_path / name
        p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(p)

    return write


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_ymatrix_golden(capsys):
    code, out, _ = run(capsys, "ymatrix", "--a", 2, "--b", 2, "--c", 2, "--n", 1, "--eps-limit")
    assert code == OK
    assert out == (GOLDEN / "ymatrix_222_n1.json").read_text()
    assert json.loads(out)["entries"] == [["-1/2", "-1/2"], ["3/2", "-1/2"]]


@pytest.mark.parametrize("method", ["closed", "recursive", "oracle"])
def test_ymatrix_methods_agree(capsys, method):
    _, out, _ = run(capsys, "ymatrix", "--a", 3, "--b", 2, "--c", 2, "--n", 2, "--eps", "limit", "--method", method)
    _, ref, _ = run(capsys, "ymatrix", "--a", 3, "--b", 2, "--c", 2, "--n", 2, "--eps", "limit")
    assert out == ref


def test_ymatrix_pole_reported(capsys):
    _, out, _ = run(capsys, "ymatrix", "--a", 2, "--b", 2, "--c", 2, "--n", 4, "--eps", "limit")
    flat = [x for row in json.loads(out)["entries"] for x in row]
    assert any(isinstance(x, dict) and "pole" in x for x in flat)


def test_out_flag_is_byte_stable(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert run(capsys, "zmatrix", "--dims", "2,2,2", "--perm", "2,3,1", "--n", 2, "--eps", "laurent", "--out", p)[0] == OK
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().endswith("}\n")


def test_zmatrix_bad_perm(capsys):
    code, _, err = run(capsys, "zmatrix", "--dims", "2,2,2", "--perm", "1,1,2")
    assert code == BAD_INPUT and "permutation" in err


def test_lambda_and_tbasis(capsys):
    assert json.loads(run(capsys, "lambda", "--a", 2, "--b", 2, "--c", 2)[1]) == {"(0,1)": "-2", "(1,0)": "2"}
    basis = json.loads(run(capsys, "tbasis", "--dims", "2,2,2", "--e", 2)[1])
    assert [b["m"] for b in basis] == [[0, 2], [1, 1], [2, 0]]


def test_constraints_check_exit_codes(capsys, files):
    space = files("space.json", SU2_SPACE)
    code, out, _ = run(capsys, "constraints", "check", "--space", space, "--f", files("f.json", SU2_F))
    assert code == OK and json.loads(out)["violations"] == []
    code, out, _ = run(capsys, "constraints", "check", "--space", space, "--f", files("nl.json", NON_LIE_F))
    assert code == VIOLATIONS and len(json.loads(out)["violations"]) == 18


def test_constraints_roundtrip(capsys, files, tmp_path):
    space = files("space.json", SU2_SPACE)
    gen = tmp_path / "cons.json"
    assert run(capsys, "constraints", "generate", "--space", space, "--out", gen)[0] == OK
    text = gen.read_text()
    assert io.dumps(io.constraints_json(io.parse_constraints(text))) == text
    code, _, _ = run(capsys, "constraints", "check", "--space", space, "--f", files("nl.json", NON_LIE_F), "--constraints", gen)
    assert code == VIOLATIONS


def test_invariance_and_gram(capsys, files):
    space = files("space.json", SU2_SPACE)
    f = files("f.json", SU2_F)
    ident = files("id.json", {"1": [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]})
    skew = files("g.json", {"1": [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "2"]]})
    assert run(capsys, "invariance", "check", "--space", space, "--f", f, "--gram", ident)[0] == OK
    assert run(capsys, "invariance", "check", "--space", space, "--f", f, "--gram", skew)[0] == VIOLATIONS
    assert run(capsys, "gram", "check", "--gram", ident)[0] == OK
    code, out, _ = run(capsys, "gram", "check", "--gram", files("neg.json", {"1": [["1", "0"], ["0", "-1"]]}))
    assert code == VIOLATIONS and json.loads(out)["witness"]["vector"] == ["0", "1"]


@pytest.mark.parametrize(
    "payload,needle",
    [
        ({"grades": [{"dim": 0, "fields": ["I"]}]}, "unitarity bound"),
        ({"grades": [{"dim": 1, "fields": ["X", "X"]}]}, "duplicate"),
        ({"grade": []}, "grades"),
        ("{not json", "JSON"),
    ],
)
def test_bad_space(capsys, files, payload, needle):
    code, _, err = run(capsys, "constraints", "generate", "--space", files("bad.json", payload))
    assert code == BAD_INPUT and needle in err


def test_bad_structure_constants(capsys, files):
    space = files("space.json", {"grades": [{"dim": 1, "fields": ["X1", "X2"]}, {"dim": 3, "fields": ["W"]}]})
    unknown = files("u.json", [{"A": "X1", "B": "Y", "C": "X2", "value": "1"}])
    wrong_grade = files("w.json", [{"A": "X1", "B": "X2", "C": "W", "value": "1"}])
    conflict = files("c.json", [{"A": "X1", "B": "X2", "C": "X1", "value": "1"}, {"A": "X2", "B": "X1", "C": "X1", "value": "1"}])
    floaty = files("fl.json", [{"A": "X1", "B": "X2", "C": "X1", "value": 0.5}])
    for f in (unknown, wrong_grade, conflict, floaty):
        assert run(capsys, "constraints", "check", "--space", space, "--f", f)[0] == BAD_INPUT


def test_missing_file(capsys):
    code, _, err = run(capsys, "gram", "check", "--gram", "/nonexistent/g.json")
    assert code == BAD_INPUT and "cannot read" in err


def test_cohomology_commands(capsys, files):
    space = files("space.json", SU2_SPACE)
    code, out, _ = run(capsys, "cohomology", "dims", "--space", space, "--f", files("f.json", SU2_F), "--degree", 2)
    assert json.loads(out) == {"dimB": 6, "dimC": 9, "dimRLH": 0, "dimZ": 6}
    code, out, _ = run(capsys, "cohomology", "bb-test", "--space", space, "--f", files("f.json", SU2_F), "--degree", 1, "--seed", 3)
    assert code == OK and json.loads(out)["pass"]
    code, out, _ = run(capsys, "cohomology", "bb-test", "--space", space, "--f", files("nl.json", NON_LIE_F), "--degree", 1)
    assert code == VIOLATIONS and json.loads(out)["offending"]["labels"] == ["X1", "X2", "X3"]


def test_deform_commands(capsys, files):
    space = files("space.json", SU2_SPACE)
    f = files("f.json", SU2_F)
    q = linear_map_cochain(SU2, {"X1": {"X2": Fr(1)}, "X3": {"X3": Fr(2)}})
    g1 = trivial_first_order(SU2, levi_civita(), q)
    series = files("series.json", json.dumps([io.cochain_json(g1, [1])]))
    gamma1 = files("g1.json", json.dumps(io.cochain_json(g1, [1])))
    assert run(capsys, "deform", "check-first-order", "--space", space, "--f", f, "--gamma1", gamma1)[0] == OK
    code, out, _ = run(capsys, "deform", "obstruct", "--space", space, "--f", f, "--order", 2, "--series", series)
    assert code == OK and json.loads(out)["inB3"] and json.loads(out)["bG"]
    code, out, _ = run(capsys, "deform", "integrate", "--space", space, "--f", f, "--order", 2, "--series", series)
    assert code == OK and not json.loads(out)["obstructed"]


def test_deform_obstructed(capsys, files):
    space = files("space.json", SU2_SPACE)
    zero = files("zero.json", [])
    series = files("series.json", json.dumps([io.cochain_json(gamma_cochain(SU2, non_lie()), [1])]))
    code, out, _ = run(capsys, "deform", "integrate", "--space", space, "--f", zero, "--order", 2, "--series", series)
    assert code == VIOLATIONS and json.loads(out)["obstructed"]


def test_deform_rejects_asymmetric_cochain(capsys, files):
    space = files("space.json", SU2_SPACE)
    bad = {"degree": 2, "components": [{"args": ["X1", "X2"], "m": [0], "value": {"X3": "1"}}]}
    code, _, err = run(capsys, "deform", "check-first-order", "--space", space, "--f", files("f.json", SU2_F), "--gamma1", files("g.json", bad))
    assert code == BAD_INPUT and "Z-symmetric" in err


# -- round trips ------------------------------------------------------------


def test_space_and_table_roundtrip():
    space = ReducedSpace({1: ["X1", "X2"], 2: ["T"]})
    assert io.parse_space(io.dumps(io.space_json(space))).grades == space.grades
    F = io.parse_structure_constants(json.dumps([{"A": "T", "B": "X1", "C": "X1", "value": "-1/2"}]), space)
    again = io.parse_structure_constants(io.dumps(io.structure_constants_json(F)), space)
    assert again.table == F.table and F.get("X1", "T", "X1") == Fr(-1, 2)


def test_gram_roundtrip():
    g = QuadraticForm({1: [[Fr(2), Fr(1, 3)], [Fr(1, 3), Fr(1)]]})
    assert io.parse_gram(io.dumps(io.gram_json(g))).blocks == g.blocks


def test_cochain_roundtrip():
    omega = gamma_cochain(SU2, levi_civita())
    text = io.dumps(io.cochain_json(omega, [1]))
    assert io.dumps(io.cochain_json(io.parse_cochain(text, SU2, 2), [1])) == text


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "wconformal", "lambda", "--a", "1", "--b", "1", "--c", "1"], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout) == {"(0,0)": "1"}
