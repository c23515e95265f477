import json
import re
import random
import subprocess
import sys
from fractions import Fraction

import pytest
from hypothesis import given, settings

from phinlab import randomgen as rg
from phinlab import serialize as ser
from phinlab.cli import run
from phinlab.cohomology_pairing import KummerSideClass, UnramifiedSideClass
from phinlab.errors import ParseError
from phinlab.exact_core import FieldContext
from phinlab.fixtures import zero_residual_family
from strategies import seeds


def invoke(*argv):
    code, text = run([str(a) for a in argv])
    return code, json.loads(text)


# --- serialization ---------------------------------------------------------------


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_module_round_trip(seed):
    D, R = rg.random_refined_module(random.Random(seed))
    doc = ser.module_to_json(D, [R.as_json_flag()])
    text = ser.dumps(doc)
    D2, flags = ser.module_from_json(json.loads(text))
    assert D2 == D
    assert ser.dumps(ser.module_to_json(D2, flags)) == text


def test_family_and_class_round_trip():
    ctx = FieldContext(5, 1, 2)
    fam = zero_residual_family(ctx, [1, Fraction(1, 3)], n=3, s=1, t=3)
    doc = json.loads(ser.dumps(ser.family_to_json(ctx, fam, 1, 3, [1, Fraction(1, 3)])))
    back = ser.family_from_json(doc)
    assert back["characters"] == fam and back["ctx"] == ctx and back["L"] == [1, Fraction(1, 3)]
    for x in (UnramifiedSideClass(Fraction(1, 2), [1, 2]), KummerSideClass(3, [Fraction(-1, 3)])):
        assert ser.class_from_json(json.loads(ser.dumps(ser.class_to_json(x)))) == x


def test_rationals_are_strings_and_floats_are_refused():
    assert ser.dumps({"x": Fraction(1, 3)}) == '{\n  "x": "1/3"\n}\n'
    with pytest.raises(ParseError):
        ser.parse_rational(0.5)
    with pytest.raises(ParseError):
        ser.parse_rational("1/0")
    with pytest.raises(TypeError):
        ser.dumps({"x": 0.5})


def test_wrong_schema_is_a_parse_error():
    with pytest.raises(ParseError):
        ser.module_from_json({"schema": "other/2", "kind": "module"})


# --- command line ----------------------------------------------------------------------


def test_fixture_then_nf(tmp_path):
    code, rep = invoke("fixtures", "--section", "5", "--L", "1/2", "--out", tmp_path)
    assert code == 0 and rep["result"]["files"] == ["section5.json"]
    code, rep = invoke("nf", tmp_path / "section5.json")
    assert code == 0
    for entry in rep["result"]["refinements"]:
        assert entry["marked"] == [1]
        assert entry["t"] == {"1": 2}


def test_linvariant_command_with_consistency(tmp_path):
    invoke("fixtures", "--section", "5", "--L", "1/2,3", "--ext", "2", "1", "--out", tmp_path)
    code, rep = invoke("linvariant", tmp_path / "section5.json", "--consistency")
    assert code == 0
    for entry in rep["result"]["refinements"]:
        row = entry["invariants"][0]
        assert row["consistent"] and row["L"] == ["1/2", "3/1"]


def test_cgs_check_on_zero_residual_family(tmp_path):
    invoke("fixtures", "--section", "family", "--L", "2/3", "--ext", "1", "2", "--out", tmp_path)
    code, rep = invoke("cgs-check", tmp_path / "family.json")
    assert code == 0
    res = rep["result"]
    assert res["residual"] == "0/1" and res["all_checks_pass"]
    code, rep = invoke("cgs-check", tmp_path / "family.json", "--L", "5")
    assert code == 0 and not rep["result"]["residual_zero"] and rep["result"]["derivation_consistent"]


def test_validate_reports_the_broken_invariant(tmp_path):
    invoke("fixtures", "--section", "5", "--L", "1", "--out", tmp_path)
    doc = json.loads((tmp_path / "section5.json").read_text())
    doc["N"][0][1][0] = "1"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, rep = invoke("validate", bad)
    assert code == 3
    assert rep["error"]["invariant"] == "phi-N relation"
    assert "phi-N relation" in rep["error"]["message"]


def test_exit_codes(tmp_path):
    assert invoke("validate", tmp_path / "missing.json")[0] == 2
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    assert invoke("nf", broken)[0] == 2
    invoke("fixtures", "--section", "5", "--L", "1", "--out", tmp_path)
    code, rep = invoke("refinements", tmp_path / "section5.json")
    assert code == 4 and rep["error"]["type"] == "EigenvalueDegeneracy"
    assert invoke("fixtures", "--prime", "4")[0] == 3


def test_pairing_command(tmp_path):
    x, y = tmp_path / "x.json", tmp_path / "y.json"
    x.write_text(ser.dumps(ser.class_to_json(UnramifiedSideClass(Fraction(1, 2), [1, 2]))))
    y.write_text(ser.dumps(ser.class_to_json(KummerSideClass(3, [Fraction(1, 3), 1]))))
    code, rep = invoke("pairing", x, y)
    assert code == 0 and rep["result"]["value"] == "-5/6"


def test_every_report_has_the_conventions_banner(tmp_path):
    for argv in (["fixtures"], ["validate", tmp_path / "none.json"], ["properties", "--suite", "pairing", "--trials", "3"]):
        _, rep = invoke(*argv)
        assert set(rep["conventions"]) >= {"newton_number", "hodge_number", "weight_sign", "frobenius_shift"}


def test_text_output_is_line_oriented():
    code, text = run(["fixtures", "--format", "text"])
    assert code == 0
    assert "status: ok" in text.splitlines()
    lines = text.splitlines()
    assert all(": " in line for line in lines)
    assert not any(re.search(r"\d\.\d", line) for line in lines)
    assert "result.documents.section5.json.phi[0][0]: [1/2, 0/1, 0/1]" in lines


def test_properties_command_reports_suites():
    code, rep = invoke("properties", "--suite", "cgs", "--suite", "pairing", "--trials", "20", "--seed", "3")
    assert code == 0 and rep["result"]["all_ok"]
    assert [s["name"] for s in rep["result"]["suites"]] == ["cgs", "pairing"]
    assert invoke("properties", "--suite", "nonsense")[0] == 2


def test_module_entry_point_runs():
    out = subprocess.run([sys.executable, "-m", "phinlab", "fixtures", "--section", "7"], capture_output=True, text=True)
    assert out.returncode == 0
    assert json.loads(out.stdout)["result"]["files"] == [
        "section7_base.json",
        "section7_rank3.json",
        "section7_rank4.json",
    ]


@pytest.mark.parametrize("section", ["5", "7", "family"])
def test_fixture_files_round_trip(section, tmp_path):
    invoke("fixtures", "--section", section, "--L", "1/3", "--ext", "1", "2", "--out", tmp_path)
    for path in sorted(tmp_path.iterdir()):
        text = path.read_text()
        doc = json.loads(text)
        if doc["kind"] == "module":
            D, flags = ser.module_from_json(doc)
            assert ser.dumps(ser.module_to_json(D, flags)) == text
        else:
            fam = ser.family_from_json(doc)
            assert ser.dumps(ser.family_to_json(fam["ctx"], fam["characters"], fam["s"], fam["t"], fam["L"])) == text
