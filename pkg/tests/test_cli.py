import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from polyheyting.cli import run

CORPUS = Path(__file__).parent / "corpus"
TWO_CHAIN = str(CORPUS / "two_chain.kml")
SYSTEM = str(CORPUS / "models" / "chain2_growing.kml")


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def records(text):
    return [json.loads(line) for line in text.splitlines()]


def test_eval_excluded_middle_at_w0():
    code, out, _ = call("eval", "--model", TWO_CHAIN, "--formula", "(or p (imp p bot))", "--world", "w0")
    assert code == 1 and "not satisfied" in out


def test_eval_json_satisfied():
    code, out, _ = call("eval", "--model", SYSTEM, "--formula", "(q v0)", "--world", "w1",
                        "--assign", "v0=b", "--json")
    assert code == 0
    assert records(out) == [{"assignment": ["b", "a", "a"], "formula": "(q v0)", "satisfied": True,
                             "world": "w1"}]


def test_eval_missing_assignment_is_usage_error():
    code, _, err = call("eval", "--model", SYSTEM, "--formula", "(q v1)", "--world", "w1")
    assert code == 2 and "v1" in err


def test_check_proof_mp():
    code, out, _ = call("check-proof", str(CORPUS / "proofs" / "mp.prf"))
    assert code == 0 and out.startswith("accepted")


def test_check_proof_rejection(tmp_path):
    f = tmp_path / "bad.prf"
    f.write_text("step (imp p q) by axiom K\n")
    code, out, _ = call("check-proof", str(f), "--json")
    assert code == 1
    err = records(out)[0]["error"]
    assert (err["step"], err["code"]) == (1, "not-an-instance")


def test_check_proof_unparsable_file(tmp_path):
    f = tmp_path / "bad.prf"
    f.write_text("step (imp p by axiom I\n")
    assert call("check-proof", str(f))[0] == 2
    assert call("check-proof", str(tmp_path / "missing.prf"))[0] == 2


def test_countermodel_verdicts():
    assert call("countermodel", "--formula", "(imp p p)")[0] == 0
    code, out, _ = call("countermodel", "--formula", "(or p (imp p bot))", "--json")
    rec = records(out)[0]
    assert code == 1 and rec["found"] and rec["world"] == "w0"


def test_algebra_axioms_table():
    code, out, _ = call("algebra", "axioms", "--system", SYSTEM, "--trials", "200")
    assert code == 0
    assert out.splitlines()[0].split() == ["schema", "pass", "fail", "vacuous"]
    assert "axioms.9q" in out and out.rstrip().endswith("all schemas pass")


def test_hyphenated_alias():
    assert call("algebra-axioms", "--system", SYSTEM, "--trials", "3")[0] == 0


def test_json_output_is_byte_identical():
    argv = ("algebra", "axioms", "--system", SYSTEM, "--trials", "25", "--seed", "7", "--json")
    assert call(*argv)[1] == call(*argv)[1]


def test_semigroup_check_rich():
    code, out, _ = call("semigroup", "check-rich", "--sigma", "suc", "--pi", "pred", "--nmax", "50", "--json")
    rec = records(out)[0]
    assert code == 0 and rec["ok"] and len(rec["strongly_rich"]["rows"]) == 51
    assert call("semigroup-check", "--sigma", "id", "--pi", "id")[0] == 1


def test_interpolate():
    code, out, _ = call("algebra", "interpolate", "--system", str(CORPUS / "models" / "fork.kml"),
                        "--x1", "(p v0);(q v0)", "--x2", "(q v0);(p v1)",
                        "--a", "(and (p v0) (q v0))", "--b", "(q v0)", "--json")
    rec = records(out)[0]
    assert code == 0 and rec["found"] and rec["certificate"]


def test_dilate():
    code, out, _ = call("dilate", "--system", str(CORPUS / "models" / "constant_domain.kml"),
                        "--gen", "(forall v0 (p v0))", "--json")
    assert code == 0 and records(out)[0]["ok"]


def test_dims_mismatch_is_usage_error():
    assert call("algebra", "axioms", "--system", SYSTEM, "--dims", "2")[0] == 2


@pytest.mark.parametrize("argv", [[], ["bogus"], ["parse", "(imp p"], ["eval", "--model", "nope.kml",
                                                                          "--formula", "p", "--world", "w0"]])
def test_usage_errors(argv):
    assert call(*argv)[0] == 2


def test_parse_human_and_json_agree():
    _, human, _ = call("parse", "(forall v0   (p v0 v1))")
    _, js, _ = call("parse", "(forall v0 (p v0 v1))", "--json")
    assert human.splitlines()[0] == records(js)[0]["formula"] == "(forall v0 (p v0 v1))"


def test_console_script_entry_point():
    r = subprocess.run([sys.executable, "-m", "polyheyting.cli", "check-proof", str(CORPUS / "proofs" / "mp.prf")],
                       capture_output=True, text=True)
    assert r.returncode == 0


def test_non_persistent_model_is_rejected(tmp_path):
    f = tmp_path / "bad.kml"
    f.write_text("[worlds]\nw0 w1\n[order]\nw0 w1\n[domains]\nw0: a\nw1: a\n[valuation]\np w0: ()\n")
    code, _, err = call("eval", "--model", str(f), "--formula", "p", "--world", "w1")
    assert code == 2 and "persistence" in err
