from __future__ import annotations

import json

import pytest

from aprseq.cli import classify_word, main


@pytest.fixture
def matfile(tmp_path):
    def make(text, name="m.txt"):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return make


AK2_SUM = "field rational\n4\n0 1 0 0\n1 0 0 0\n0 0 0 1\n0 0 1 0\n"


def run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_compute(capsys, matfile):
    code, out, _ = run(capsys, ["compute", matfile(AK2_SUM), "--json"])
    rec = json.loads(out)
    assert code == 0
    assert (rec["apr"], rec["epr"], rec["qpr"], rec["rank"]) == ("SNS", "NSNA", "SSSA", 4)
    code, out, _ = run(capsys, ["compute", matfile(AK2_SUM), "--seq", "apr"])
    assert out.splitlines()[0] == "apr SNS"


def test_compute_bad_file(capsys, matfile):
    code, _, err = run(capsys, ["compute", matfile("field rational\n2\n1 2\n3 1\n")])
    assert code == 2 and json.loads(err)["error"] == "matrix-format"
    code, _, err = run(capsys, ["compute", "/nonexistent/file"])
    assert code == 2 and json.loads(err)["ok"] is False


@pytest.mark.parametrize("word, mode, code, attainable", [
    ("SNSN", "any", 0, True),
    ("ANA", "char0", 1, False),
    ("AAS", "char0", 0, True),
    ("S", "char0", 1, False),
    ("A", "any", 0, True),
    ("AAN", "any", 1, None),
    ("SSNS", "noA", 1, False),
])
def test_classify(capsys, word, mode, code, attainable):
    got, out, _ = run(capsys, ["classify", word, "--field", mode, "--json"])
    rec = json.loads(out)
    assert got == code and rec["attainable"] is attainable


def test_classify_details():
    assert classify_word("SNSN", "any")["pattern"].startswith("SNS")
    assert "NA" in classify_word("ANA", "char0")["reason"]


def test_classify_usage_errors(capsys):
    assert run(capsys, ["classify", "XYZ"])[0] == 2
    assert run(capsys, ["classify", "ASN", "--field", "noA"])[0] == 2


def test_realize_word(capsys, tmp_path):
    out_file = tmp_path / "w.txt"
    code, out, _ = run(capsys, ["realize", "AN", "--out", str(out_file)])
    assert code == 0 and "verified: apr = AN" in out
    assert out_file.read_text() == "field rational\n3\n1 1 1\n1 1 1\n1 1 1\n"


def test_realize_rejects_S(capsys):
    code, out, _ = run(capsys, ["realize", "S", "--json"])
    rec = json.loads(out)
    assert code == 1 and rec["status"] == "rejected" and "length-1 S unattainable" in rec["reason"]


def test_realize_deterministic(capsys):
    first = run(capsys, ["realize", "ASN", "--seed", "7"])
    second = run(capsys, ["realize", "ASN", "--seed", "7"])
    assert first == second and first[0] == 0


def test_realize_kind_and_sweep(capsys):
    code, out, _ = run(capsys, ["realize", "AS", "--kind", "singular", "--json"])
    assert code == 0 and json.loads(out)["verified_apr"] == "AS"
    code, out, _ = run(capsys, ["realize", "--sweep", "4", "--json"])
    rec = json.loads(out)
    assert code == 0 and rec["counts"] == {"realized": 16, "rejected": 11, "failed": 0}
    assert run(capsys, ["realize"])[0] == 2
    assert run(capsys, ["realize", "AS", "--sweep", "3"])[0] == 2


def test_census(capsys, tmp_path):
    report = tmp_path / "r.json"
    code, out, _ = run(capsys, ["census", "--field", "gf:2", "--n", "4", "--out", str(report)])
    rec = json.loads(report.read_text())
    assert code == 0 and rec["ok"] and rec["matrix_count"] == 1024
    assert {w for w in rec["apr"] if w[0] == "A"} == {"AAA", "ASS", "ASN", "ANN"}
    assert "1024 matrices" in out


def test_census_errors(capsys):
    code, _, err = run(capsys, ["census", "--field", "gf:2", "--n", "9"])
    assert code == 2 and json.loads(err)["error"] == "budget"
    assert run(capsys, ["census", "--field", "gf:4", "--n", "2"])[0] == 2
    assert run(capsys, ["census", "--field", "rational", "--n", "2"])[0] == 2


def test_schur(capsys, matfile):
    code, out, _ = run(capsys, ["schur", matfile("field rational\n2\n2 1\n1 1\n"), "--gamma", "1", "--json"])
    rec = json.loads(out)
    assert code == 0 and rec["labels"] == [2] and rec["matrix"] == [["1/2"]]
    assert rec["rank_C"] == rec["rank_B"] - 1


def test_schur_singular_block(capsys, matfile):
    code, _, err = run(capsys, ["schur", matfile("field rational\n2\n0 1\n1 0\n"), "--gamma", "1"])
    rec = json.loads(err)
    assert code == 1 and rec["error"] == "singular" and "= 0" in rec["message"]
    assert run(capsys, ["schur", matfile(AK2_SUM), "--gamma", "1,9"])[0] == 2


def test_verify(capsys):
    argv = ["verify", "--suite", "inverse", "--suite", "nn-theorem", "--trials", "50", "--n-max", "5", "--json"]
    code, out, _ = run(capsys, argv)
    rec = json.loads(out)
    assert code == 0 and rec["ok"] and [s["name"] for s in rec["suites"]] == ["inverse", "nn-theorem"]
    assert run(capsys, argv) == (code, out, "")
    assert run(capsys, ["verify", "--suite", "bogus"])[0] == 2


def test_verify_all_text(capsys):
    code, out, _ = run(capsys, ["verify", "--suite", "all", "--trials", "10", "--n-max", "4"])
    assert code == 0 and out.count("PASS") == 19
