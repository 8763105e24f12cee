from __future__ import annotations

import csv
import io
import json

import pytest

from ctmaps import cli
from ctmaps.experiment import default_params, run_ct_experiment
from ctmaps.growth import distortion_table
from ctmaps.hnn import cross_oracle, level_c2
from ctmaps.rips import ALPHABET_GCD, RipsParams, presentation
from ctmaps.smallcancel import check_cprime
from ctmaps.words import format_word

R = default_params().r


def run(capsys, *argv) -> tuple[int, str]:
    code = cli.main([str(a) for a in argv])
    return code, capsys.readouterr().out


def test_emit_presentation_matches_library(capsys):
    code, out = run(capsys, "emit-presentation", "--group", "Gcd", "--r", 5)
    assert code == 0
    assert out == presentation("Gcd", RipsParams(5)).to_text()


def test_check_cprime_report(tmp_path, capsys):
    pres = tmp_path / "g.txt"
    pres.write_text(presentation("G", RipsParams(R)).to_text())
    report = tmp_path / "rep.json"
    code, out = run(capsys, "check-cprime", "--presentation", pres, "--lambda", "1/6",
                    "--report", report)
    assert code == 0 and "holds" in out
    _, rep = check_cprime(presentation("G", RipsParams(R)), "1/6")
    assert json.loads(report.read_text()) == rep.to_dict()


def test_wordproblem_exit_codes(tmp_path, capsys):
    good = tmp_path / "gcd.txt"
    good.write_text(presentation("Gcd", RipsParams(R)).to_text())
    bad = tmp_path / "g2.txt"
    bad.write_text(presentation("G", RipsParams(2)).to_text())
    assert run(capsys, "wordproblem", "--presentation", good, "--word", "1")[0] == 0
    assert run(capsys, "wordproblem", "--presentation", good, "--word", "c1 d1")[0] == 1
    assert run(capsys, "wordproblem", "--presentation", bad, "--word", "a")[0] == 2


def test_min_r(capsys):
    code, out = run(capsys, "min-r", "--group", "G", "--lambda", "1/6", "--range", "2:60")
    assert code == 0 and int(out) == R


def test_britton_output(capsys):
    word = "c2 d1 c2^-1 c1^-1 d2 c1"
    code, out = run(capsys, "britton", "--group", "Gcd", "--r", R, "--word", word)
    lvl = level_c2(RipsParams(R))
    w = ALPHABET_GCD.parse(word)
    assert code == 0
    assert f"-> {lvl.stable_count(w)}" in out
    assert format_word(lvl.join(lvl.britton_reduce(w))) in out


def test_britton_survives_huge_output(capsys):
    code, out = run(capsys, "britton", "--r", R, "--word", "c2^-4 c1^-4 d1 c1^4 c2^4")
    assert code == 0 and "-> 0" in out and "not printed" in out


def test_cross_oracle_json(capsys):
    code, out = run(capsys, "cross-oracle", "--trials", 100, "--maxlen", 20, "--seed", 3, "--r", R)
    assert code == 0
    assert json.loads(out) == cross_oracle(100, 20, 3, RipsParams(R)).to_dict()


def test_nielsen_check(capsys):
    assert run(capsys, "nielsen-check", "--r", R, "--set", "C")[0] == 0
    assert run(capsys, "nielsen-check", "--r", R, "--set", "D")[0] == 0


def test_membership(tmp_path, capsys):
    basis = tmp_path / "basis.txt"
    basis.write_text("gens: a b\na^2\nb a b^-1\n")
    code, out = run(capsys, "membership", "--basis", basis, "--word", "a^2 b a^-1 b^-1")
    assert code == 0 and out.strip() == "member: e1 e2^-1"
    assert run(capsys, "membership", "--basis", basis, "--word", "a")[0] == 1


def test_distortion_csv(capsys):
    code, out = run(capsys, "distortion", "--r", R, "--n-max", 3)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    expected = distortion_table(3, RipsParams(R))
    assert [int(r["gamma_len"]) for r in rows] == [x.gamma_len for x in expected]
    assert rows[0]["w_len_exact"] == str(expected[0].w_len_exact)
    assert rows[1]["w_len_exact"] == ""
    assert [float(r["w_len_log10"]) for r in rows] == [x.w_len_log10 for x in expected]


def test_ct_experiment_outputs(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(cli.OUTDIR_ENV, str(tmp_path))
    code, _ = run(capsys, "ct-experiment", "--n-max", 3, "--seed", 5, "--out", "ct.json",
                  "--csv", "ct.csv")
    assert code == 0
    data = json.loads((tmp_path / "ct.json").read_text())
    expected = run_ct_experiment(RipsParams(R), 3, 5).to_dict()
    assert data["rows"] == expected["rows"] and data["verdict"] is True
    assert set(data) >= {"params", "certificate", "rows", "verdict", "schema_version"}
    table = list(csv.DictReader(io.StringIO((tmp_path / "ct.csv").read_text())))
    assert [int(r["h_distance"]) for r in table] == [1, 2, 3]


def test_verify_all_gate_failure(tmp_path, capsys):
    out = tmp_path / "va.json"
    code, _ = run(capsys, "-q", "verify-all", "--r", 2, "--trials", 10, "--n-max", 2, "--out", out)
    assert code == 12
    rep = json.loads(out.read_text())
    assert rep["stages"][1]["detail"]["G"]["witness"] is not None


def test_bad_arguments():
    with pytest.raises(SystemExit):
        cli.main(["distortion", "--n-max", "0"])
    with pytest.raises(SystemExit):
        cli.main(["min-r", "--range", "5"])
