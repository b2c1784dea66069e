from __future__ import annotations

import json

import pytest

from adhmquot.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    doc = json.loads(out) if out.strip() else None
    return code, doc, err


def gen_file(tmp_path, capsys, name, *flags):
    code, doc, _ = run(capsys, "gen", *flags)
    assert code == 0
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def test_gen_is_deterministic(capsys):
    args = ["gen", "--n", "3", "--c", "2", "--r", "2", "--nilpotent", "--seed", "7"]
    code1 = main(args)
    out1, _ = capsys.readouterr()
    code2 = main(args)
    out2, _ = capsys.readouterr()
    assert code1 == code2 == 0
    assert out1 == out2


def test_check_exit_codes(tmp_path, capsys):
    stable = gen_file(tmp_path, capsys, "s.json",
                      "--n", "2", "--c", "2", "--r", "1", "--stable", "--seed", "1")
    code, doc, _ = run(capsys, "check", str(stable), "--stable")
    assert code == 0 and doc["passed"] and doc["is_stable"]
    unstable = gen_file(tmp_path, capsys, "u.json",
                        "--n", "2", "--c", "3", "--r", "1", "--unstable", "--seed", "2")
    code, doc, _ = run(capsys, "check", str(unstable), "--stable")
    assert code == 1 and not doc["passed"]
    code, doc, _ = run(capsys, "check", str(unstable))
    assert code == 0  # report-only mode never fails


def test_check_manifest(tmp_path, capsys):
    a = gen_file(tmp_path, capsys, "a.json",
                 "--n", "2", "--c", "2", "--r", "1", "--stable", "--seed", "3")
    b = gen_file(tmp_path, capsys, "b.json",
                 "--n", "2", "--c", "2", "--r", "1", "--unstable", "--seed", "4")
    manifest = tmp_path / "m.json"
    manifest.write_text(json.dumps({"schema": "manifest@1", "paths": [str(a), str(b)]}))
    code, doc, _ = run(capsys, "check", str(manifest), "--manifest", "--stable")
    assert code == 1
    assert [item["passed"] for item in doc["items"]] == [True, False]


def test_malformed_json_reports_position(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 2,,}')
    code = main(["check", str(bad)])
    _, err = capsys.readouterr()
    assert code == 2
    assert "line 1" in err and "column" in err


def test_shape_mismatch_is_usage_error(tmp_path, capsys):
    doc = {"schema": "adhm-datum@1", "n": 2, "c": 2, "r": 1,
           "B": [[["0", "0"], ["0", "0"]]], "v": [["1", "0"]]}
    path = tmp_path / "short.json"
    path.write_text(json.dumps(doc))
    code = main(["check", str(path)])
    capsys.readouterr()
    assert code == 2


def test_missing_file_is_usage_error(capsys):
    code = main(["check", "/nonexistent/x.json"])
    capsys.readouterr()
    assert code == 2


def test_quot_present_build_equiv_pipeline(tmp_path, capsys):
    src = gen_file(tmp_path, capsys, "x.json",
                   "--n", "2", "--c", "3", "--r", "2", "--stable", "--seed", "5")
    code, pres, _ = run(capsys, "quot", "present", str(src))
    assert code == 0 and pres["schema"] == "poly-vectors@1"
    pres_path = tmp_path / "pres.json"
    pres_path.write_text(json.dumps(pres))
    code, rebuilt, _ = run(capsys, "quot", "build", str(pres_path))
    assert code == 0 and rebuilt["c"] == 3
    rebuilt_path = tmp_path / "rebuilt.json"
    rebuilt_path.write_text(json.dumps(rebuilt))
    code, eq, _ = run(capsys, "equiv", str(src), str(rebuilt_path))
    assert code == 0 and eq["equivalent"] and eq["g"] is not None


def test_quot_present_noncommuting_is_usage_error(tmp_path, capsys):
    doc = {
        "schema": "adhm-datum@1", "n": 2, "c": 2, "r": 1,
        "B": [[["0", "1"], ["0", "0"]], [["0", "0"], ["1", "0"]]],
        "v": [["1", "0"]],
    }
    path = tmp_path / "nc.json"
    path.write_text(json.dumps(doc))
    code = main(["quot", "present", str(path)])
    capsys.readouterr()
    assert code == 2


def test_quot_build_infinite_quotient_is_usage_error(tmp_path, capsys):
    doc = {
        "schema": "poly-vectors@1",
        "n": 2,
        "r": 1,
        "generators": [[{"alpha": [2, 0], "j": 1, "coeff": "1"}]],
    }
    path = tmp_path / "inf.json"
    path.write_text(json.dumps(doc))
    code = main(["quot", "build", str(path), "--degree-cap", "5"])
    _, err = capsys.readouterr()
    assert code == 2
    assert "degree cap" in err


def test_equiv_failure_exit(tmp_path, capsys):
    a = gen_file(tmp_path, capsys, "e1.json",
                 "--n", "2", "--c", "2", "--r", "1", "--stable", "--seed", "6")
    b = gen_file(tmp_path, capsys, "e2.json",
                 "--n", "2", "--c", "2", "--r", "1", "--stable", "--seed", "7")
    code, doc, _ = run(capsys, "equiv", str(a), str(b))
    assert code in (0, 1)
    if code == 1:
        assert not doc["equivalent"] and doc["g"] is None


def test_monad_check_perturbed(tmp_path, capsys):
    src = gen_file(tmp_path, capsys, "m.json",
                   "--n", "2", "--c", "2", "--r", "1", "--seed", "8")
    doc = json.loads(src.read_text())
    perturbed = tmp_path / "pert.json"
    code = rep = None
    for i in range(2):
        for a in range(2):
            for b in range(2):
                bumped = json.loads(src.read_text())
                entry = bumped["B"][i][a][b]
                bumped["B"][i][a][b] = "1" if "/" in entry else str(int(entry) + 1)
                perturbed.write_text(json.dumps(bumped))
                code, rep, _ = run(capsys, "monad", "check", str(perturbed))
                if not rep["composition_zero"]:
                    assert code == 1
                    assert rep["commutator_residuals"]
                    return
    pytest.fail("no single-entry perturbation broke commutation")


def test_monad_build_and_rank(tmp_path, capsys):
    src = gen_file(tmp_path, capsys, "mb.json",
                   "--n", "3", "--c", "2", "--r", "1", "--stable", "--seed", "9")
    code, doc, _ = run(capsys, "monad", "build", str(src))
    assert code == 0
    assert doc["alpha0"]["rows"] == 2 and doc["alpha0"]["cols"] == 7
    assert "alpha_minus2" in doc
    code, doc, _ = run(capsys, "monad", "rank", str(src), "--point", "1,2,3,1")
    assert code == 0 and doc["euler"] == 1
    code, doc, _ = run(capsys, "monad", "rank", str(src), "--samples", "6", "--seed", "0")
    assert code == 0 and doc["all_full_rank"]


def test_support_cli(tmp_path, capsys):
    src = gen_file(tmp_path, capsys, "n.json",
                   "--n", "2", "--c", "2", "--r", "1", "--nilpotent", "--seed", "10")
    code, doc, _ = run(capsys, "support", str(src))
    assert code == 0 and doc["complete"]
    assert doc["points"] == [{"point": ["0", "0"], "multiplicity": 2}]


def test_quiver_cli(tmp_path, capsys):
    src = gen_file(tmp_path, capsys, "q.json",
                   "--n", "2", "--c", "2", "--r", "2", "--stable", "--seed", "11",
                   "--prime", "3")
    code, doc, _ = run(capsys, "quiver", "check", str(src), "--theta", "-1")
    assert code == 0
    assert doc["theta_stable"] and doc["adhm_stable"]
    assert doc["theta_inf"] == "2"


def test_path_cli(tmp_path, capsys):
    src = gen_file(tmp_path, capsys, "p.json",
                   "--n", "2", "--c", "2", "--r", "2", "--stable", "--nilpotent",
                   "--seed", "12")
    code, doc, _ = run(capsys, "path", "run", str(src), "--t", "1/2")
    assert code == 0 and doc["schema"] == "adhm-datum@1"
    code, doc, _ = run(capsys, "path", "verify", str(src), "--grid", "8")
    assert code == 0 and doc["passed"]
    assert len(doc["grid"]) == 9
    # r != c without the experimental flag is an input error
    other = gen_file(tmp_path, capsys, "p2.json",
                     "--n", "2", "--c", "3", "--r", "2", "--stable", "--nilpotent",
                     "--seed", "13")
    code = main(["path", "verify", str(other), "--grid", "4"])
    capsys.readouterr()
    assert code == 2
    code, doc, _ = run(capsys, "path", "verify", str(other), "--grid", "4",
                       "--experimental")
    assert code == 0  # experimental reports without enforcing


def test_path_run_output_feeds_check(tmp_path, capsys):
    src = gen_file(tmp_path, capsys, "pp.json",
                   "--n", "2", "--c", "3", "--r", "3", "--stable", "--nilpotent",
                   "--seed", "15")
    code, doc, _ = run(capsys, "path", "run", str(src), "--t", "3/4")
    assert code == 0
    mid = tmp_path / "mid.json"
    mid.write_text(json.dumps(doc))
    code, rep, _ = run(capsys, "check", str(mid), "--stable", "--nilpotent", "--adhm")
    assert code == 0 and rep["passed"]


def test_dim_cli(capsys):
    code, doc, _ = run(capsys, "dim", "experiment", "--n", "3", "--c", "2", "--r", "1",
                       "--punctual", "--trials", "4", "--seed", "1")
    assert code == 0
    assert doc["tangent_min"] == 3 + 1 + 2
    assert doc["moduli_histogram"] == {"2": 4}


def test_reports_reparse(tmp_path, capsys):
    src = gen_file(tmp_path, capsys, "r.json",
                   "--n", "2", "--c", "2", "--r", "1", "--stable", "--seed", "14")
    for argv in (
        ["check", str(src)],
        ["support", str(src)],
        ["monad", "check", str(src)],
        ["quot", "present", str(src)],
    ):
        code, doc, _ = run(capsys, *argv)
        assert code == 0
        assert json.loads(json.dumps(doc)) == doc
