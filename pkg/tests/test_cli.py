import json
import subprocess
import sys

import pytest

from arcforms.cli import main


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


@pytest.fixture
def files(tmp_path):
    return {
        "h": write(tmp_path, "h.json", {"gram": [[0, 1], [-1, 0]]}),
        "h2": write(tmp_path, "h2.json", {"gram": [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]}),
        "hz": write(tmp_path, "hz.json", {"gram": [[0, 1, 0], [-1, 0, 0], [0, 0, 0]]}),
        "t34": write(tmp_path, "t34.json", {"gram": [[0, 3, 0, 0], [-3, 0, 0, 0], [0, 0, 0, 4], [0, 0, -4, 0]]}),
        "bad": write(tmp_path, "bad.json", {"gram": [[0, 1], [1, 0]]}),
        "arf": write(tmp_path, "arf.json", {"gram": [[0, 1], [-1, 0]], "qvals": [1, 1]}),
        "circle": write(tmp_path, "circle.json", {"maximal_simplices": [[0, 1], [1, 2], [0, 2]]}),
        "s2": write(tmp_path, "s2.json", {"maximal_simplices": [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]}),
        "pts": write(tmp_path, "pts.json", {"maximal_simplices": [[0], [1]]}),
        "gens": write(tmp_path, "gens.json", [["s0", 1, 0], {"name": "t", "g": 2, "d": 2, "parity": 1}]),
        "cdga": write(tmp_path, "cdga.json", {"generators": [["s1", 1, 0], ["rho", 2, 1]], "differential": {"rho": "s1^2"}}),
    }


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def report(capsys, argv):
    code, out = run(capsys, argv)
    return code, json.loads(out)


def test_forms_canon(capsys, files):
    code, r = report(capsys, ["forms", "canon", files["t34"]])
    assert code == 0
    assert r["command"] == "forms canon" and r["seed"] == 0 and r["exit_code"] == 0
    assert r["result"]["genus"] == 1
    assert r["params"]["file"].endswith("t34.json")


def test_forms_other_commands(capsys, files):
    code, r = report(capsys, ["forms", "arf", files["arf"]])
    assert code == 0 and r["result"]["arf"] == 1
    code, r = report(capsys, ["forms", "cut", files["h2"], "--alphas", "1,0,0,0"])
    assert code == 0 and r["result"]["genus_after"] == 1
    code, r = report(capsys, ["forms", "delta", files["hz"]])
    assert code == 0 and r["result"]["order"] == "inf"


def test_bad_inputs_exit_one(capsys, files, tmp_path):
    assert main(["forms", "canon", files["bad"]]) == 1
    assert main(["forms", "canon", str(tmp_path / "missing.json")]) == 1
    assert main(["forms", "cut", files["h"], "--alphas", "2,0"]) == 1
    assert main(["stability", "check", "--n", "4", "--coeffs", "Z", "--g", "3", "--d", "1"]) == 1
    assert main(["stability", "check", "--n", "3", "--coeffs", "F2", "--g", "3", "--d", "1"]) == 1
    with pytest.raises(SystemExit) as e:
        main(["forms", "bogus"])
    assert e.value.code == 1
    capsys.readouterr()


def test_arc_commands(capsys, files):
    code, r = report(capsys, ["arc", "build", "--form", files["h"], "--height", "1", "--max-dim", "1"])
    assert code == 0 and r["result"]["f_vector"][0] == 8
    code, r = report(capsys, ["arc", "verify-wcm", "--form", files["h"], "--height", "1"])
    assert code == 0 and r["result"]["verdict"] == "consistent"
    code, r = report(capsys, ["arc", "t-pair", "--form", files["h2"], "--search-height", "1"])
    assert code == 0 and r["result"]["t"] == 4


def test_verify_wcm_h2(capsys, files):
    code, r = report(capsys, ["arc", "verify-wcm", "--form", files["h2"], "--height", "1", "--max-dim", "2"])
    assert code in (0, 3)
    assert set(r["result"]) >= {"thresholds", "homology_tables", "pi1_status", "verdict"}
    assert code == (0 if r["result"]["verdict"] == "consistent" else 3)


def test_verify_wcm_counterexample_and_inconclusive(capsys, files, tmp_path):
    # target dimension larger than t - 2 on a single point
    code, _ = run(capsys, ["arc", "verify-wcm", "--form", write(tmp_path, "z.json", {"gram": [[0]]}),
                           "--height", "1", "--max-dim", "1", "--target-dim", "2"])
    assert code == 3
    code, _ = run(capsys, ["arc", "verify-wcm", "--form", files["h"], "--delta", "0,0", "--height", "0",
                           "--max-dim", "1", "--target-dim", "1"])
    assert code in (2, 3)


def test_cut_bounds_flag(capsys, files):
    code, r = report(capsys, ["arc", "verify-wcm", "--form", files["hz"], "--height", "1", "--cut-bounds"])
    assert code in (0, 3)
    assert "cut_bounds" in r["result"]


def test_resource_limit(capsys, files):
    assert main(["arc", "build", "--form", files["h2"], "--height", "2", "--vertex-cap", "5"]) == 4
    assert main(["complexes", "homology", files["s2"], "--nnz-cap", "1"]) == 4
    capsys.readouterr()


def test_complexes_commands(capsys, files):
    code, r = report(capsys, ["complexes", "homology", files["circle"]])
    assert code == 0 and r["result"]["reduced_homology"]["1"] == {"free_rank": 1, "torsion": []}
    code, r = report(capsys, ["complexes", "join", files["pts"], files["pts"]])
    assert code == 0 and r["result"]["f_vector"] == [4, 4]
    code, r = report(capsys, ["complexes", "pi1", files["circle"]])
    assert code == 0 and r["result"]["pi1"] == "nontrivial"


def test_halgebra_commands(capsys, files):
    code, r = report(capsys, ["halgebra", "series", "--gens", files["gens"], "--max-g", "4", "--max-d", "2"])
    assert code == 0
    code, r = report(capsys, ["halgebra", "quotient", "--gens", files["gens"], "--max-g", "6", "--max-d", "2", "--by", "s0"])
    assert code == 0 and [e[:2] for e in r["result"]["series"]["entries"]] == [[0, 0], [2, 2]]
    code, r = report(capsys, ["halgebra", "cdga", files["cdga"], "--max-g", "6", "--max-d", "2"])
    assert code == 0 and [e[:2] for e in r["result"]["homology"]["entries"]] == [[0, 0], [1, 0]]
    code, r = report(capsys, ["halgebra", "step0"])
    assert code == 0


def test_stability_commands(capsys):
    code, r = report(capsys, ["stability", "check", "--n", "5", "--coeffs", "Q", "--g", "12", "--d", "7"])
    assert code == 0 and r["citations"] and r["citations"][0].startswith("Theorem A(v)")
    assert "dichotomy" not in r["result"] or r["result"]["dichotomy"] is not None
    code, out = run(capsys, ["stability", "table", "--n", "3", "--coeffs", "Z", "--max-g", "5", "--text"])
    assert code == 0 and "| 5 | 3 | 2 |" in out and "seed: 0" in out


def test_out_file_and_determinism(capsys, files, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["forms", "canon", files["t34"], "--out", str(p), "--seed", "7"]) == 0
    assert a.read_text() == b.read_text()
    assert json.loads(a.read_text())["seed"] == 7
    assert capsys.readouterr().out == ""


def test_text_mode(capsys, files):
    code, out = run(capsys, ["forms", "canon", files["h"], "--text"])
    assert code == 0 and "seed: 0" in out
    with pytest.raises(json.JSONDecodeError):
        json.loads(out)


def test_module_entry_point(files):
    p = subprocess.run([sys.executable, "-m", "arcforms", "forms", "canon", files["h"]], capture_output=True, text=True)
    assert p.returncode == 0 and json.loads(p.stdout)["result"]["genus"] == 1
