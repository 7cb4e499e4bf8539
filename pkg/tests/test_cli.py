import json
import subprocess
import sys

import pytest

from conftest import TEST_FIXTURES
from ias_onshell.cli import fixture_names, main


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_fixtures_ship_with_package():
    assert {"a22", "a42", "d42p", "d62m", "d82p", "e82", "circle", "torus2"} <= set(fixture_names())


def test_build_a42_cc(tmp_path, capsys):
    out = tmp_path / "fam.json"
    code, stdout, _ = run(["build", "--germ", "a42", "--kind", "cc", "--out", str(out)], capsys)
    assert code == 0
    assert "G_cc = -b*p + b^3*q + b*q^3 + b^5 + 10*b^3*q^2 + 5*b*q^4" in stdout
    fam = json.loads(out.read_text())
    assert fam["kind"] == "cc" and fam["G"]["nvars"] == 3


def test_build_builtin_echoes_f(capsys):
    code, stdout, _ = run(["build", "--builtin", "circle", "--kind", "sp"], capsys)
    assert code == 0 and "f = 1/4*(sinh(2t) - 2t)" in stdout


def test_build_empty_germ_warns(capsys):
    code, stdout, err = run(["build", "--germ", str(TEST_FIXTURES / "empty.json"), "--kind", "cc"], capsys)
    assert code == 0 and "Degenerate" in err and "G_cc = -b*p" in stdout


def test_malformed_germ_exit_2(capsys):
    code, _, err = run(["build", "--germ", str(TEST_FIXTURES / "malformed.json")], capsys)
    assert code == 2 and "malformed.json:" in err


def test_unknown_builtin_exit_2(capsys):
    code, _, err = run(["build", "--builtin", "sphere"], capsys)
    assert code == 2 and "unknown builtin" in err


def test_classify_both_kinds(capsys):
    code, stdout, _ = run(["classify", "--germ", "d62p"], capsys)
    rep = json.loads(stdout)
    assert code == 0 and rep["cc"]["class"] == "D_{6/2}+" and rep["sp"]["class"] == "D_{6/2}-"


def test_classify_quadratic_and_n3(capsys):
    _, stdout, _ = run(["classify", "--germ", str(TEST_FIXTURES / "quadratic.json"), "--kind", "cc"], capsys)
    assert json.loads(stdout)["class"] == "Degenerate"
    _, stdout, _ = run(["classify", "--germ", str(TEST_FIXTURES / "n3.json"), "--kind", "cc"], capsys)
    rep = json.loads(stdout)
    assert rep["class"] == "NonSimple" and rep["note"]


def test_classify_float_point(capsys):
    _, stdout, _ = run(["classify", "--germ", "a42", "--kind", "cc", "--at", "0.0"], capsys)
    assert json.loads(stdout)["class"] == "SignUncertain"
    # S''' = 60q^2 + 6q vanishes again at q = -1/10 (the second A_{4/2} point)
    _, stdout, _ = run(["classify", "--germ", "a42", "--kind", "cc", "--at", "-1/10"], capsys)
    assert json.loads(stdout)["class"] == "A_{4/2}"
    _, stdout, _ = run(["classify", "--germ", "a42", "--kind", "cc", "--at", "-1/20"], capsys)
    assert json.loads(stdout)["class"] == "A_{2/2}"


def test_caustic_csv_and_svg(tmp_path, capsys):
    csv_path, svg = tmp_path / "a42.csv", tmp_path / "a42.svg"
    code, _, err = run(["caustic", "--germ", "a42", "--window", "-0.15,0.05,-0.15,0.15", "--res", "128",
                        "--out", str(csv_path), "--svg", str(svg)], capsys)
    assert code == 0 and "branches [0, 1]" in err
    cc = (tmp_path / "a42_cc.csv").read_text().splitlines()
    assert cc[0] == "branch,q,beta,x1,x2,z,res_grad,res_det"
    assert svg.read_text().startswith("<?xml")
    assert "<dc:date>" not in svg.read_text()


def test_caustic_is_deterministic(tmp_path, capsys):
    texts = []
    for k in range(2):
        out = tmp_path / f"c{k}.csv"
        run(["caustic", "--builtin", "circle", "--kind", "cc", "--res", "64", "--out", str(out)], capsys)
        texts.append(out.read_bytes())
    assert texts[0] == texts[1]


def test_svg_is_deterministic(tmp_path, capsys):
    blobs = []
    for k in range(2):
        out = tmp_path / f"p{k}.svg"
        run(["plot", "--builtin", "circle", "--res", "64", "--out", str(out)], capsys)
        blobs.append(out.read_bytes())
    assert blobs[0] == blobs[1]


def test_plot_from_csv(tmp_path, capsys):
    csv_path = tmp_path / "c.csv"
    run(["caustic", "--germ", "a42", "--kind", "sp", "--window", "-0.15,0.05,-0.15,0.15", "--res", "64",
         "--out", str(csv_path)], capsys)
    out = tmp_path / "c.svg"
    code, _, _ = run(["plot", "--csv", str(csv_path), "--out", str(out)], capsys)
    assert code == 0 and out.stat().st_size > 0


def test_empty_window_exit_2(capsys):
    code, _, err = run(["caustic", "--germ", "a42", "--window", "1,0,0,1"], capsys)
    assert code == 2 and "empty" in err


@pytest.mark.parametrize("args", [["--res", "1"], ["--cutoff", "8"], ["--window", "0,1,2"]])
def test_config_validation(args, capsys):
    code, _, _ = run(["caustic", "--germ", "a42", *args], capsys)
    assert code == 2


def test_versal_catalog(capsys):
    code, stdout, _ = run(["versal", "--catalog"], capsys)
    assert code == 0 and all(e["verdict"] == "versal" for e in json.loads(stdout))


def test_versal_failure_exit_1(tmp_path, capsys):
    g = tmp_path / "q5.json"
    g.write_text('{"n": 1, "S": {"nvars": 1, "terms": [{"exp": [5], "coef": "1"}]}}')
    code, stdout, _ = run(["versal", "--germ", str(g), "--kind", "cc"], capsys)
    assert code == 1 and json.loads(stdout)["missing"] == ["b1^3"]


def test_verify_torus(capsys):
    code, stdout, _ = run(["verify", "--builtin", "torus:2", "--checks", "ma,hamiltonian"], capsys)
    reps = json.loads(stdout)
    assert code == 0 and all(r["max_residual"] < 1e-6 for r in reps)


def test_verify_family_exact(capsys):
    code, stdout, _ = run(["verify", "--germ", "e82", "--checks", "family"], capsys)
    reps = json.loads(stdout)
    assert code == 0 and reps == [{"check": "family", "passed": True, "max_residual": "exact-pass",
                                   "samples": 12, "kind": "cc+sp"}]


def test_verify_unknown_check(capsys):
    code, _, _ = run(["verify", "--builtin", "circle", "--checks", "bogus"], capsys)
    assert code == 2


def test_selftest(capsys):
    code, stdout, _ = run(["selftest", "--count", "4", "--seed", "7"], capsys)
    assert code == 0 and "passed (seed 7)" in stdout


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "ias_onshell", "classify", "--germ", "a22", "--kind", "sp"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["class"] == "A_{2/2}"
