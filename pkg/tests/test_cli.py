import json

import pytest

from hodgelocus import fixtures
from hodgelocus.cli import EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC, EXIT_OK, main
from hodgelocus.io import dumps, filtration_to_json, orbit_to_document
from hodgelocus.orbits import VariationSample, limiting_mhs


def run(capsys, *argv):
    code = main(list(argv))
    return code, json.loads(capsys.readouterr().out)


def test_wf_jordan(capsys):
    code, out = run(capsys, "wf", "fixture:jordan2")
    assert code == EXIT_OK
    assert out["steps"]["-2"] == [] and out["steps"]["-1"] == [["0", "1"]]
    assert out["steps"]["0"] == [["0", "1"]] and len(out["steps"]["1"]) == 2
    assert out["problems"] == []


def test_wf_matrix_file(capsys, tmp_path):
    p = tmp_path / "n.json"
    p.write_text(json.dumps([[0, 0, 0], [1, 0, 0], [0, 1, 0]]))
    code, out = run(capsys, "wf", str(p))
    assert code == EXIT_OK and out["graded_dims"] == {"-2": 1, "0": 1, "2": 1}


def test_wf_cone(capsys):
    code, out = run(capsys, "--seed", "3", "wf", "fixture:tensor_2var", "--cone")
    assert code == EXIT_OK and out["cone"] and out["generators"] == 2


def test_wf_bad_index(capsys):
    code, out = run(capsys, "wf", "fixture:jordan2", "--index", "4")
    assert code == EXIT_INPUT and out["kind"] == "input"


def test_bigrading(capsys):
    code, out = run(capsys, "bigrading", "fixture:end_elliptic")
    assert code == EXIT_OK
    assert out["dims"] == {"-1,-1": 1, "0,0": 2, "1,1": 1}
    assert out["splitting_defects"] == []


def test_mhs_check_document(capsys, tmp_path):
    mhs, _ = limiting_mhs(fixtures.get("elliptic"))
    doc = {"rank": 2, "field": mhs.F.field, "W": filtration_to_json(mhs.W), "F": filtration_to_json(mhs.F)}
    p = tmp_path / "mhs.json"
    p.write_text(dumps(doc))
    code, out = run(capsys, "mhs-check", str(p))
    assert code == EXIT_OK and out["passed"]
    # swapping the weights breaks purity on the graded pieces
    doc["F"] = [{"p": 0, "basis": [["1", "0"], ["0", "1"]]}, {"p": 1, "basis": [["0", "1"]]}, {"p": 2, "basis": []}]
    p.write_text(dumps(doc))
    code, out = run(capsys, "mhs-check", str(p))
    assert code == EXIT_FAIL and not out["passed"]


def test_orbit_check(capsys):
    code, out = run(capsys, "orbit-check", "fixture:sym3")
    assert code == EXIT_OK and out["results"]["smallest_passing_y"] == 1
    code, out = run(capsys, "orbit-check", "fixture:elliptic_bad_sign")
    assert code == EXIT_FAIL


def test_limiting_mhs(capsys):
    code, out = run(capsys, "limiting-mhs", "fixture:sym2")
    assert code == EXIT_OK
    assert any(c["name"] == "N_in_g_-1,-1" and c["passed"] for c in out["checks"])


def test_locus_equations(capsys):
    code, out = run(capsys, "locus", "fixture:tensor_2var_gamma", "--class", "0,1,-1,0")
    assert code == EXIT_OK and out["equations"] == ["z1 - z2 + s1 = 0"]
    code, out = run(capsys, "locus", "fixture:tensor_2var", "--class", "0,1,-1,0")
    assert out["equations"] == ["z1 - z2 = 0"]


def test_locus_solve(capsys):
    code, out = run(capsys, "locus", "fixture:end_elliptic", "--class", "1,0,0,1", "--solve")
    assert code == EXIT_OK and out["locus"] == "full space"
    code, out = run(capsys, "locus", "fixture:end_elliptic", "--class", "0,1,0,0")
    assert code == EXIT_INPUT
    code, out = run(capsys, "locus", "fixture:end_elliptic", "--class", "1,0")
    assert code == EXIT_INPUT and "4 entries" in out["error"]


def test_enumerate(capsys):
    code, out = run(capsys, "enumerate", "fixture:end_elliptic", "--at", "i", "--K", "4", "--nonzero")
    assert code == EXIT_OK and out["count"] == len(out["hits"])
    flags = {tuple(h["v"]): h["flag"] for h in out["hits"]}
    assert flags[(1, 0, 0, 1)] == "persistent-type"
    assert "not-limiting" in flags.values()


def test_project(capsys):
    code, out = run(capsys, "project", "fixture:tensor_2var", "--class", "0,1,-1,0", "--at", "i,3*i")
    assert code == EXIT_OK and out["z_prime"] == ["2*i", "2*i"]


def test_verify25(capsys):
    code, out = run(capsys, "verify25", "fixture:end_elliptic", "--depths", "1,2,4")
    assert code == EXIT_OK and out["passed"]
    code, out = run(capsys, "verify25", "fixture:elliptic_bad_sign")
    assert code == EXIT_FAIL
    code, out = run(capsys, "verify25", "fixture:tensor_2var", "--ray", "1")
    assert code == EXIT_INPUT


def test_asymptotics(capsys):
    code, out = run(capsys, "asymptotics", "fixture:rank2_family")
    assert code == EXIT_OK and abs(out["fitted_exponent_over_2pi"] - 1) < 0.1
    code, out = run(capsys, "asymptotics", "fixture:elliptic", "--norm", "--grid", "1,4,16")
    assert code == EXIT_OK and out["c"] == pytest.approx(1.0)
    code, out = run(capsys, "asymptotics", "fixture:rank2_family", "--norm")
    assert code == EXIT_INPUT


def test_truncation_exit_code(capsys, tmp_path):
    o = fixtures.get("elliptic")
    p = tmp_path / "t.json"
    p.write_text(dumps(orbit_to_document(VariationSample(o, {(1,): o.Ns[0].scale(50)}, True, "t"))))
    code, out = run(capsys, "asymptotics", str(p), "--grid", "0.1,0.2")
    assert code == EXIT_NUMERIC and out["kind"] == "numerical"


def test_fixtures_listing_and_dump(capsys):
    code, out = run(capsys, "fixtures")
    assert code == EXIT_OK and "tensor_2var" in out["names"]
    code, out = run(capsys, "fixtures", "elliptic")
    assert out["schema_version"] == 1 and out["rank"] == 2
    code, out = run(capsys, "fixtures", "nope")
    assert code == EXIT_INPUT


def test_invalid_document(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"schema_version": 1, "field": "rational", "rank": 2, "weight": 1, "Q": [[0, 1], [-1, 0]], "N": [[[1, 0], [0, 1]]], "F": [{"p": 0, "basis": [[1, 0], [0, 1]]}, {"p": 1, "basis": []}]}))
    code, out = run(capsys, "orbit-check", str(p))
    assert code == EXIT_INPUT and "nilpotent" in out["error"]


def test_tol_flag(capsys):
    code, _ = run(capsys, "--tol", "1e-8", "bigrading", "fixture:elliptic")
    assert code == EXIT_OK
