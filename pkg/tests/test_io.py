import copy
import json

import pytest

from hodgelocus import fixtures
from hodgelocus.io import (
    DocumentError,
    dumps,
    filtration_from_json,
    filtration_to_json,
    load_document,
    orbit_from_document,
    orbit_to_document,
    parse_point,
)
from hodgelocus.linalg import Matrix
from hodgelocus.orbits import VariationSample
from hodgelocus.scalars import GaussianRational


def _same(a, b):
    if isinstance(a, VariationSample):
        assert isinstance(b, VariationSample)
        assert a.gamma.keys() == b.gamma.keys()
        assert all(a.gamma[k] == b.gamma[k] for k in a.gamma)
        assert a.truncated == b.truncated
        a, b = a.orbit, b.orbit
    assert a.Q == b.Q and a.weight == b.weight
    assert list(a.Ns) == list(b.Ns)
    assert a.F == b.F


@pytest.mark.parametrize("name", fixtures.names())
def test_document_round_trip(name, tmp_path):
    obj = fixtures.get(name)
    doc = orbit_to_document(obj)
    text = dumps(doc)
    p = tmp_path / "doc.json"
    p.write_text(text)
    back = load_document(str(p))
    _same(obj, back)
    assert orbit_to_document(back) == json.loads(text)


def test_filtration_round_trip():
    F = fixtures.get("sym3").F
    assert filtration_from_json(filtration_to_json(F), F.n, F.field) == F


def _doc():
    return orbit_to_document(fixtures.get("elliptic"))


@pytest.mark.parametrize(
    "mutate,needle",
    [
        (lambda d: d.pop("schema_version"), "schema_version"),
        (lambda d: d.update(field="reals"), "field"),
        (lambda d: d.update(rank="two"), "rank"),
        (lambda d: d.update(Q=[["1/2", "0"], ["0", "1"]]), "Q"),
        (lambda d: d.update(Q=[["0", "1"]]), "Q"),
        (lambda d: d.update(N=[[["1", "0"], ["0", "1"]]]), "nilpotent"),
        (lambda d: d.update(N=[]), "at least one N"),
        (lambda d: d.update(F=[]), "F"),
        (lambda d: d.update(F=[{"p": 0, "basis": [["1"]]}]), "length"),
        (lambda d: d.update(lattice_basis=[["2", "0"], ["0", "1"]]), "unimodular"),
    ],
)
def test_invalid_documents_name_the_invariant(mutate, needle):
    d = _doc()
    mutate(d)
    with pytest.raises(DocumentError, match=needle):
        orbit_from_document(d)


def test_transversality_violation():
    d = orbit_to_document(fixtures.get("sym2"))
    full = [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]
    d["F"] = [
        {"p": 0, "basis": full},
        {"p": 1, "basis": [full[0], full[2]]},
        {"p": 2, "basis": [full[0]]},
        {"p": 3, "basis": []},
    ]
    with pytest.raises(DocumentError, match="transversality"):
        orbit_from_document(d)


def test_invalid_gamma():
    d = orbit_to_document(fixtures.get("rank2_family"))
    d2 = copy.deepcopy(d)
    d2["gamma"].append(copy.deepcopy(d2["gamma"][0]))
    with pytest.raises(DocumentError, match="duplicate"):
        orbit_from_document(d2)
    d3 = copy.deepcopy(d)
    d3["gamma"][0]["degree"] = [0]
    with pytest.raises(DocumentError, match="gamma"):
        orbit_from_document(d3)


def test_unreadable_files(tmp_path):
    with pytest.raises(DocumentError, match="cannot read"):
        load_document(str(tmp_path / "missing.json"))
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(DocumentError, match="invalid JSON"):
        load_document(str(p))


def test_lattice_basis_change():
    d = _doc()
    d["lattice_basis"] = [["1", "1"], ["0", "1"]]
    o = orbit_from_document(d)
    B = Matrix([[1, 1], [0, 1]])
    assert o.Q == B.T @ fixtures.get("elliptic").Q @ B
    assert o.validate().passed


def test_structural_validation_only():
    # a wrong-sign polarization is structurally fine; it is caught by the orbit checks
    d = orbit_to_document(fixtures.get("elliptic_bad_sign"))
    assert orbit_from_document(d).validate().passed


def test_parse_point():
    assert parse_point("i,1/2+2*i", 2) == (GaussianRational(0, 1), GaussianRational(0.5, 2))
    z = parse_point("0.5+2.0j", 1)
    assert isinstance(z[0], complex)
    with pytest.raises(DocumentError):
        parse_point("i", 2)


def test_dumps_handles_scalars():
    out = json.loads(dumps({"a": GaussianRational(1, -2), "b": (1, 2), "c": 1 + 2j}))
    assert out["a"] == "1-2*i" and out["b"] == [1, 2]
    assert isinstance(out["c"], (str, list))
    with pytest.raises(TypeError):
        dumps({"x": object()})
