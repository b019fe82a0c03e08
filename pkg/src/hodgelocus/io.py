"""JSON documents for variations and reports.

Exact scalars are always strings (``"3/2"``, ``"1-2*i"``); complex floats are
``[re, im]`` pairs printed with 17 significant digits so round-trips are exact.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .hodge import PolarizedLattice
from .linalg import Filtration, Matrix, Subspace, det, inverse
from .orbits import NilpotentOrbit, VariationSample
from .scalars import COMPLEX, FIELDS, RATIONAL, GaussianRational, format_scalar, parse_scalar

SCHEMA_VERSION = 1


class DocumentError(ValueError):
    """Invalid input document; the message names the first failing invariant."""


def _fmt_matrix(M: Matrix) -> list:
    return [[format_scalar(x) for x in row] for row in M.rows]


def _parse_matrix(data, field: str, n: int, what: str) -> Matrix:
    if not isinstance(data, list) or len(data) != n or any(not isinstance(r, list) or len(r) != n for r in data):
        raise DocumentError(f"{what}: expected a {n}x{n} matrix")
    try:
        return Matrix([[parse_scalar(x, field) for x in row] for row in data], field)
    except ValueError as e:
        raise DocumentError(f"{what}: {e}") from None


def _parse_int_matrix(data, n: int, what: str) -> Matrix:
    M = _parse_matrix(data, RATIONAL, n, what)
    if not M.is_integral():
        raise DocumentError(f"{what}: entries must be integers")
    return M


def filtration_to_json(F: Filtration) -> list:
    return [{"p": p, "basis": [[format_scalar(x) for x in b] for b in F[p].basis]} for p in range(F.lo, F.hi + 1)]


def filtration_from_json(data, n: int, field: str, direction: str = "decreasing") -> Filtration:
    if not isinstance(data, list) or not data:
        raise DocumentError("F: expected a non-empty list of {p, basis} steps")
    steps = {}
    for item in data:
        try:
            p = int(item["p"])
            vecs = [tuple(parse_scalar(x, field) for x in b) for b in item["basis"]]
        except (KeyError, TypeError, ValueError) as e:
            raise DocumentError(f"F: bad step {item!r} ({e})") from None
        if any(len(b) != n for b in vecs):
            raise DocumentError(f"F^{p}: basis vectors must have length {n}")
        steps[p] = Subspace(vecs, n, field)
    try:
        return Filtration(steps, direction, n, field)
    except ValueError as e:
        raise DocumentError(f"F: {e}") from None


def orbit_to_document(obj) -> dict:
    sample = obj if isinstance(obj, VariationSample) else None
    orbit = sample.orbit if sample else obj
    doc = {
        "schema_version": SCHEMA_VERSION,
        "name": orbit.name,
        "field": orbit.F.field,
        "rank": orbit.n,
        "weight": orbit.weight,
        "Q": _fmt_matrix(orbit.Q),
        "N": [_fmt_matrix(N) for N in orbit.Ns],
        "F": filtration_to_json(orbit.F),
    }
    if sample is not None and sample.gamma:
        doc["gamma"] = [
            {"degree": list(deg), "matrix": _fmt_matrix(X)} for deg, X in sorted(sample.gamma.items())
        ]
        doc["truncated"] = sample.truncated
        if sample.name:
            doc["name"] = sample.name
    return doc


def orbit_from_document(doc: dict, validate: bool = True):
    """Parse a variation document into a :class:`NilpotentOrbit` or :class:`VariationSample`.

    With ``validate`` every structural invariant is checked and the first
    failure raises :class:`DocumentError`.
    """
    if not isinstance(doc, dict):
        raise DocumentError("document must be a JSON object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise DocumentError(f"schema_version must be {SCHEMA_VERSION}")
    field = doc.get("field")
    if field not in FIELDS:
        raise DocumentError(f"field must be one of {', '.join(FIELDS)}")
    try:
        n = int(doc["rank"])
        w = int(doc["weight"])
    except (KeyError, TypeError, ValueError):
        raise DocumentError("rank and weight are required integers") from None
    if n < 1:
        raise DocumentError("rank must be positive")
    Q = _parse_int_matrix(doc.get("Q"), n, "Q")
    Ns = [_parse_int_matrix(N, n, f"N[{k}]") for k, N in enumerate(doc.get("N", []))]
    F = filtration_from_json(doc.get("F"), n, field)
    if "lattice_basis" in doc:
        B = _parse_int_matrix(doc["lattice_basis"], n, "lattice_basis")
        if abs(det(B)) != 1:
            raise DocumentError("lattice_basis: must be unimodular")
        Bi = inverse(B)
        Q = B.T @ Q @ B
        Ns = [Bi @ N @ B for N in Ns]
        F = F.apply(Bi.promote(F.field))
    lattice = PolarizedLattice(Q, w)
    orbit = NilpotentOrbit(Ns, F, lattice, str(doc.get("name", "")))
    gamma = {}
    for item in doc.get("gamma", []) or []:
        try:
            deg = tuple(int(d) for d in item["degree"])
        except (KeyError, TypeError, ValueError):
            raise DocumentError("gamma: each entry needs an integer degree list") from None
        if deg in gamma:
            raise DocumentError(f"gamma: duplicate degree {list(deg)}")
        gamma[deg] = _parse_matrix(item.get("matrix"), field, n, f"gamma{list(deg)}")
    out = VariationSample(orbit, gamma, bool(doc.get("truncated", False)), orbit.name) if gamma else orbit
    if validate:
        _validate(orbit, out if gamma else None)
    return out


def _validate(orbit: NilpotentOrbit, sample):
    if orbit.r == 0:
        raise DocumentError("at least one N is required")
    rep = orbit.validate()
    for c in rep.checks:
        if not c.passed:
            raise DocumentError(f"{c.name} fails" + (f": {c.detail['problems'][0]}" if c.detail.get("problems") else ""))
    F = orbit.F
    if F[F.lo] != Subspace.full(orbit.n, F.field) or not F[F.hi].is_zero():
        raise DocumentError("F must run from V down to 0 over its listed range")
    if sample is not None:
        rep = sample.validate()
        for c in rep.checks:
            if not c.passed:
                raise DocumentError(f"gamma: {c.name} fails")


def dumps(obj, indent: int | None = 2) -> str:
    return json.dumps(obj, indent=indent, sort_keys=False, default=_default)


def _default(x):
    if isinstance(x, (Fraction, GaussianRational, complex)):
        return format_scalar(x)
    if isinstance(x, (set, frozenset, tuple)):
        return list(x)
    if isinstance(x, Subspace):
        return [[format_scalar(a) for a in b] for b in x.basis]
    if isinstance(x, Filtration):
        return {str(k): _default(x[k]) for k in range(x.lo, x.hi + 1)}
    if isinstance(x, Matrix):
        return _fmt_matrix(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def load_document(path: str):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as e:
        raise DocumentError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise DocumentError(f"{path}: invalid JSON ({e.msg})") from None
    return orbit_from_document(doc)


def parse_point(text: str, r: int):
    """Comma-separated coordinates such as ``"i,1/2+2*i"``.

    Gaussian-rational coordinates stay exact; a decimal point or exponent
    anywhere makes the whole point a complex float (``"0.5+2.0j"``).
    """
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != r:
        raise DocumentError(f"point needs {r} coordinates, got {len(parts)}")
    exact = not any(c in p for p in parts for c in ".eE")
    field = "gaussian_rational" if exact else COMPLEX
    try:
        return tuple(parse_scalar(p, field) for p in parts)
    except ValueError as e:
        raise DocumentError(f"bad point coordinate: {e}") from None

