"""``hodgelocus`` command line.

Every command prints one JSON report.  Exit codes: 0 pass, 1 a check failed,
2 invalid input, 3 numerical underflow / truncation.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import fixtures
from .hodge import HodgeError, bigrading_splitting_defects, deligne_bigrading, is_mhs
from .io import DocumentError, dumps, filtration_from_json, load_document, orbit_to_document, parse_point
from .linalg import Matrix, set_default_tol
from .locus import (
    LocusError,
    enumerate_classes,
    locus_equations,
    orbit_locus_solve,
    project_nearby,
    ray,
    verify_thm25,
)
from .nilpotent import NonexistentError, WeightFiltrationError, check_weight_filtration, cone_weight_filtration, weight_filtration
from .orbits import (
    NilpotentOrbit,
    OrbitError,
    TruncationError,
    VariationSample,
    decay_check,
    in_g_minus1_minus1,
    is_polarized_orbit,
    limiting_mhs,
)
from .scalars import GAUSSIAN, RATIONAL, GaussianRational, format_scalar, parse_scalar
from .sl2 import SL2Error, norm_asymptotics_check

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


class InputError(Exception):
    pass


def _load(source: str):
    if source.startswith("fixture:"):
        try:
            return fixtures.get(source.split(":", 1)[1])
        except KeyError as e:
            raise InputError(e.args[0]) from None
    return load_document(source)


def _orbit(obj) -> NilpotentOrbit:
    return obj.orbit if isinstance(obj, VariationSample) else obj


def _fmt_filtration(F) -> dict:
    return {str(k): [[format_scalar(x) for x in b] for b in F[k].basis] for k in range(F.lo, F.hi + 1)}


def _int_vector(text: str, n: int) -> tuple:
    try:
        v = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise InputError(f"class must be comma-separated integers, got {text!r}") from None
    if len(v) != n:
        raise InputError(f"class needs {n} entries, got {len(v)}")
    return v


def _floats(text: str) -> list:
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise InputError(f"expected comma-separated numbers, got {text!r}") from None


def _fractions(text: str) -> list:
    try:
        return [Fraction(x) for x in text.split(",")]
    except ValueError:
        raise InputError(f"expected comma-separated rationals, got {text!r}") from None


def _read_matrices(source: str) -> list:
    """Nilpotent input for ``wf``: a fixture, a variation document, or bare JSON matrices."""
    if source.startswith("fixture:jordan"):
        return [fixtures.jordan(int(source[len("fixture:jordan"):] or 2))]
    if source.startswith("fixture:"):
        return list(_orbit(_load(source)).Ns)
    try:
        with open(source) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read {source}: {e}") from None
    if isinstance(data, dict) and "schema_version" in data:
        return list(_orbit(load_document(source)).Ns)
    if isinstance(data, dict):
        data = data.get("N", data.get("matrix"))
    if isinstance(data, list) and data and isinstance(data[0], list) and data[0] and not isinstance(data[0][0], list):
        data = [data]
    try:
        return [Matrix([[parse_scalar(x, RATIONAL) for x in row] for row in M], RATIONAL) for M in data]
    except (TypeError, ValueError) as e:
        raise InputError(f"bad matrix data: {e}") from None


# -- commands ------------------------------------------------------------------


def cmd_wf(args) -> tuple:
    Ns = _read_matrices(args.input)
    if args.cone:
        W = cone_weight_filtration(Ns, seed=args.seed, samples=args.samples)
        note = f"independent of the cone point over {args.samples} random positive combinations (seed {args.seed})"
        out = {"command": "wf", "cone": True, "generators": len(Ns), "steps": _fmt_filtration(W), "note": note}
        return out, True
    idx = args.index
    if idx >= len(Ns):
        raise InputError(f"input has {len(Ns)} matrices; no index {idx}")
    W = weight_filtration(Ns[idx])
    probs = check_weight_filtration(Ns[idx], W)
    out = {"command": "wf", "cone": False, "steps": _fmt_filtration(W), "graded_dims": W.graded_dims(), "problems": probs}
    return out, not probs


def _mhs_input(args):
    if args.input.startswith("fixture:"):
        orbit = _orbit(_load(args.input))
        mhs, _ = limiting_mhs(orbit, seed=args.seed)
        return mhs.W, mhs.F
    try:
        with open(args.input) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read {args.input}: {e}") from None
    if "W" in doc:
        n = int(doc["rank"])
        f = doc.get("field", GAUSSIAN)
        W = filtration_from_json(doc["W"], n, f, "increasing")
        F = filtration_from_json(doc["F"], n, f)
        return W, F
    orbit = _orbit(load_document(args.input))
    mhs, _ = limiting_mhs(orbit, seed=args.seed)
    return mhs.W, mhs.F


def cmd_mhs_check(args):
    W, F = _mhs_input(args)
    rep = is_mhs(W, F)
    out = {"command": "mhs-check", **rep.to_dict()}
    return out, rep.passed


def cmd_bigrading(args):
    W, F = _mhs_input(args)
    I = deligne_bigrading(W, F)
    defects = bigrading_splitting_defects(I, W, F)
    out = {
        "command": "bigrading",
        "dims": {f"{p},{q}": S.dim for (p, q), S in sorted(I.pieces.items())},
        "pieces": {f"{p},{q}": [[format_scalar(x) for x in b] for b in S.basis] for (p, q), S in sorted(I.pieces.items())},
        "splitting_defects": defects,
    }
    return out, not defects


def cmd_orbit_check(args):
    obj = _load(args.input)
    orbit = _orbit(obj)
    rep = orbit.validate()
    depths = [int(d) for d in _fractions(args.depths)] if args.depths else [1, 2, 4]
    zs = [tuple(GaussianRational(0, d) for _ in range(orbit.r)) for d in depths]
    pol = is_polarized_orbit(orbit, 0, zs)
    rep.extend(pol, "polarized:")
    rep.results["smallest_passing_y"] = pol.results.get("smallest_passing_y")
    if isinstance(obj, VariationSample):
        rep.extend(obj.validate(), "gamma:")
    return {"command": "orbit-check", **rep.to_dict()}, rep.passed


def cmd_limiting_mhs(args):
    orbit = _orbit(_load(args.input))
    mhs, rep = limiting_mhs(orbit, seed=args.seed)
    out = {"command": "limiting-mhs", **rep.to_dict(), "W": _fmt_filtration(mhs.W)}
    if rep.passed:
        ok = in_g_minus1_minus1(orbit)
        rep.add("N_in_g_-1,-1", ok)
        out = {"command": "limiting-mhs", **rep.to_dict(), "W": _fmt_filtration(mhs.W)}
    return out, rep.passed


def cmd_locus(args):
    obj = _load(args.input)
    orbit = _orbit(obj)
    v = _int_vector(args.cls, orbit.n)
    if args.solve:
        L = orbit_locus_solve(orbit, v)
        desc = "full space" if L.dim == orbit.r else ("{0}" if L.dim == 0 else f"dimension {L.dim}")
        out = {
            "command": "locus",
            "class": list(v),
            "solution_basis": [[format_scalar(x) for x in b] for b in L.basis],
            "locus": desc,
        }
        return out, True
    S = locus_equations(obj, v)
    eqs = S.reduced()
    text = [_equation(nu, ser) for nu, ser in eqs]
    out = {
        "command": "locus",
        "class": list(v),
        "locus": "full space" if not eqs else f"{len(eqs)} independent equation(s)",
        "equations": text,
        "linear": [[format_scalar(x) for x in nu] for nu in S.linear],
        "series": [{",".join(map(str, d)): format_scalar(c) for d, c in sorted(ser.items())} for ser in S.series],
    }
    return out, True


def _equation(nu, ser) -> str:
    terms = []
    for j, c in enumerate(nu):
        if c:
            mag = abs(c)
            terms.append(("-" if c < 0 else "+", f"z{j + 1}" if mag == 1 else f"{format_scalar(mag)}*z{j + 1}"))
    for d, c in sorted(ser.items()):
        mono = "*".join(f"s{j + 1}" + (f"^{e}" if e > 1 else "") for j, e in enumerate(d) if e)
        if c == 1:
            terms.append(("+", mono))
        elif c == -1:
            terms.append(("-", mono))
        else:
            terms.append(("+", f"({format_scalar(c)})*{mono}"))
    if not terms:
        return "0 = 0"
    head = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    return " ".join([head] + [f"{sg} {t}" for sg, t in terms[1:]]) + " = 0"


def cmd_enumerate(args):
    obj = _load(args.input)
    orbit = _orbit(obj)
    z = parse_point(args.at, orbit.r)
    hits = enumerate_classes(obj, z, args.K, include_zero=not args.nonzero)
    rows = []
    for h in hits:
        d = h.to_dict()
        d["flag"] = "persistent-type" if h.in_W0 and h.witness_verified else "not-limiting"
        rows.append(d)
    out = {"command": "enumerate", "at": [format_scalar(x) for x in z], "K": args.K, "count": len(rows), "hits": rows}
    return out, True


def cmd_project(args):
    orbit = _orbit(_load(args.input))
    v = _int_vector(args.cls, orbit.n)
    z = parse_point(args.at, orbit.r)
    zp = project_nearby(orbit, v, z)
    out = {"command": "project", "class": list(v), "z": [format_scalar(x) for x in z], "z_prime": [format_scalar(x) for x in zp]}
    return out, True


def cmd_verify25(args):
    obj = _load(args.input)
    orbit = _orbit(obj)
    theta = _fractions(args.ray) if args.ray else [Fraction(1)] * orbit.r
    base = parse_point(args.base, orbit.r) if args.base else tuple([0] * orbit.r)
    depths = [int(d) for d in _fractions(args.depths)]
    if len(theta) != orbit.r:
        raise InputError(f"ray needs {orbit.r} entries")
    zs = ray(base, theta, depths)
    if isinstance(obj, VariationSample) and obj.gamma:
        zs = [tuple(complex(x) for x in z) for z in zs]
    rep = verify_thm25(obj, zs, args.K, args.alpha, labels=depths)
    return {"command": "verify25", "ray": [str(t) for t in theta], "depths": depths, **rep.to_dict()}, rep.passed


def cmd_asymptotics(args):
    obj = _load(args.input)
    orbit = _orbit(obj)
    grid = _floats(args.grid)
    theta = _floats(args.ray) if args.ray else [1.0] * orbit.r
    if args.norm:
        name = args.input.split(":", 1)[1] if args.input.startswith("fixture:") else None
        if name not in fixtures.REP_NAMES:
            raise InputError("norm asymptotics need an sl2 fixture (fixture:NAME)")
        rep = fixtures.rep(name)
        vecs = [tuple(1 if i == j else 0 for i in range(rep.n)) for j in range(rep.n)]
        taus = [tuple(t * th for th in theta) for t in grid]
        res = norm_asymptotics_check(rep, vecs, taus)
        res.pop("rows")
        return {"command": "asymptotics", "kind": "norm", "grid": taus, **res}, True
    if not isinstance(obj, VariationSample):
        obj = VariationSample(orbit, {}, False, orbit.name)
    res = decay_check(obj, [0] * orbit.r, theta, grid)
    return {"command": "asymptotics", "kind": "decay", "ray": theta, "fitted_exponent_over_2pi": res.get("slope"), **res}, True


def cmd_fixtures(args):
    if not args.name:
        return {"command": "fixtures", "names": fixtures.names()}, True
    try:
        obj = fixtures.get(args.name)
    except KeyError as e:
        raise InputError(e.args[0]) from None
    return orbit_to_document(obj), True


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hodgelocus", description="Exact computations for degenerating variations of Hodge structure.")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized cone sampling")
    p.add_argument("--tol", type=float, default=None, help="float tolerance (default 1e-9)")
    sub = p.add_subparsers(dest="command", required=True)
    inp = "variation document (JSON) or fixture:NAME"

    s = sub.add_parser("wf", help="monodromy weight filtration")
    s.add_argument("input", help="matrix JSON, variation document, or fixture:NAME / fixture:jordanK")
    s.add_argument("--cone", action="store_true", help="weight filtration of the whole monodromy cone")
    s.add_argument("--index", type=int, default=0)
    s.add_argument("--samples", type=int, default=3)
    s.set_defaults(func=cmd_wf)

    for name, fn, hlp in (
        ("mhs-check", cmd_mhs_check, "check a mixed Hodge structure"),
        ("bigrading", cmd_bigrading, "Deligne bigrading"),
    ):
        s = sub.add_parser(name, help=hlp)
        s.add_argument("input", help="MHS document with W and F, a variation document, or fixture:NAME")
        s.set_defaults(func=fn)

    s = sub.add_parser("orbit-check", help="validate a nilpotent orbit")
    s.add_argument("input", help=inp)
    s.add_argument("--depths", default=None, help="imaginary parts at which polarization is checked")
    s.set_defaults(func=cmd_orbit_check)

    s = sub.add_parser("limiting-mhs", help="limiting mixed Hodge structure")
    s.add_argument("input", help=inp)
    s.set_defaults(func=cmd_limiting_mhs)

    s = sub.add_parser("locus", help="locus equations of an integral class")
    s.add_argument("input", help=inp)
    s.add_argument("--class", dest="cls", required=True, help="comma-separated integers")
    s.add_argument("--solve", action="store_true", help="solve exactly on the nilpotent orbit")
    s.set_defaults(func=cmd_locus)

    s = sub.add_parser("enumerate", help="integral (0,0)-classes of bounded norm")
    s.add_argument("input", help=inp)
    s.add_argument("--at", required=True, help="exact point, e.g. 'i' or '1/2+2*i,3*i'")
    s.add_argument("--K", type=int, required=True)
    s.add_argument("--nonzero", action="store_true", help="drop v = 0")
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("project", help="nearest point of the orbit locus")
    s.add_argument("input", help=inp)
    s.add_argument("--class", dest="cls", required=True)
    s.add_argument("--at", required=True)
    s.set_defaults(func=cmd_project)

    s = sub.add_parser("verify25", help="finiteness and limiting checks along a ray")
    s.add_argument("input", help=inp)
    s.add_argument("--ray", default=None, help="direction theta (positive rationals)")
    s.add_argument("--base", default=None, help="base point z0")
    s.add_argument("--depths", default="1,2,4,8,16,32,64")
    s.add_argument("--K", type=int, default=10)
    s.add_argument("--alpha", type=float, default=1.0)
    s.set_defaults(func=cmd_verify25)

    s = sub.add_parser("asymptotics", help="decay and norm asymptotics along a ray")
    s.add_argument("input", help=inp)
    s.add_argument("--ray", default=None)
    s.add_argument("--grid", default="2,3,4,5,6,7,8")
    s.add_argument("--norm", action="store_true", help="Hodge-norm growth instead of distance decay")
    s.set_defaults(func=cmd_asymptotics)

    s = sub.add_parser("fixtures", help="list fixtures or dump one as a document")
    s.add_argument("name", nargs="?")
    s.set_defaults(func=cmd_fixtures)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.tol is not None:
        set_default_tol(args.tol)
    try:
        out, ok = args.func(args)
    except TruncationError as e:
        print(dumps({"command": args.command, "error": str(e), "kind": "numerical"}))
        return EXIT_NUMERIC
    except (InputError, DocumentError, LocusError, OrbitError, SL2Error, ValueError) as e:
        kind = "check" if isinstance(e, (HodgeError, WeightFiltrationError, NonexistentError)) else "input"
        print(dumps({"command": args.command, "error": str(e), "kind": kind}))
        return EXIT_FAIL if kind == "check" else EXIT_INPUT
    print(dumps(out))
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
