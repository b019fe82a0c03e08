"""Named fixtures shared by the command line and the test-suite."""

from __future__ import annotations

from functools import lru_cache

from .hodge import PolarizedLattice
from .linalg import Matrix
from .orbits import NilpotentOrbit, VariationSample
from .sl2 import (
    elliptic_variation,
    standard_suite,
    sym_power,
    tate,
    trivial_rep,
    twist,
    two_variable_tensor,
)


@lru_cache(maxsize=None)
def _reps() -> dict:
    reps = dict(standard_suite())
    reps["trivial"] = trivial_rep(1, 0)
    e = elliptic_variation()
    reps["sym2_twisted"] = twist(sym_power(e, 2), tate(-1))
    reps["sym4_twisted"] = twist(sym_power(e, 4), tate(-2))
    return reps


def _signflip(orbit: NilpotentOrbit) -> NilpotentOrbit:
    lat = PolarizedLattice(orbit.Q.scale(-1), orbit.weight)
    return NilpotentOrbit(list(orbit.Ns), orbit.F, lat, orbit.name + " (sign-flipped Q)")


@lru_cache(maxsize=None)
def _samples() -> dict:
    e = elliptic_variation().to_orbit()
    t = two_variable_tensor().to_orbit()
    return {
        # F(z) = span(1, z + s): the limiting point is approached at rate |s|
        "rank2_family": VariationSample(e, {(1,): e.Ns[0]}, False, "rank2_family"),
        # locus of e1f2 - e2f1 is z1 + s1 = z2; the orbit locus is z1 = z2
        "tensor_2var_gamma": VariationSample(t, {(1, 0): t.Ns[0]}, False, "tensor_2var_gamma"),
    }


REP_NAMES = (
    "elliptic",
    "sym2",
    "sym3",
    "sym4",
    "end_elliptic",
    "tensor_2var",
    "tensor_2var_sym",
    "trivial",
    "sym2_twisted",
    "sym4_twisted",
)
SAMPLE_NAMES = ("rank2_family", "tensor_2var_gamma")
INVALID_NAMES = ("elliptic_bad_sign",)
WEIGHT_ZERO = ("trivial", "end_elliptic", "tensor_2var", "sym2_twisted", "sym4_twisted")


def names() -> list:
    return list(REP_NAMES + SAMPLE_NAMES + INVALID_NAMES)


def rep(name: str):
    reps = _reps()
    if name not in reps:
        raise KeyError(f"no sl2 fixture named {name!r}")
    return reps[name]


def get(name: str):
    """Orbit or variation sample by name."""
    if name in REP_NAMES:
        o = rep(name).to_orbit()
        o.name = name
        return o
    if name in SAMPLE_NAMES:
        return _samples()[name]
    if name == "elliptic_bad_sign":
        return _signflip(elliptic_variation().to_orbit())
    raise KeyError(f"unknown fixture {name!r}; try one of {', '.join(names())}")


def jordan(n: int) -> Matrix:
    """Single lowering Jordan block of size n (``e_k -> e_{k+1}``)."""
    return Matrix([[1 if i == j + 1 else 0 for j in range(n)] for i in range(n)])
