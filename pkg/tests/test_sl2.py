from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hodgelocus import fixtures
from hodgelocus.hodge import HodgeStructure, hodge_decomposition, is_polarization
from hodgelocus.linalg import Subspace
from hodgelocus.nilpotent import weight_filtration
from hodgelocus.scalars import GAUSSIAN, GaussianRational
from hodgelocus.sl2 import (
    SL2Error,
    diagonal_weight_filtrations,
    dual,
    elliptic_variation,
    hodge_norm_sq,
    invariance_check,
    norm_asymptotics_check,
    random_rep,
    sl2_orbit_eval,
    sym_power,
    tate,
    tensor,
    trivial_rep,
    twist,
    y_grading,
    y_rescaling,
)

I = GaussianRational(0, 1)


@pytest.mark.parametrize("name", fixtures.REP_NAMES)
def test_fixture_is_valid_sl2_rep(name):
    r = fixtures.rep(name)
    rep = r.validate()
    assert rep.passed, rep.to_dict()


@pytest.mark.parametrize("name", fixtures.REP_NAMES)
def test_orbit_at_i_is_fsharp(name):
    r = fixtures.rep(name)
    assert sl2_orbit_eval(r, (I,) * r.d) == r.Fsharp.promote(GAUSSIAN)


def test_elliptic_fsharp():
    e = elliptic_variation()
    assert e.Fsharp[1] == Subspace([(1, I)], 2, GAUSSIAN)
    assert e.limiting_filtration()[1] == Subspace([(1, 0)], 2, GAUSSIAN)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_sym_power_hodge_numbers(k):
    r = sym_power(elliptic_variation(), k)
    assert r.n == k + 1 and r.weight == k
    D = hodge_decomposition(r.Fsharp, k)
    assert {p: S.dim for (p, q), S in D.pieces.items()} == {p: 1 for p in range(k + 1)}
    # a single Jordan block of size k + 1
    W = weight_filtration(r.lowers[0])
    assert {j: d for j, d in W.graded_dims().items() if d} == {j: 1 for j in range(-k, k + 1, 2)}


def test_twist_and_tensor_shapes():
    e = elliptic_variation()
    t = twist(e, tate(2))
    assert t.weight == 5 and t.n == 2 and t.validate().passed
    x = tensor(e, e, "external")
    assert x.d == 2 and x.n == 4 and x.weight == 2
    dg = tensor(e, e, "diagonal")
    assert dg.d == 1 and dg.validate().passed
    with pytest.raises(SL2Error):
        tensor(x, e, "diagonal")
    with pytest.raises(SL2Error):
        trivial_rep(1, 1)


def test_dual_is_involutive_and_integral():
    e = elliptic_variation()
    dd = dual(dual(e))
    assert dd.Q == e.Q and dd.Fsharp == e.Fsharp and dd.weight == 1
    s = dual(sym_power(e, 2))
    assert s.Q.is_integral() and s.validate().passed


def test_y_grading_pieces():
    assert {k: S.dim for k, S in y_grading(fixtures.rep("tensor_2var")).pieces.items()} == {
        (a, b): 1 for a in (-1, 1) for b in (-1, 1)
    }


def test_diagonal_weight_filtrations_nested():
    r = fixtures.rep("tensor_2var")
    W1, W2 = diagonal_weight_filtrations(r)
    assert {k: d for k, d in W1.graded_dims().items() if d} == {-1: 2, 1: 2}
    assert {k: d for k, d in W2.graded_dims().items() if d} == {-2: 1, 0: 2, 2: 1}


@pytest.mark.parametrize("name", ["elliptic", "sym3", "tensor_2var"])
def test_rescaling_carries_fsharp_to_orbit_exactly(name):
    r = fixtures.rep(name)
    y = tuple(Fraction(9, 4) if j == 0 else Fraction(4) for j in range(r.d))
    F = sl2_orbit_eval(r, tuple(GaussianRational(0, t) for t in y))
    R = y_rescaling(r, y)
    assert r.Fsharp.promote(GAUSSIAN).apply(R.promote(GAUSSIAN)) == F


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 200))
def test_elliptic_norm_closed_form(y):
    e = elliptic_variation()
    # e1 sits in the Y-eigenspace 1 and e2 in -1
    assert hodge_norm_sq(e, (1j * y,), (1, 0)) == pytest.approx(y, rel=1e-9)
    assert hodge_norm_sq(e, (1j * y,), (0, 1)) == pytest.approx(1 / y, rel=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.integers(-5, 5), st.integers(-5, 5), st.floats(0.2, 50))
def test_norm_matches_graded_sum(a, b, y):
    e = elliptic_variation()
    if a == b == 0:
        return
    assert hodge_norm_sq(e, (1j * y,), (a, b)) == pytest.approx(a * a * y + b * b / y, rel=1e-9)


def test_norm_asymptotics_band():
    res = norm_asymptotics_check(fixtures.rep("sym2"), [(1, 0, 0), (1, 1, 1)], [(t,) for t in (1.0, 4.0, 16.0)])
    assert res["c"] == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(SL2Error):
        norm_asymptotics_check(fixtures.rep("tensor_2var"), [(1, 0, 0, 0)], [(1.0, 2.0)])
    with pytest.raises(SL2Error):
        norm_asymptotics_check(fixtures.rep("elliptic"), [(1, 0)], [(2.0,), (1.0,)])


def test_invariance_examples():
    rep = invariance_check(fixtures.rep("end_elliptic"))
    assert rep.passed and rep.results["intersection"] == [["1", "0", "0", "1"]]
    assert invariance_check(fixtures.rep("elliptic")).results["intersection"] == []
    assert invariance_check(fixtures.rep("trivial")).results["intersection"] == [["1"]]


@pytest.mark.parametrize("seed", range(12))
def test_random_reps_are_valid(seed):
    r = random_rep(seed)
    assert r.n <= 12
    assert r.validate().passed, r.name
    assert is_polarization(HodgeStructure(r.lattice, r.Fsharp)).passed


def test_random_rep_is_deterministic():
    a, b = random_rep(7), random_rep(7)
    assert a.name == b.name and a.Q == b.Q
