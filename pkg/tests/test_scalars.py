from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hodgelocus.scalars import (
    COMPLEX,
    GAUSSIAN,
    RATIONAL,
    FieldMismatch,
    GaussianRational,
    conj,
    format_scalar,
    i_power,
    parse_scalar,
    promote,
)
from strategies import gaussians, rationals


def test_gaussian_normal_form():
    z = GaussianRational(Fraction(2, 4), Fraction(-3, 6))
    assert z.real == Fraction(1, 2) and z.imag == Fraction(-1, 2)
    assert z._d > 0


@given(gaussians, gaussians)
def test_field_axioms(a, b):
    assert a + b == b + a
    assert a * b == b * a
    if b:
        assert (a / b) * b == a
    assert (a - b) + b == a


@given(gaussians)
def test_conjugation_is_involution_fixing_rationals(z):
    assert conj(conj(z)) == z
    assert (conj(z) == z) == z.is_real()
    assert z * conj(z) == GaussianRational(z.norm())


@given(rationals)
def test_rationals_fixed_by_conjugation(q):
    assert conj(q) == q
    assert conj(promote(q, GAUSSIAN)) == promote(q, GAUSSIAN)


def test_powers_of_i():
    assert [i_power(k) for k in range(4)] == [1, GaussianRational(0, 1), -1, GaussianRational(0, -1)]
    assert i_power(-1) == GaussianRational(0, -1)


def test_promotion_is_one_way():
    assert promote(Fraction(1, 2), COMPLEX) == 0.5
    with pytest.raises(FieldMismatch):
        promote(GaussianRational(0, 1), RATIONAL)
    with pytest.raises(FieldMismatch):
        promote(1.5, GAUSSIAN)


def test_cross_field_arithmetic_rejected():
    with pytest.raises((FieldMismatch, TypeError)):
        GaussianRational(1, 1) + 0.5


@given(gaussians)
def test_text_round_trip_gaussian(z):
    assert parse_scalar(format_scalar(z), GAUSSIAN) == z


@given(rationals)
def test_text_round_trip_rational(q):
    assert parse_scalar(format_scalar(q), RATIONAL) == q


@given(st.complex_numbers(allow_nan=False, allow_infinity=False, max_magnitude=1e300))
def test_float_round_trip_is_bit_exact(c):
    assert parse_scalar(format_scalar(c), COMPLEX) == c


@pytest.mark.parametrize("text,value", [
    ("i", GaussianRational(0, 1)),
    ("-i", GaussianRational(0, -1)),
    ("1/2+3*i", GaussianRational(Fraction(1, 2), 3)),
    ("2-i", GaussianRational(2, -1)),
    ("-3/4*i", GaussianRational(0, Fraction(-3, 4))),
])
def test_parse_examples(text, value):
    assert parse_scalar(text, GAUSSIAN) == value


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_scalar("1/0+", GAUSSIAN)
    with pytest.raises(ValueError):
        parse_scalar(0.5, RATIONAL)
