"""Hypothesis strategies and random generators shared by the tests."""

import random
from fractions import Fraction

from hypothesis import strategies as st

from hodgelocus.linalg import Matrix, inverse
from hodgelocus.scalars import GaussianRational

small_int = st.integers(min_value=-5, max_value=5)
rationals = st.builds(Fraction, st.integers(-9, 9), st.integers(1, 6))
gaussians = st.builds(GaussianRational, rationals, rationals)


def matrices(n, m=None, elements=rationals):
    m = n if m is None else m
    return st.lists(st.lists(elements, min_size=m, max_size=m), min_size=n, max_size=n).map(Matrix)


def vectors(n, elements=rationals):
    return st.lists(elements, min_size=n, max_size=n).map(tuple)


def jordan_matrix(sizes):
    n = sum(sizes)
    rows = [[0] * n for _ in range(n)]
    k = 0
    for s in sizes:
        for i in range(s - 1):
            rows[k + i + 1][k + i] = 1
        k += s
    return Matrix(rows)


def random_partition(rng, n):
    parts = []
    while n:
        p = rng.randint(1, n)
        parts.append(p)
        n -= p
    return parts


def random_invertible(rng, n, lo=-3, hi=3):
    while True:
        P = Matrix([[Fraction(rng.randint(lo, hi), rng.randint(1, 3)) for _ in range(n)] for _ in range(n)])
        try:
            return P, inverse(P)
        except Exception:
            continue


def random_nilpotent(rng, max_dim=10):
    """Random Jordan type conjugated by a random rational matrix; returns (N, sizes)."""
    n = rng.randint(1, max_dim)
    sizes = random_partition(rng, n)
    P, Pi = random_invertible(rng, n)
    return P @ jordan_matrix(sizes) @ Pi, sizes


@st.composite
def nilpotents(draw, max_dim=6):
    seed = draw(st.integers(0, 10**6))
    return random_nilpotent(random.Random(seed), max_dim)


def random_upper_unipotent_log(rng, n):
    rows = [[Fraction(rng.randint(-4, 4), rng.randint(1, 3)) if j > i else Fraction(0) for j in range(n)] for i in range(n)]
    return Matrix(rows)
