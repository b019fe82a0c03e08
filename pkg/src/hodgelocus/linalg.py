"""Dense matrices, subspaces, filtrations and gradings over one scalar field.

Matrices act on column vectors.  A :class:`Subspace` stores its basis as the
rows of the reduced row-echelon form, so two subspaces are equal exactly when
their stored bases are identical.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .scalars import (
    COMPLEX,
    GAUSSIAN,
    RATIONAL,
    FieldMismatch,
    GaussianRational,
    conj,
    field_of,
    join_fields,
    promote,
)

DEFAULT_TOL = 1e-9


def set_default_tol(tol: float) -> None:
    global DEFAULT_TOL
    DEFAULT_TOL = float(tol)


class LinAlgError(ValueError):
    pass


def _coerce_all(rows, field):
    return tuple(tuple(promote(x, field) for x in row) for row in rows)


def _infer_field(rows) -> str:
    return join_fields(*(field_of(x) for row in rows for x in row))


class Matrix:
    """Immutable dense matrix; all entries live in ``field``."""

    __slots__ = ("rows", "field", "nrows", "ncols")

    def __init__(self, rows, field: str | None = None):
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise LinAlgError("ragged matrix")
        if field is None:
            field = _infer_field(rows) if rows else RATIONAL
        self.rows = _coerce_all(rows, field)
        self.field = field
        self.nrows = len(self.rows)
        self.ncols = ncols

    @classmethod
    def _wrap(cls, rows, field, ncols=None):
        m = cls.__new__(cls)
        m.rows = rows
        m.field = field
        m.nrows = len(rows)
        m.ncols = len(rows[0]) if rows else (ncols or 0)
        return m

    @classmethod
    def identity(cls, n: int, field: str = RATIONAL) -> "Matrix":
        one, zero = promote(1, field), promote(0, field)
        return cls._wrap(tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)), field, n)

    @classmethod
    def zeros(cls, r: int, c: int, field: str = RATIONAL) -> "Matrix":
        zero = promote(0, field)
        return cls._wrap(tuple((zero,) * c for _ in range(r)), field, c)

    @classmethod
    def from_columns(cls, cols, field: str | None = None, nrows: int | None = None) -> "Matrix":
        cols = [list(c) for c in cols]
        if not cols:
            return cls.zeros(nrows or 0, 0, field or RATIONAL)
        return cls(list(zip(*cols)), field)

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def columns(self):
        return [tuple(r[j] for r in self.rows) for j in range(self.ncols)]

    def promote(self, field: str) -> "Matrix":
        if field == self.field:
            return self
        return Matrix._wrap(_coerce_all(self.rows, field), field, self.ncols)

    def _check(self, other: "Matrix"):
        if not isinstance(other, Matrix):
            raise TypeError("expected Matrix")
        if other.field != self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}; promote explicitly")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.shape != other.shape:
            raise LinAlgError("shape mismatch")
        return Matrix._wrap(
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)), self.field, self.ncols
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.shape != other.shape:
            raise LinAlgError("shape mismatch")
        return Matrix._wrap(
            tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)), self.field, self.ncols
        )

    def __neg__(self) -> "Matrix":
        return Matrix._wrap(tuple(tuple(-a for a in r) for r in self.rows), self.field, self.ncols)

    def scale(self, c) -> "Matrix":
        c = promote(c, self.field)
        return Matrix._wrap(tuple(tuple(c * a for a in r) for r in self.rows), self.field, self.ncols)

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            self._check(other)
            if self.ncols != other.nrows:
                raise LinAlgError(f"inner dimension mismatch {self.shape} @ {other.shape}")
            cols = other.columns()
            zero = promote(0, self.field)
            out = []
            for r in self.rows:
                nz = [(k, a) for k, a in enumerate(r) if a]
                out.append(tuple(sum((a * c[k] for k, a in nz), zero) for c in cols))
            return Matrix._wrap(tuple(out), self.field, other.ncols)
        return self.apply(other)

    def apply(self, v: Sequence) -> tuple:
        if len(v) != self.ncols:
            raise LinAlgError("vector length mismatch")
        v = [promote(x, self.field) for x in v]
        zero = promote(0, self.field)
        nz = [(k, x) for k, x in enumerate(v) if x]
        return tuple(sum((r[k] * x for k, x in nz), zero) for r in self.rows)

    def __pow__(self, k: int) -> "Matrix":
        if k < 0:
            return inverse(self) ** (-k)
        result = Matrix.identity(self.nrows, self.field)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    @property
    def T(self) -> "Matrix":
        return Matrix._wrap(tuple(zip(*self.rows)) if self.rows else (), self.field, self.nrows)

    def conjugate(self) -> "Matrix":
        return Matrix._wrap(tuple(tuple(conj(a) for a in r) for r in self.rows), self.field, self.ncols)

    @property
    def H(self) -> "Matrix":
        return self.conjugate().T

    def is_zero(self, tol: float | None = None) -> bool:
        if self.field == COMPLEX:
            t = DEFAULT_TOL if tol is None else tol
            return all(abs(a) <= t for r in self.rows for a in r)
        return not any(a for r in self.rows for a in r)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        if self.field == COMPLEX or other.field == COMPLEX:
            return (self.promote(COMPLEX) - other.promote(COMPLEX)).is_zero()
        f = join_fields(self.field, other.field)
        return self.promote(f).rows == other.promote(f).rows

    def __hash__(self):
        return hash((self.rows, self.field))

    def commutator(self, other: "Matrix") -> "Matrix":
        return self @ other - other @ self

    def kron(self, other: "Matrix") -> "Matrix":
        self._check(other)
        rows = []
        for r in self.rows:
            for s in other.rows:
                rows.append(tuple(a * b for a in r for b in s))
        return Matrix._wrap(tuple(rows), self.field, self.ncols * other.ncols)

    def is_integral(self) -> bool:
        if self.field == RATIONAL:
            return all(Fraction(a).denominator == 1 for r in self.rows for a in r)
        if self.field == GAUSSIAN:
            return all(a.is_real() and a.real.denominator == 1 for r in self.rows for a in r)
        return False

    def is_rational(self) -> bool:
        if self.field == RATIONAL:
            return True
        if self.field == GAUSSIAN:
            return all(a.is_real() for r in self.rows for a in r)
        return False

    def real_part(self) -> "Matrix":
        """Rational matrix of real parts (gaussian input) or float real parts."""
        if self.field == RATIONAL:
            return self
        if self.field == GAUSSIAN:
            return Matrix._wrap(tuple(tuple(a.real for a in r) for r in self.rows), RATIONAL, self.ncols)
        return Matrix._wrap(tuple(tuple(complex(a.real) for a in r) for r in self.rows), COMPLEX, self.ncols)

    def to_numpy(self):
        import numpy as np

        return np.array([[complex(a) for a in r] for r in self.rows], dtype=complex).reshape(self.nrows, self.ncols)

    def __repr__(self):
        return f"Matrix({[[str(a) for a in r] for r in self.rows]}, field={self.field!r})"


def vec(v, field: str) -> tuple:
    return tuple(promote(x, field) for x in v)


def dot(u, v):
    return sum((a * b for a, b in zip(u, v)), 0 * u[0] if u else 0)


def vadd(u, v):
    return tuple(a + b for a, b in zip(u, v))


def vsub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def vscale(c, v):
    return tuple(c * a for a in v)


def vconj(v):
    return tuple(conj(a) for a in v)


def is_zero_vector(v, tol: float | None = None) -> bool:
    if v and isinstance(v[0], complex):
        t = DEFAULT_TOL if tol is None else tol
        return all(abs(a) <= t for a in v)
    return not any(v)


# -- row reduction -------------------------------------------------------------


def rref(rows, field: str, tol: float | None = None):
    """Reduced row echelon form.  Returns ``(nonzero_rows, pivot_columns)``.

    Exact fields pivot on the first nonzero entry; complex floats pivot on the
    largest entry and treat entries below ``tol * scale`` as zero.
    """
    m = [list(r) for r in rows]
    if not m:
        return (), ()
    ncols = len(m[0])
    floaty = field == COMPLEX
    if floaty:
        scale = max((abs(a) for r in m for a in r), default=0.0) or 1.0
        eps = (DEFAULT_TOL if tol is None else tol) * max(scale, 1.0)
    pivots = []
    r = 0
    nrows = len(m)
    for c in range(ncols):
        if r == nrows:
            break
        if floaty:
            best = max(range(r, nrows), key=lambda i: abs(m[i][c]))
            if abs(m[best][c]) <= eps:
                for i in range(r, nrows):
                    m[i][c] = 0j
                continue
            piv = best
        else:
            piv = next((i for i in range(r, nrows) if m[i][c]), None)
            if piv is None:
                continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        row = [a / p for a in m[r]]
        if floaty:
            row[c] = 1 + 0j
        m[r] = row
        for i in range(nrows):
            if i != r:
                f = m[i][c]
                if f:
                    mi = m[i]
                    m[i] = [a - f * b for a, b in zip(mi, row)]
                    if floaty:
                        m[i][c] = 0j
        pivots.append(c)
        r += 1
    return tuple(tuple(row) for row in m[:r]), tuple(pivots)


def rank(M: Matrix, tol: float | None = None) -> int:
    return len(rref(M.rows, M.field, tol)[1])


def nullspace(M: Matrix, tol: float | None = None) -> list:
    """Basis (as tuples) of ``{x : M x = 0}``."""
    n = M.ncols
    red, piv = rref(M.rows, M.field, tol)
    one, zero = promote(1, M.field), promote(0, M.field)
    free = [j for j in range(n) if j not in piv]
    basis = []
    for f in free:
        x = [zero] * n
        x[f] = one
        for row, p in zip(red, piv):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def solve(M: Matrix, b, tol: float | None = None):
    """One solution of ``M x = b`` or ``None`` if inconsistent."""
    b = vec(b, M.field)
    aug = [list(r) + [bi] for r, bi in zip(M.rows, b)]
    red, piv = rref(aug, M.field, tol)
    n = M.ncols
    if piv and piv[-1] == n:
        return None
    zero = promote(0, M.field)
    x = [zero] * n
    for row, p in zip(red, piv):
        x[p] = row[n]
    return tuple(x)


def inverse(M: Matrix, tol: float | None = None) -> Matrix:
    n = M.nrows
    if M.ncols != n:
        raise LinAlgError("inverse of non-square matrix")
    ident = Matrix.identity(n, M.field)
    aug = [list(r) + list(e) for r, e in zip(M.rows, ident.rows)]
    red, piv = rref(aug, M.field, tol)
    if len(piv) < n or piv[n - 1] != n - 1:
        raise LinAlgError("singular matrix")
    return Matrix._wrap(tuple(tuple(r[n:]) for r in red), M.field, n)


def det(M: Matrix):
    """Determinant by fraction-free-free elimination (exact fields)."""
    n = M.nrows
    m = [list(r) for r in M.rows]
    d = promote(1, M.field)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c]), None)
        if piv is None:
            return promote(0, M.field)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            d = -d
        p = m[c][c]
        d = d * p
        for i in range(c + 1, n):
            f = m[i][c] / p
            if f:
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return d


def leading_minors(M: Matrix) -> list:
    """Leading principal minors, computed from one elimination pass."""
    n = M.nrows
    m = [list(r) for r in M.rows]
    minors = []
    d = promote(1, M.field)
    for c in range(n):
        p = m[c][c]
        if not p:
            # a vanishing leading minor: remaining minors computed directly
            minors.append(promote(0, M.field))
            for k in range(c + 2, n + 1):
                minors.append(det(Matrix._wrap(tuple(tuple(r[:k]) for r in M.rows[:k]), M.field, k)))
            return minors
        d = d * p
        minors.append(d)
        for i in range(c + 1, n):
            f = m[i][c] / p
            if f:
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return minors


# -- nilpotent / unipotent calculus --------------------------------------------


def is_nilpotent(N: Matrix) -> bool:
    n = N.nrows
    return (N ** n).is_zero() if n else True


def nilpotency_index(N: Matrix) -> int:
    """Smallest ``k`` with ``N^(k+1) = 0``; raises if ``N`` is not nilpotent."""
    n = N.nrows
    P = Matrix.identity(n, N.field)
    for k in range(n + 1):
        P = P @ N
        if P.is_zero():
            return k
    raise LinAlgError("matrix is not nilpotent")


def exp_nilpotent(N: Matrix) -> Matrix:
    """``sum N^k / k!`` -- exact, finite because N is nilpotent."""
    n = N.nrows
    if not is_nilpotent(N):
        raise LinAlgError("exp_nilpotent: input is not nilpotent")
    result = Matrix.identity(n, N.field)
    term = Matrix.identity(n, N.field)
    for k in range(1, n + 1):
        term = (term @ N).scale(Fraction(1, k) if N.field != COMPLEX else 1.0 / k)
        if term.is_zero():
            break
        result = result + term
    return result


def log_unipotent(M: Matrix) -> Matrix:
    n = M.nrows
    E = M - Matrix.identity(n, M.field)
    if not is_nilpotent(E):
        raise LinAlgError("log_unipotent: input is not unipotent")
    result = Matrix.zeros(n, n, M.field)
    term = Matrix.identity(n, M.field)
    for k in range(1, n + 1):
        term = term @ E
        if term.is_zero():
            break
        c = Fraction((-1) ** (k + 1), k)
        result = result + term.scale(c if M.field != COMPLEX else float(c))
    return result


def unipotent_sqrt(g: Matrix) -> Matrix:
    L = log_unipotent(g)
    half = Fraction(1, 2) if g.field != COMPLEX else 0.5
    return exp_nilpotent(L.scale(half))


# -- subspaces -----------------------------------------------------------------


class Subspace:
    """Subspace of ``field^n`` with a canonical (reduced echelon) basis."""

    __slots__ = ("n", "field", "basis", "pivots")

    def __init__(self, vectors: Iterable, n: int | None = None, field: str | None = None, tol=None):
        vectors = [tuple(v) for v in vectors]
        if n is None:
            if not vectors:
                raise LinAlgError("ambient dimension required for an empty span")
            n = len(vectors[0])
        if any(len(v) != n for v in vectors):
            raise LinAlgError("vector length differs from ambient dimension")
        if field is None:
            field = _infer_field(vectors) if vectors else RATIONAL
        rows = _coerce_all(vectors, field)
        self.n = n
        self.field = field
        self.basis, self.pivots = rref(rows, field, tol)

    @classmethod
    def _from_rref(cls, basis, pivots, n, field):
        s = cls.__new__(cls)
        s.n, s.field, s.basis, s.pivots = n, field, basis, pivots
        return s

    @classmethod
    def zero(cls, n: int, field: str = RATIONAL) -> "Subspace":
        return cls._from_rref((), (), n, field)

    @classmethod
    def full(cls, n: int, field: str = RATIONAL) -> "Subspace":
        return cls._from_rref(Matrix.identity(n, field).rows, tuple(range(n)), n, field)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __len__(self):
        return self.dim

    def is_zero(self) -> bool:
        return not self.basis

    def is_full(self) -> bool:
        return self.dim == self.n

    def promote(self, field: str) -> "Subspace":
        if field == self.field:
            return self
        if field == COMPLEX:
            return Subspace(self.basis, self.n, COMPLEX)
        return Subspace._from_rref(_coerce_all(self.basis, field), self.pivots, self.n, field)

    def _pair(self, other: "Subspace"):
        if self.n != other.n:
            raise LinAlgError(f"ambient dimensions differ: {self.n} vs {other.n}")
        if self.field != other.field:
            raise FieldMismatch(f"{self.field} vs {other.field}; promote explicitly")

    def basis_matrix(self) -> Matrix:
        """Rows are the echelon basis vectors."""
        return Matrix._wrap(self.basis, self.field, self.n)

    def annihilator(self) -> "Subspace":
        """``{x : b . x = 0 for every basis vector b}`` (bilinear, no conjugation)."""
        if not self.basis:
            return Subspace.full(self.n, self.field)
        return Subspace(nullspace(self.basis_matrix()), self.n, self.field)

    def __add__(self, other: "Subspace") -> "Subspace":
        self._pair(other)
        if not other.basis:
            return self
        if not self.basis:
            return other
        return Subspace(self.basis + other.basis, self.n, self.field)

    def __and__(self, other: "Subspace") -> "Subspace":
        self._pair(other)
        if not self.basis or not other.basis:
            return Subspace.zero(self.n, self.field)
        if self.is_full():
            return other
        if other.is_full():
            return self
        return (self.annihilator() + other.annihilator()).annihilator()

    intersect = __and__

    def contains(self, v, tol=None) -> bool:
        v = vec(v, self.field)
        if self.field == COMPLEX:
            return Subspace(self.basis + (v,), self.n, COMPLEX, tol).dim == self.dim
        # reduce v against the echelon basis
        w = list(v)
        for row, p in zip(self.basis, self.pivots):
            c = w[p]
            if c:
                w = [a - c * b for a, b in zip(w, row)]
        return not any(w)

    def __contains__(self, v) -> bool:
        return self.contains(v)

    def __le__(self, other: "Subspace") -> bool:
        self._pair(other)
        return all(other.contains(b) for b in self.basis)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        if self.n != other.n or self.dim != other.dim:
            return False
        if self.field == COMPLEX or other.field == COMPLEX:
            a, b = self.promote(COMPLEX), other.promote(COMPLEX)
            return a.pivots == b.pivots and all(
                abs(x - y) <= DEFAULT_TOL * 10 for r, s in zip(a.basis, b.basis) for x, y in zip(r, s)
            )
        f = join_fields(self.field, other.field)
        return self.promote(f).basis == other.promote(f).basis

    def __hash__(self):
        return hash((self.n, self.basis))

    def conjugate(self) -> "Subspace":
        if self.field == RATIONAL:
            return self
        return Subspace(tuple(vconj(b) for b in self.basis), self.n, self.field)

    def is_rational(self) -> bool:
        """True when the subspace is defined over Q (its echelon basis is real)."""
        if self.field == RATIONAL:
            return True
        if self.field == GAUSSIAN:
            return all(x.is_real() for b in self.basis for x in b)
        return all(abs(x.imag) <= DEFAULT_TOL for b in self.basis for x in b)

    def rational(self) -> "Subspace":
        """The same subspace viewed over Q; requires :meth:`is_rational`."""
        if self.field == RATIONAL:
            return self
        if not self.is_rational():
            raise LinAlgError("subspace is not defined over Q")
        return Subspace._from_rref(
            tuple(tuple(x.real for x in b) for b in self.basis), self.pivots, self.n, RATIONAL
        )

    def real_points(self) -> "Subspace":
        """Largest conjugation-stable subspace, returned over Q (gaussian input)."""
        if self.field == RATIONAL:
            return self
        return (self & self.conjugate()).rational()

    def image(self, M: Matrix) -> "Subspace":
        if M.field != self.field:
            raise FieldMismatch(f"{M.field} vs {self.field}")
        return Subspace([M.apply(b) for b in self.basis], M.nrows, self.field)

    def preimage(self, M: Matrix) -> "Subspace":
        """``{x : M x in self}``."""
        if M.field != self.field:
            raise FieldMismatch(f"{M.field} vs {self.field}")
        ann = self.annihilator()
        if not ann.basis:
            return Subspace.full(M.ncols, self.field)
        return Subspace(nullspace(ann.basis_matrix() @ M), M.ncols, self.field)

    def coordinates(self, v) -> tuple:
        """Coordinates of ``v`` in the echelon basis (``v`` must lie in the span)."""
        v = vec(v, self.field)
        if not self.contains(v):
            raise LinAlgError("vector not in subspace")
        return tuple(v[p] for p in self.pivots)

    def complement_basis(self, sub: "Subspace") -> list:
        """Echelon basis vectors of ``self`` extending ``sub`` to a basis of ``self``.

        Greedy: walk this space's echelon basis in order and keep each vector not
        already in the running span.  Deterministic for fixed inputs.
        """
        self._pair(sub)
        chosen = []
        span = sub
        for b in self.basis:
            if span.dim == self.dim:
                break
            if not span.contains(b):
                chosen.append(b)
                span = span + Subspace([b], self.n, self.field)
        return chosen

    def __repr__(self):
        return f"Subspace(dim={self.dim}, n={self.n}, field={self.field!r})"


def span(vectors, n=None, field=None) -> Subspace:
    return Subspace(vectors, n, field)


def unit_vector(i: int, n: int, field: str = RATIONAL) -> tuple:
    one, zero = promote(1, field), promote(0, field)
    return tuple(one if j == i else zero for j in range(n))


# -- filtrations ---------------------------------------------------------------

INCREASING = "increasing"
DECREASING = "decreasing"


class Filtration:
    """A finite filtration by subspaces.

    ``steps`` lists the spaces on a contiguous index range ``[lo, hi]``; gaps
    given to the constructor are filled from the neighbouring step.  Outside
    the range an increasing filtration is ``0`` below and ``V`` above, a
    decreasing one is ``V`` below and ``0`` above.
    """

    __slots__ = ("direction", "n", "field", "lo", "hi", "_steps")

    def __init__(self, steps: Mapping[int, Subspace], direction: str, n: int | None = None, field: str | None = None):
        if direction not in (INCREASING, DECREASING):
            raise ValueError(direction)
        if not steps:
            if n is None:
                raise LinAlgError("empty filtration needs n")
            steps = {0: Subspace.full(n, field or RATIONAL)} if direction == INCREASING else {
                0: Subspace.full(n, field or RATIONAL)
            }
        keys = sorted(steps)
        first = steps[keys[0]]
        n = first.n if n is None else n
        if field is None:
            field = join_fields(*(s.field for s in steps.values()))
        filled = {}
        for k in range(keys[0], keys[-1] + 1):
            if k in steps:
                filled[k] = steps[k].promote(field)
            else:
                if direction == INCREASING:
                    filled[k] = filled[k - 1]
                else:
                    nxt = min(j for j in keys if j > k)
                    filled[k] = steps[nxt].promote(field)
        self.direction = direction
        self.n = n
        self.field = field
        self.lo, self.hi = keys[0], keys[-1]
        self._steps = filled
        self._validate()

    def _validate(self):
        for k in range(self.lo, self.hi + 1):
            s = self._steps[k]
            if s.n != self.n:
                raise LinAlgError("filtration steps have different ambient dimensions")
            if k > self.lo:
                prev = self._steps[k - 1]
                ok = prev <= s if self.direction == INCREASING else s <= prev
                if not ok:
                    raise LinAlgError(f"filtration not nested at index {k}")

    def __getitem__(self, k: int) -> Subspace:
        if k in self._steps:
            return self._steps[k]
        below = k < self.lo
        if self.direction == INCREASING:
            return Subspace.zero(self.n, self.field) if below else Subspace.full(self.n, self.field)
        return Subspace.full(self.n, self.field) if below else Subspace.zero(self.n, self.field)

    def indices(self) -> range:
        return range(self.lo, self.hi + 1)

    def support(self) -> range:
        """Smallest index range outside which the filtration is 0 or V."""
        if self.direction == INCREASING:
            zero_top = max((k for k in self.indices() if self[k].is_zero()), default=self.lo - 1)
            full_bot = min((k for k in self.indices() if self[k].is_full()), default=self.hi + 1)
            return range(zero_top + 1, full_bot + 1)
        full_top = max((k for k in self.indices() if self[k].is_full()), default=self.lo - 1)
        zero_bot = min((k for k in self.indices() if self[k].is_zero()), default=self.hi + 1)
        return range(full_top, zero_bot)

    def items(self):
        return [(k, self._steps[k]) for k in self.indices()]

    def as_dict(self) -> dict:
        return dict(self.items())

    def graded_dims(self) -> dict:
        """``dim Gr_k``: for increasing ``W_k/W_{k-1}``; for decreasing ``F^p/F^{p+1}``."""
        out = {}
        for k in range(self.lo - 1, self.hi + 2):
            if self.direction == INCREASING:
                d = self[k].dim - self[k - 1].dim
            else:
                d = self[k].dim - self[k + 1].dim
            if d:
                out[k] = d
        return out

    def shift(self, m: int) -> "Filtration":
        """``W[m]_k = W_{k+m}`` (for decreasing, ``F[m]^p = F^{p+m}``)."""
        return Filtration({k - m: s for k, s in self.items()}, self.direction, self.n, self.field)

    def apply(self, M: Matrix) -> "Filtration":
        if M.field != self.field:
            f = join_fields(M.field, self.field)
            return self.promote(f).apply(M.promote(f))
        return Filtration({k: s.image(M) for k, s in self.items()}, self.direction, self.n, self.field)

    def promote(self, field: str) -> "Filtration":
        if field == self.field:
            return self
        return Filtration({k: s.promote(field) for k, s in self.items()}, self.direction, self.n, field)

    def conjugate(self) -> "Filtration":
        return Filtration({k: s.conjugate() for k, s in self.items()}, self.direction, self.n, self.field)

    def is_rational(self) -> bool:
        return all(s.is_rational() for _, s in self.items())

    def rational(self) -> "Filtration":
        return Filtration({k: s.rational() for k, s in self.items()}, self.direction, self.n, RATIONAL)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Filtration):
            return NotImplemented
        if self.direction != other.direction or self.n != other.n:
            return False
        lo = min(self.lo, other.lo) - 1
        hi = max(self.hi, other.hi) + 1
        return all(self[k] == other[k] for k in range(lo, hi + 1))

    def __repr__(self):
        dims = {k: s.dim for k, s in self.items()}
        return f"Filtration({self.direction}, n={self.n}, dims={dims})"


def increasing(steps, n=None, field=None) -> Filtration:
    return Filtration(steps, INCREASING, n, field)


def decreasing(steps, n=None, field=None) -> Filtration:
    return Filtration(steps, DECREASING, n, field)


def trivial_filtration(n: int, jump: int, direction: str, field: str = RATIONAL) -> Filtration:
    """Single jump at ``jump``: W_{jump-1} = 0, W_jump = V (or F^jump = V, F^{jump+1} = 0)."""
    if direction == INCREASING:
        return Filtration({jump - 1: Subspace.zero(n, field), jump: Subspace.full(n, field)}, direction, n, field)
    return Filtration({jump: Subspace.full(n, field), jump + 1: Subspace.zero(n, field)}, direction, n, field)


# -- gradings ------------------------------------------------------------------


class Grading:
    """Direct-sum decomposition of ``field^n`` indexed by ``Z^d`` multi-indices."""

    __slots__ = ("d", "n", "field", "pieces", "_basis", "_inv", "_slices")

    def __init__(self, pieces: Mapping[tuple, Subspace], d: int | None = None, n: int | None = None, field=None):
        pieces = {tuple(k): s for k, s in pieces.items() if not s.is_zero()}
        if not pieces:
            raise LinAlgError("grading with no nonzero pieces")
        if d is None:
            d = len(next(iter(pieces)))
        if any(len(k) != d for k in pieces):
            raise LinAlgError("multi-indices of different lengths")
        if field is None:
            field = join_fields(*(s.field for s in pieces.values()))
        pieces = {k: s.promote(field) for k, s in sorted(pieces.items())}
        if n is None:
            n = next(iter(pieces.values())).n
        self.d, self.n, self.field, self.pieces = d, n, field, pieces
        cols, slices, pos = [], {}, 0
        for k, s in pieces.items():
            cols.extend(s.basis)
            slices[k] = (pos, pos + s.dim)
            pos += s.dim
        if pos != n:
            raise LinAlgError(f"grading pieces have total dimension {pos}, ambient is {n}")
        B = Matrix.from_columns(cols, field)
        try:
            self._inv = inverse(B)
        except LinAlgError:
            raise LinAlgError("grading pieces are not independent") from None
        self._basis = B
        self._slices = slices

    def __getitem__(self, k) -> Subspace:
        k = tuple(k)
        return self.pieces.get(k, Subspace.zero(self.n, self.field))

    def indices(self):
        return list(self.pieces)

    def components(self, v) -> dict:
        """``{index: component of v in that piece}`` (nonzero components only)."""
        v = vec(v, self.field)
        c = self._inv.apply(v)
        zero = promote(0, self.field)
        out = {}
        for k, (a, b) in self._slices.items():
            coeffs = c[a:b]
            if any(coeffs) if self.field != COMPLEX else any(abs(x) > DEFAULT_TOL for x in coeffs):
                comp = [zero] * self.n
                for j, x in zip(range(a, b), coeffs):
                    col = [row[j] for row in self._basis.rows]
                    comp = [p + x * q for p, q in zip(comp, col)]
                out[k] = tuple(comp)
        return out

    def projector(self, k) -> Matrix:
        return self.operator({tuple(k): 1})

    def operator(self, weights) -> Matrix:
        """``sum_k w(k) * projector(k)``; ``weights`` is a mapping or a callable."""
        diag = []
        for k, (a, b) in self._slices.items():
            w = weights(k) if callable(weights) else weights.get(k, 0)
            diag.extend([promote(w, self.field) if not isinstance(w, float) else complex(w)] * (b - a))
        field = self.field
        if any(isinstance(x, complex) for x in diag) and field != COMPLEX:
            field = COMPLEX
        B = self._basis.promote(field)
        D = Matrix._wrap(
            tuple(tuple(diag[i] if i == j else promote(0, field) for j in range(self.n)) for i in range(self.n)),
            field,
            self.n,
        )
        return B @ D.promote(field) @ self._inv.promote(field)

    def basis_matrix(self) -> Matrix:
        """Columns: piece bases, concatenated in index order."""
        return self._basis

    def apply(self, g: Matrix) -> "Grading":
        return Grading({k: s.image(g.promote(self.field) if g.field != self.field else g) for k, s in self.pieces.items()},
                       self.d, self.n, self.field)

    def promote(self, field) -> "Grading":
        return Grading({k: s.promote(field) for k, s in self.pieces.items()}, self.d, self.n, field)

    def dims(self) -> dict:
        return {k: s.dim for k, s in self.pieces.items()}

    def __eq__(self, other):
        if not isinstance(other, Grading):
            return NotImplemented
        return self.pieces.keys() == other.pieces.keys() and all(
            self.pieces[k] == other.pieces[k] for k in self.pieces
        )

    def __repr__(self):
        return f"Grading(d={self.d}, dims={self.dims()})"


def lcm_denominator(values) -> int:
    out = 1
    for x in values:
        if isinstance(x, GaussianRational):
            dens = (x.real.denominator, x.imag.denominator)
        else:
            dens = (Fraction(x).denominator,)
        for d in dens:
            out = out * d // math.gcd(out, d)
    return out
