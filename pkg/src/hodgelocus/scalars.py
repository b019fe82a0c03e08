"""Scalar fields: rationals, Gaussian rationals Q(i), and complex floats.

Rationals are :class:`fractions.Fraction`; complex floats are Python
``complex``.  Gaussian rationals are stored as an integer triple
``(a, b, d)`` meaning ``(a + b*i)/d`` with ``d > 0`` and ``gcd(a, b, d) = 1``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

RATIONAL = "rational"
GAUSSIAN = "gaussian_rational"
COMPLEX = "complex_float"

FIELDS = (RATIONAL, GAUSSIAN, COMPLEX)
_RANK = {RATIONAL: 0, GAUSSIAN: 1, COMPLEX: 2}


class FieldMismatch(TypeError):
    """Raised when values from different scalar fields are combined implicitly."""


class GaussianRational:
    __slots__ = ("_a", "_b", "_d")

    def __init__(self, real=0, imag=0):
        re_ = Fraction(real)
        im_ = Fraction(imag)
        d = re_.denominator * im_.denominator // math.gcd(re_.denominator, im_.denominator)
        self._set(re_.numerator * (d // re_.denominator), im_.numerator * (d // im_.denominator), d)

    @classmethod
    def _raw(cls, a, b, d):
        obj = cls.__new__(cls)
        obj._set(a, b, d)
        return obj

    def _set(self, a, b, d):
        if d < 0:
            a, b, d = -a, -b, -d
        g = math.gcd(a, b, d)
        if g > 1:
            a //= g
            b //= g
            d //= g
        self._a, self._b, self._d = a, b, d

    @property
    def real(self) -> Fraction:
        return Fraction(self._a, self._d)

    @property
    def imag(self) -> Fraction:
        return Fraction(self._b, self._d)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._raw(self._a, -self._b, self._d)

    def is_real(self) -> bool:
        return self._b == 0

    def norm(self) -> Fraction:
        """|x|^2 as an exact rational."""
        return Fraction(self._a * self._a + self._b * self._b, self._d * self._d)

    @staticmethod
    def _coerce(other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)) or isinstance(other, Rational):
            f = Fraction(other)
            return GaussianRational._raw(f.numerator, 0, f.denominator)
        if isinstance(other, (float, complex)):
            raise FieldMismatch("gaussian_rational does not mix with floats; promote explicitly")
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        d = self._d * o._d
        return GaussianRational._raw(self._a * o._d + o._a * self._d, self._b * o._d + o._b * self._d, d)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational._raw(-self._a, -self._b, self._d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a, b, c, e = self._a, self._b, o._a, o._b
        return GaussianRational._raw(a * c - b * e, a * e + b * c, self._d * o._d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o._a == 0 and o._b == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        # (a+bi)/d / ((c+ei)/f) = (a+bi) f (c-ei) / (d (c^2+e^2))
        a, b, c, e = self._a, self._b, o._a, o._b
        n = c * c + e * e
        return GaussianRational._raw((a * c + b * e) * o._d, (b * c - a * e) * o._d, self._d * n)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("only integer powers")
        if k < 0:
            return GaussianRational(1) / (self ** (-k))
        result = GaussianRational._raw(1, 0, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (float, complex)):
            return NotImplemented
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._a == o._a and self._b == o._b and self._d == o._d

    def __hash__(self):
        if self._b == 0:
            return hash(Fraction(self._a, self._d))
        return hash((self._a, self._b, self._d))

    def __bool__(self):
        return self._a != 0 or self._b != 0

    def __complex__(self):
        return complex(self._a / self._d, self._b / self._d)

    def __abs__(self):
        return abs(complex(self))

    def __repr__(self):
        return f"GaussianRational({format_scalar(self)!r})"

    __str__ = lambda self: format_scalar(self)


I = GaussianRational(0, 1)


def field_of(x) -> str:
    if isinstance(x, GaussianRational):
        return GAUSSIAN
    if isinstance(x, (bool, int, Fraction)) or isinstance(x, Rational):
        return RATIONAL
    if isinstance(x, (float, complex)):
        return COMPLEX
    raise TypeError(f"not a scalar: {x!r}")


def join_fields(*fields: str) -> str:
    return max(fields, key=_RANK.__getitem__) if fields else RATIONAL


def promote(x, field: str):
    """Embed ``x`` into ``field``; only rational -> gaussian -> complex is allowed."""
    src = field_of(x)
    if _RANK[src] > _RANK[field]:
        raise FieldMismatch(f"cannot demote {src} to {field}")
    if field == RATIONAL:
        return Fraction(x)
    if field == GAUSSIAN:
        return x if isinstance(x, GaussianRational) else GaussianRational(x)
    return complex(x)


def conj(x):
    if isinstance(x, (GaussianRational, complex)):
        return x.conjugate()
    return x


def real_part(x):
    return x.real


def is_zero(x, tol: float = 0.0) -> bool:
    if isinstance(x, (float, complex)):
        return abs(x) <= tol
    return not x


def i_power(k: int) -> GaussianRational:
    return ((GaussianRational(1), I, GaussianRational(-1), GaussianRational(0, -1)))[k % 4]


# -- text encoding -----------------------------------------------------------

def format_rational(f: Fraction) -> str:
    f = Fraction(f)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def format_scalar(x) -> str | list:
    """Text form: ``p/q`` for rationals, ``p/q+r/s*i`` for Gaussian rationals.

    Complex floats become a ``[re, im]`` pair of 17-significant-digit decimals.
    """
    if isinstance(x, GaussianRational):
        re_, im_ = x.real, x.imag
        if im_ == 0:
            return format_rational(re_)
        if im_ == 1:
            tail = "i"
        elif im_ == -1:
            tail = "-i"
        else:
            tail = f"{format_rational(im_)}*i"
        if re_ == 0:
            return tail
        if not tail.startswith("-"):
            tail = "+" + tail
        return f"{format_rational(re_)}{tail}"
    if isinstance(x, (float, complex)):
        c = complex(x)
        return [float(f"{c.real:.17g}"), float(f"{c.imag:.17g}")]
    return format_rational(Fraction(x))


def parse_scalar(s, field: str):
    if field == COMPLEX:
        if isinstance(s, (list, tuple)):
            return complex(float(s[0]), float(s[1]))
        if isinstance(s, (int, float)):
            return complex(s)
        return complex(str(s).replace("i", "j").replace("*", ""))
    if isinstance(s, int):
        return promote(s, field)
    if not isinstance(s, str):
        raise ValueError(f"exact scalars must be strings, got {s!r}")
    if field == RATIONAL:
        try:
            return Fraction(s.strip())
        except ValueError:
            raise ValueError(f"bad rational {s!r}") from None
    t = s.replace(" ", "")
    if not t:
        raise ValueError("empty scalar")
    try:
        if not t.endswith("i"):
            return GaussianRational(Fraction(t))
        body = t[:-1]
        k = max(body.rfind("+"), body.rfind("-"))
        if k > 0:
            re_str, im_str = body[:k], body[k:]
        else:
            re_str, im_str = "", body
        im_str = im_str.rstrip("*")
        if im_str in ("", "+"):
            im_ = Fraction(1)
        elif im_str == "-":
            im_ = Fraction(-1)
        else:
            im_ = Fraction(im_str)
        return GaussianRational(Fraction(re_str) if re_str else 0, im_)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"bad gaussian rational {s!r}") from None
