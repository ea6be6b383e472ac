"""Coefficient field.

Two backends share one arithmetic interface:

* ``"exact"``: :class:`GaussianRational`, complex numbers with rational real
  and imaginary parts backed by Python integers.
* ``"float"``: builtin :class:`complex`; a coefficient counts as zero when its
  modulus is at most :data:`FLOAT_TOL`.

Mixing the two backends in one arithmetic expression raises ``TypeError``.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from numbers import Rational
from typing import Any, Union

FLOAT_TOL = 1e-10

EXACT = "exact"
FLOAT = "float"
BACKENDS = (EXACT, FLOAT)


class GaussianRational:
    """Exact complex rational ``(a + b*i) / d``.

    The internal triple is kept canonical (``d > 0`` and
    ``gcd(a, b, d) == 1``), so ``real`` and ``imag`` always come out as
    fractions in lowest terms with positive denominators.
    """

    __slots__ = ("_a", "_b", "_d")

    def __new__(cls, real: Any = 0, imag: Any = 0) -> "GaussianRational":
        if isinstance(real, GaussianRational) and imag == 0:
            return real
        if isinstance(real, complex):
            if imag != 0:
                raise TypeError("complex real part with nonzero imag part")
            real, imag = real.real, real.imag
        re = Fraction(real)
        im = Fraction(imag)
        qr, qi = re.denominator, im.denominator
        d = qr * qi // gcd(qr, qi)
        return _make(re.numerator * (d // qr), im.numerator * (d // qi), d)

    # -- accessors -------------------------------------------------------
    @property
    def real(self) -> Fraction:
        return Fraction(self._a, self._d)

    @property
    def imag(self) -> Fraction:
        return Fraction(self._b, self._d)

    def conjugate(self) -> "GaussianRational":
        return _raw(self._a, -self._b, self._d)

    def abs2(self) -> Fraction:
        """Squared modulus, exactly."""
        return Fraction(self._a * self._a + self._b * self._b, self._d * self._d)

    def __abs__(self) -> float:
        return abs(complex(self))

    def __complex__(self) -> complex:
        return complex(self._a / self._d, self._b / self._d)

    def __bool__(self) -> bool:
        return self._a != 0 or self._b != 0

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        a1, b1, d1 = self._a, self._b, self._d
        a2, b2, d2 = o._a, o._b, o._d
        if d1 == d2:
            return _make(a1 + a2, b1 + b2, d1)
        return _make(a1 * d2 + a2 * d1, b1 * d2 + b2 * d1, d1 * d2)

    __radd__ = __add__

    def __neg__(self) -> "GaussianRational":
        return _raw(-self._a, -self._b, self._d)

    def __pos__(self) -> "GaussianRational":
        return self

    def __sub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if type(other) is int:
            return _make(self._a * other, self._b * other, self._d)
        o = _coerce(other)
        if o is None:
            return NotImplemented
        a1, b1, d1 = self._a, self._b, self._d
        a2, b2, d2 = o._a, o._b, o._d
        return _make(a1 * a2 - b1 * b2, a1 * b2 + a2 * b1, d1 * d2)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if type(other) is int:
            if other == 0:
                raise ZeroDivisionError("GaussianRational division by zero")
            return _make(self._a, self._b, self._d * other)
        o = _coerce(other)
        if o is None:
            return NotImplemented
        a2, b2, d2 = o._a, o._b, o._d
        den = a2 * a2 + b2 * b2
        if den == 0:
            raise ZeroDivisionError("GaussianRational division by zero")
        a1, b1 = self._a, self._b
        # (a1 + i b1)(a2 - i b2) d2 / (d1 * den)
        return _make((a1 * a2 + b1 * b2) * d2, (b1 * a2 - a1 * b2) * d2, self._d * den)

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int) -> "GaussianRational":
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return _ONE / (self ** (-k))
        result = _ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- comparison / hashing -------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, complex) or isinstance(other, float):
            return False
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self._a == o._a and self._b == o._b and self._d == o._d

    def __hash__(self) -> int:
        if self._b == 0:
            return hash(Fraction(self._a, self._d))
        return hash((self._a, self._b, self._d))

    def __repr__(self) -> str:
        return f"GaussianRational({str(self.real)!r}, {str(self.imag)!r})"

    def __str__(self) -> str:
        re, im = self.real, self.imag
        if im == 0:
            return str(re)
        if re == 0:
            return f"{im}i"
        sign = "-" if im < 0 else "+"
        return f"({re}{sign}{abs(im)}i)"


def _raw(a: int, b: int, d: int) -> GaussianRational:
    obj = object.__new__(GaussianRational)
    obj._a = a
    obj._b = b
    obj._d = d
    return obj


def _make(a: int, b: int, d: int) -> GaussianRational:
    if d < 0:
        a, b, d = -a, -b, -d
    if d != 1:
        g = gcd(a, b, d)
        if g != 1:
            a //= g
            b //= g
            d //= g
    return _raw(a, b, d)


def _coerce(x) -> GaussianRational | None:
    if type(x) is GaussianRational:
        return x
    if isinstance(x, bool):
        return _raw(int(x), 0, 1)
    if isinstance(x, int):
        return _raw(x, 0, 1)
    if isinstance(x, Rational):
        return _make(x.numerator, 0, x.denominator)
    return None


_ONE = _raw(1, 0, 1)
_ZERO = _raw(0, 0, 1)
I_UNIT = _raw(0, 1, 1)

Scalar = Union[GaussianRational, complex]


# -- backend-generic helpers ----------------------------------------------
def backend_of(c: Any) -> str:
    if isinstance(c, GaussianRational) or isinstance(c, (int, Fraction)):
        return EXACT
    if isinstance(c, (complex, float)):
        return FLOAT
    raise TypeError(f"not a scalar: {c!r}")


def is_zero(c: Any) -> bool:
    if type(c) is GaussianRational:
        return c._a == 0 and c._b == 0
    if isinstance(c, (complex, float)):
        return abs(c) <= FLOAT_TOL
    return c == 0


def zero(backend: str = EXACT) -> Scalar:
    return _ZERO if backend == EXACT else 0j


def one(backend: str = EXACT) -> Scalar:
    return _ONE if backend == EXACT else 1 + 0j


def conj(c: Scalar) -> Scalar:
    return c.conjugate()


def abs2(c: Scalar):
    """Squared modulus; a :class:`Fraction` on the exact backend."""
    if type(c) is GaussianRational:
        return c.abs2()
    return abs(c) ** 2


def to_scalar(value: Any, backend: str = EXACT) -> Scalar:
    """Coerce ``value`` into the given backend.

    Accepts ints, fractions, strings such as ``"3/4"``, ``(re, im)`` pairs,
    complex numbers (float backend only) and existing scalars.
    """
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}")
    if isinstance(value, (tuple, list)):
        if len(value) != 2:
            raise ValueError(f"scalar pair must have two entries: {value!r}")
        re, im = value
        if backend == EXACT:
            return GaussianRational(_parse_rational(re), _parse_rational(im))
        return complex(float(_parse_real(re)), float(_parse_real(im)))
    if backend == EXACT:
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (complex, float)):
            raise TypeError(f"refusing to convert float {value!r} to the exact backend")
        return GaussianRational(_parse_rational(value))
    if isinstance(value, GaussianRational):
        return complex(value)
    if isinstance(value, str):
        return complex(float(Fraction(value)))
    return complex(value)


def _parse_rational(x: Any) -> Fraction:
    if isinstance(x, float):
        raise TypeError(f"refusing float {x!r} on the exact backend; use a string like '1/3'")
    return Fraction(x)


def _parse_real(x: Any) -> float:
    if isinstance(x, str):
        return float(Fraction(x))
    return float(x)


def scalar_to_json(c: Scalar) -> list:
    """``[re, im]`` as ``"p/q"`` strings (exact) or numbers (float)."""
    if type(c) is GaussianRational:
        return [str(c.real), str(c.imag)]
    c = complex(c)
    return [c.real, c.imag]


def scalar_from_json(obj: Any) -> Scalar:
    """Inverse of :func:`scalar_to_json`; the backend follows the JSON types."""
    if isinstance(obj, (list, tuple)):
        if len(obj) != 2:
            raise ValueError(f"scalar must be [re, im], got {obj!r}")
        if all(isinstance(v, str) for v in obj):
            return to_scalar(obj, EXACT)
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            if any(isinstance(v, float) for v in obj):
                return to_scalar(obj, FLOAT)
            return to_scalar(obj, EXACT)
        raise ValueError(f"mixed scalar encoding {obj!r}")
    if isinstance(obj, str):
        return to_scalar(obj, EXACT)
    if isinstance(obj, int) and not isinstance(obj, bool):
        return to_scalar(obj, EXACT)
    if isinstance(obj, float):
        return to_scalar(obj, FLOAT)
    raise ValueError(f"cannot parse scalar {obj!r}")
