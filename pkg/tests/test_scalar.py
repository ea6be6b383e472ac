from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from normalforms.scalar import (
    FLOAT,
    GaussianRational as G,
    I_UNIT,
    abs2,
    is_zero,
    scalar_from_json,
    scalar_to_json,
    to_scalar,
)

fracs = st.fractions(min_value=-20, max_value=20, max_denominator=12)
gr = st.builds(G, fracs, fracs)


def _canonical(c: G) -> bool:
    return c._d > 0 and gcd(c._a, c._b, c._d) == 1


@given(gr, gr)
def test_field_operations_stay_canonical(x, y):
    for z in (x + y, x - y, x * y, x.conjugate(), -x):
        assert _canonical(z)
        assert z.real.denominator > 0
    if y:
        q = x / y
        assert _canonical(q)
        assert q * y == x


@given(gr, gr)
def test_matches_python_complex(x, y):
    assert complex(x * y) == pytest.approx(complex(x) * complex(y), abs=1e-9)
    assert complex(x + y) == pytest.approx(complex(x) + complex(y), abs=1e-12)


def test_division_by_zero_raises():
    with pytest.raises(ZeroDivisionError):
        G(1, 2) / G(0)


def test_i_squared_and_abs2():
    assert I_UNIT * I_UNIT == G(-1)
    assert abs2(G(3, 4)) == Fraction(25)
    assert G(1, 2) * G(1, 2).conjugate() == G(5)


@given(gr)
def test_json_round_trip_exact(x):
    assert scalar_from_json(scalar_to_json(x)) == x


def test_to_scalar_forms():
    assert to_scalar("3/4") == G(Fraction(3, 4))
    assert to_scalar(["1/2", "-1"]) == G(Fraction(1, 2), -1)
    assert to_scalar((1, 2), FLOAT) == 1 + 2j
    with pytest.raises(TypeError):
        to_scalar(0.5)
    with pytest.raises(ValueError):
        to_scalar([1, 2, 3])


def test_float_zero_tolerance():
    assert is_zero(1e-11 + 0j)
    assert not is_zero(1e-9 + 0j)
    assert is_zero(G(0))
