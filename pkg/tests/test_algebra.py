import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from _oracles import count_basis, fields, random_field, sympy_bracket, symbols, to_sympy
from normalforms.algebra import (
    Eigenvalues,
    PolyVectorField,
    RealPairStructure,
    bargmann_inner,
    bracket,
    check_reality,
    complexify_planar,
    evaluate,
    grade_project,
    monomial_basis,
    realify_planar,
)
from normalforms.scalar import GaussianRational as G
from normalforms.systems import PAIRS, ROTATION, random_planar

P = PolyVectorField
LAM12 = Eigenvalues.of([1, 2])


def mono(m, r, c=1, order=4):
    return P.monomial(m, r, c, order)


# -- bracket -------------------------------------------------------------------
def test_bracket_example_against_symbolic_oracle():
    phi = mono((2, 0), 0)
    psi = mono((0, 1), 0)
    expected = mono((1, 1), 0, -2)
    assert bracket(phi, psi) == expected
    assert sympy_bracket(phi, psi, 4) == expected


def test_bracket_with_linear_part_gives_divisor():
    lin = P.linear(LAM12, 4)
    assert bracket(lin, mono((2, 0), 1)).is_zero()
    assert bracket(lin, mono((1, 1), 0)) == mono((1, 1), 0, 2)


def test_bracket_dimension_mismatch():
    with pytest.raises(ValueError):
        bracket(P.monomial((1, 0), 0), P.monomial((1, 0, 0), 0))


@given(fields(n=2, gmin=0, gmax=3), fields(n=2, gmin=0, gmax=3))
def test_bracket_matches_symbolic_oracle(f, g):
    assert bracket(f, g, order=3) == sympy_bracket(f, g, 3)


@given(st.integers(2, 3).flatmap(lambda n: st.tuples(fields(n=n, gmax=3), fields(n=n, gmax=3))))
def test_antisymmetry(pair):
    f, g = pair
    assert (bracket(f, g) + bracket(g, f)).is_zero()
    assert bracket(f, f).is_zero()


@given(st.integers(2, 3).flatmap(lambda n: st.tuples(*(fields(n=n, gmax=2, order=3, max_terms=4) for _ in range(3)))))
def test_jacobi(triple):
    f, g, h = triple
    assert (bracket(f, bracket(g, h)) + bracket(g, bracket(h, f)) + bracket(h, bracket(f, g))).is_zero()


@given(st.integers(0, 3), st.integers(0, 3), st.data())
def test_grading(i, j, data):
    f = data.draw(fields(n=2, gmin=i, gmax=i, order=8))
    g = data.draw(fields(n=2, gmin=j, gmax=j, order=8))
    assert all(sum(m) == i + j + 1 for (m, _) in bracket(f, g).terms)


def test_truncation_to_min_order():
    f = P.monomial((2, 0), 0, 1, order=3)
    g = P.monomial((3, 0), 1, 1, order=2)
    out = bracket(f, g)
    assert out.order == 2
    assert out.is_zero()  # the grade-3 result lies above the truncation


# -- Bargmann product ----------------------------------------------------------
def test_bargmann_examples():
    assert bargmann_inner(mono((2, 0), 0), mono((2, 0), 0)) == 2
    assert bargmann_inner(mono((1, 1), 0), mono((1, 1), 1)) == 0
    assert bargmann_inner(mono((1, 1), 0), mono((1, 1), 0)) == 1
    assert bargmann_inner(mono((3, 2), 1), mono((3, 2), 1)) == math.factorial(3) * math.factorial(2)


@given(fields(n=2, gmax=3), fields(n=2, gmax=3))
def test_bargmann_hermitian(v, w):
    assert bargmann_inner(v, w) == bargmann_inner(w, v).conjugate()
    vv = bargmann_inner(v, v)
    assert vv.imag == 0
    assert (vv.real > 0) == (not v.is_zero())


# -- grading and bases ---------------------------------------------------------
def test_grade_project_examples():
    f = P.linear(LAM12, 3) + mono((2, 0), 1, order=3)
    assert grade_project(f, 0) == P.linear(LAM12, 3)
    assert grade_project(f, 1) == mono((2, 0), 1, order=3)
    assert grade_project(P.linear(LAM12, 3), 3).is_zero()


def test_monomial_basis_examples():
    b = monomial_basis(2, 0)
    assert [(i.m, i.r) for i in b] == [((1, 0), 0), ((0, 1), 0), ((1, 0), 1), ((0, 1), 1)]
    assert len(monomial_basis(2, 1)) == 6
    assert len(monomial_basis(3, 1)) == 18


@pytest.mark.parametrize("n,k", [(1, 0), (1, 5), (2, 4), (3, 3), (4, 2)])
def test_monomial_basis_counts(n, k):
    b = monomial_basis(n, k)
    assert len(b) == count_basis(n, k) == len(set(b))
    assert all(sum(i.m) == k + 1 for i in b)


def test_homogeneity_scaling():
    rng = random.Random(3)
    f = random_field(rng, 2, 2, 2, 2)
    x = np.array([0.3 + 0.1j, -0.7])
    for a in (2.0, -0.5):
        assert np.allclose(evaluate(f, a * x), a ** 3 * evaluate(f, x))


# -- evaluation ----------------------------------------------------------------
def test_evaluate_examples():
    assert np.allclose(evaluate(P.linear(LAM12), [1, 1]), [1, 2])
    assert np.allclose(evaluate(mono((2, 0), 1), [2, 0]), [0, 4])
    assert np.allclose(evaluate(P.zero(2), [0.3, 0.4]), [0, 0])


def test_evaluate_against_sympy():
    rng = random.Random(5)
    f = random_field(rng, 3, 0, 3, 3)
    x = [0.2, -0.5 + 0.1j, 0.9]
    xs = symbols(3)
    ref = [complex(c.as_expr().subs(dict(zip(xs, x)))) for c in to_sympy(f)]
    assert np.allclose(evaluate(f, x), ref)


# -- canonical form and serialization -------------------------------------------
def test_zero_coefficients_not_stored():
    f = P(2, {((2, 0), 0): 0, ((1, 1), 1): G(1)}, 2)
    assert list(f.terms) == [((1, 1), 1)]
    g = f + P(2, {((1, 1), 1): G(-1)}, 2)
    assert g.terms == {}


def test_truncation_drops_high_terms():
    f = P(2, {((4, 0), 0): 1, ((2, 0), 0): 1}, 1)
    assert list(f.terms) == [((2, 0), 0)]


@given(fields(n=3, gmax=3))
def test_json_round_trip(f):
    assert P.loads(f.dumps()) == f
    assert P.from_json(f.to_json()).to_json() == f.to_json()


# -- complexification -----------------------------------------------------------
def test_rotation_block_complexifies_to_diagonal():
    A = P.from_matrix([[0, -1], [1, 0]], 3)
    assert complexify_planar(A) == P.linear(ROTATION, 3)


def test_r2x_complexifies_to_z1z2_z():
    r2x = P(2, {((3, 0), 0): 1, ((1, 2), 0): 1, ((2, 1), 1): 1, ((0, 3), 1): 1}, 2)
    expected = P(2, {((2, 1), 0): 1, ((1, 2), 1): 1}, 2)
    assert complexify_planar(r2x) == expected


@pytest.mark.parametrize("seed", range(5))
def test_complexify_round_trip(seed):
    rng = random.Random(seed)
    terms = {}
    for g in (1, 2):
        for idx in monomial_basis(2, g):
            terms[(idx.m, idx.r)] = G(rng.randint(-4, 4), 0) / rng.randint(1, 3)
    real = P.from_matrix([[0, -1], [1, 0]], 2) + P(2, terms, 2)
    z = complexify_planar(real)
    assert check_reality(z, PAIRS)
    assert realify_planar(z) == real


def test_realify_of_random_real_complex_field_is_real():
    f = random_planar(random.Random(1), 3)
    x = realify_planar(f)
    assert all(c.imag == 0 for c in x.terms.values())
    assert complexify_planar(x) == f


def test_complexify_rejects_non_block_linear_part():
    with pytest.raises(ValueError):
        complexify_planar(P.from_matrix([[1, 2], [0, 1]], 2))


def test_pair_structure_validation():
    with pytest.raises(ValueError):
        RealPairStructure(2, ((0, 0),))
    with pytest.raises(ValueError):
        RealPairStructure(2, ((0, 2),))


def test_point_maps_are_inverse():
    x = np.array([0.3, -0.4])
    z = PAIRS.point_to_complex(x)
    assert np.allclose(z, [0.3 - 0.4j, 0.3 + 0.4j])
    assert np.allclose(PAIRS.point_to_real(z), x)
