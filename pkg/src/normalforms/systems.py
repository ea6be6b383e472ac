"""Sample systems used by the self-test, the experiment scripts and the tests.

Planar systems are given in the complex coordinates ``z1 = x1 + i x2``,
``z2 = x1 - i x2`` where the rotation ``x' = (-x2, x1)`` becomes
``diag(i, -i)``. A field is real when the coefficient of ``z^m e_r`` is the
conjugate of the coefficient of the swapped monomial.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .algebra import Eigenvalues, PolyVectorField, RealPairStructure, monomial_basis
from .normalizer import poincare_dulac
from .scalar import I_UNIT, GaussianRational, to_scalar

ROTATION = Eigenvalues.of([GaussianRational(0, 1), GaussianRational(0, -1)])
PAIRS = RealPairStructure.planar()


def r2_power_field(j: int, a, b, order: int) -> PolyVectorField:
    """``(z1 z2)^j (a I + b A) z`` for the planar rotation."""
    a, b = to_scalar(a), to_scalar(b)
    return PolyVectorField(2, {((j + 1, j), 0): a + b * I_UNIT, ((j, j + 1), 1): a - b * I_UNIT}, order)


def euler_term(j: int, order: int) -> PolyVectorField:
    """``r^{2j} z``: the identity direction."""
    return r2_power_field(j, 1, 0, order)


def rotation_term(j: int, order: int) -> PolyVectorField:
    """``r^{2j} A z``: the rotation direction."""
    return r2_power_field(j, 0, 1, order)


def planar_coefficients(f: PolyVectorField, order: int) -> tuple[dict, dict]:
    """Read ``a_j, b_j`` off a planar field made of ``r^{2j}(a_j I + b_j A) z`` terms."""
    a, b = {}, {}
    for j in range(1, order // 2 + 1):
        c = f.coefficient((j + 1, j), 0)
        a[j] = c.real
        b[j] = c.imag
    return a, b


def random_planar(rng: random.Random, order: int, lowest: int = 1, coeff: int = 3, density: float = 1.0,
                  denominator: int = 1) -> PolyVectorField:
    """Random real planar field ``A z + ...`` with grades ``lowest .. order``."""
    terms = {}
    for g in range(lowest, order + 1):
        for idx in monomial_basis(2, g):
            if idx.r != 0 or rng.random() > density:
                continue
            c = GaussianRational(rng.randint(-coeff, coeff), rng.randint(-coeff, coeff)) / denominator
            if not c:
                continue
            terms[(idx.m, 0)] = c
            terms[((idx.m[1], idx.m[0]), 1)] = c.conjugate()
    return PolyVectorField.linear(ROTATION, order) + PolyVectorField(2, terms, order)


@dataclass(frozen=True)
class CraftedPlanar:
    mu: int
    nu: int
    field: PolyVectorField
    a: dict
    b: dict


def crafted_planar(mu: int, nu: int, order: int, rng: random.Random, coeff: int = 3, tries: int = 50) -> CraftedPlanar:
    """Random real planar field whose standard normal form has ``a_k = 0`` for
    ``k < mu``, ``b_k = 0`` for ``k < nu`` and ``a_mu, b_nu`` nonzero.

    Only ``mu, nu in {1, 2}`` are supported. The system has no quadratic
    terms, so the cubic resonant part is exactly what is written in.
    """
    if mu not in (1, 2) or nu not in (1, 2):
        raise ValueError("mu and nu must be 1 or 2")
    for _ in range(tries):
        f = random_planar(rng, order, lowest=2, coeff=coeff)
        t = dict(f.terms)
        t.pop(((2, 1), 0), None)
        t.pop(((1, 2), 1), None)
        a1 = rng.choice([-2, -1, 1, 2]) if mu == 1 else 0
        b1 = rng.choice([-2, -1, 1, 2]) if nu == 1 else 0
        f = PolyVectorField(2, t, order) + r2_power_field(1, a1, b1, order)
        nf = poincare_dulac(f, ROTATION, min(order, 4)).normal_form
        a, b = planar_coefficients(nf, min(order, 4))
        if a.get(mu) and b.get(nu) and (mu == 1 or not a.get(1)) and (nu == 1 or not b.get(1)):
            return CraftedPlanar(mu, nu, f, a, b)
    raise RuntimeError("could not draw a system with the requested leading orders")


def planar_normal_monomials(order: int) -> set:
    """Monomials ``(z1 z2)^j z_r e_r`` allowed in the planar standard normal form."""
    out = set()
    for j in range(0, order // 2 + 1):
        out.add(((j + 1, j), 0))
        out.add(((j, j + 1), 1))
    return out
