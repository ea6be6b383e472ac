"""Acceptance criteria AC1-AC9.

Each test carries a ``criterion`` marker; the conftest prints one
``[PASS]``/``[FAIL]`` line per criterion with the measured quantities.
"""
from __future__ import annotations

import math
import random
import time

import numpy as np
import pytest

from _oracles import random_field, sympy_bracket
from normalforms import cli
from normalforms.algebra import (
    Eigenvalues,
    PolyVectorField,
    bargmann_inner,
    bracket,
    check_reality,
    monomial_basis,
    scale_by_poly,
)
from normalforms.diagnostics import (
    ErrorBoundInput,
    conjugacy_defect,
    error_bound,
    operator_norm,
    sup_bound,
    verify_bound,
)
from normalforms.lie_structure import centralizer_basis, invariant_monomials, lrf, module_bracket, module_element
from normalforms.linalg import nullspace
from normalforms.normalizer import (
    LowerOrderModifiedError,
    check_form,
    l0_adjoint_matrix,
    l0_matrix,
    poincare_dulac,
    prf,
    resonant_basis,
    to_vector,
)
from normalforms.polynomial import Poly
from normalforms.scalar import GaussianRational as G
from normalforms.systems import (
    PAIRS,
    ROTATION,
    crafted_planar,
    planar_normal_monomials,
    planar_coefficients,
    random_planar,
)
from normalforms.transforms import push_forward, push_forward_substitution_oracle

PLANAR_CASES = [(1, 2), (1, 1), (2, 1)]
CRAFT_SEEDS = {(1, 2): 11, (1, 1): 11, (2, 1): 11}


def _nonzero(d: dict) -> set[int]:
    return {j for j, v in d.items() if v}


# -----------------------------------------------------------------------------
@pytest.mark.criterion("AC1", "planar standard normal form keeps only r^2k (a I + b A) x terms")
def test_ac1_planar_standard_form(detail):
    t0 = time.perf_counter()
    allowed = planar_normal_monomials(7)
    rng = random.Random(2024)
    nonempty = 0
    for _ in range(20):
        f = random_planar(rng, 7)
        res = poincare_dulac(f, ROTATION, 7)
        nf = res.normal_form
        assert set(nf.terms) <= allowed, sorted(set(nf.terms) - allowed)
        assert check_reality(nf, PAIRS)
        assert check_form(res).ok
        nonempty += any(nf.coefficient((j + 1, j), 0) for j in range(1, 4))
    elapsed = time.perf_counter() - t0
    detail(f"20 systems, N=7, {elapsed:.2f}s")
    assert nonempty == 20
    assert elapsed < 10


# -----------------------------------------------------------------------------
def _expected_prf(mu: int, nu: int, jmax: int) -> tuple[set, set]:
    if mu < nu:
        return {mu, 2 * mu} & set(range(1, jmax + 1)), set()
    if mu == nu:
        return {mu, 2 * mu} & set(range(1, jmax + 1)), {mu}
    return set(range(mu, jmax + 1)), {nu}


@pytest.mark.criterion("AC2", "renormalized planar forms match the three printed sparsity patterns")
def test_ac2_prf_planar_patterns(detail):
    t0 = time.perf_counter()
    N, jmax = 9, 4
    deviations = []
    for mu, nu in PLANAR_CASES:
        sys = crafted_planar(mu, nu, N, random.Random(CRAFT_SEEDS[(mu, nu)]))
        res = prf(sys.field, ROTATION, N)
        nf = res.normal_form
        assert set(nf.terms) <= planar_normal_monomials(N)
        assert check_reality(nf, PAIRS)
        assert check_form(res).ok
        a, b = planar_coefficients(nf, N)
        ea, eb = _expected_prf(mu, nu, jmax)
        if mu > nu:
            # the alpha-series is asserted up to r^{4 mu}; anything past it is reported
            limit = 2 * mu
            extra = {j for j in _nonzero(a) | _nonzero(b) if j > limit and not (j in ea and j in _nonzero(a))}
            if extra:
                deviations.append(((mu, nu), sorted(extra)))
            assert {j for j in _nonzero(a) if j <= limit} <= ea
            assert {j for j in _nonzero(b) if j <= limit} == eb
            assert a[mu]
        else:
            assert _nonzero(a) == ea, (mu, nu, a)
            assert _nonzero(b) == eb, (mu, nu, b)
    elapsed = time.perf_counter() - t0
    detail(f"N=9, {elapsed:.2f}s, deviations beyond pattern: {deviations or 'none'}")
    assert elapsed < 60


# -----------------------------------------------------------------------------
@pytest.mark.criterion("AC3", "Lie renormalized planar forms are finite with the printed terms")
def test_ac3_lrf_planar_patterns(detail):
    N = 9
    seen = []
    for mu, nu in PLANAR_CASES:
        sys = crafted_planar(mu, nu, N, random.Random(CRAFT_SEEDS[(mu, nu)]))
        res = lrf(sys.field, ROTATION, N)
        nf = res.normal_form
        assert res.flavor == "LRF"
        assert set(nf.terms) <= planar_normal_monomials(N)
        assert check_reality(nf, PAIRS)
        assert check_form(res, flavor="PD").ok
        a, b = planar_coefficients(nf, N)
        assert _nonzero(a) == {mu, 2 * mu}, (mu, nu, a)
        assert _nonzero(b) == set(range(nu, mu + 1)), (mu, nu, b)
        seen.append(f"({mu},{nu}): a{sorted(_nonzero(a))} b{sorted(_nonzero(b))}")
    detail(", ".join(seen))


# -----------------------------------------------------------------------------
@pytest.mark.criterion("AC4", "nonresonant eigenvalues (2,3) linearize under both PD and PRF")
def test_ac4_nonresonant_linearization(detail):
    lam = Eigenvalues.of([2, 3])
    rng = random.Random(7)
    for _ in range(3):
        f = PolyVectorField.linear(lam, 8) + random_field(rng, 2, 1, 8, 8, density=0.6)
        assert not f.grade(1).is_zero()
        lin = PolyVectorField.linear(lam, 8)
        pd = poincare_dulac(f, lam, 8).normal_form
        pr = prf(f, lam, 8).normal_form
        assert pd == lin
        assert pr == lin
    detail("3 systems, N=8")


# -----------------------------------------------------------------------------
@pytest.mark.criterion("AC5", "Lie series pushforward equals flow substitution on 50 random pairs")
def test_ac5_oracle_equivalence(detail):
    rng = random.Random(55)
    N = 5
    for case in range(50):
        lam = Eigenvalues.of([G(rng.randint(-2, 2), rng.randint(-2, 2)) for _ in range(2)])
        f = PolyVectorField.linear(lam, N) + random_field(rng, 2, 1, N, N, density=0.4)
        m = 1 + case % 3
        h = random_field(rng, 2, m, m, N, density=0.6)
        if h.is_zero():
            h = PolyVectorField.monomial((m + 1, 0), 0, 1, N)
        assert push_forward(f, h, N) == push_forward_substitution_oracle(f, h, N), case
    detail("50 cases, n=2, grades <= 5, exact")


# -----------------------------------------------------------------------------
@pytest.mark.criterion("AC6", "numeric conjugacy defect scales like |x0|^(N+2) for the planar PRF at N=5")
def test_ac6_conjugacy_scaling(detail):
    N = 5
    f = random_planar(random.Random(0), N, coeff=1, denominator=2)
    res = prf(f, ROTATION, N)
    x0 = PAIRS.point_to_complex([0.6, 0.8])
    rep = conjugacy_defect(f, res, x0, [0.1, 0.05, 0.025, 0.0125], T=1.0, steps=1000)
    detail("exponents " + ", ".join(f"{e:.2f}" for e in rep.exponents))
    assert len(rep.exponents) == 3
    assert rep.exponents[0] >= 6.5
    assert all(abs(e - (N + 2)) <= 0.5 for e in rep.exponents)


# -----------------------------------------------------------------------------
def _real_planar(rng: random.Random, eps: float) -> tuple[PolyVectorField, PolyVectorField, list]:
    """``x' = K x + eps g(x)`` in real coordinates with random ``K`` and quadratic+cubic ``g``."""
    K = [[G(rng.randint(-2, 2), 0) / 4 for _ in range(2)] for _ in range(2)]
    K[0][1], K[1][0] = K[0][1] - 1, K[1][0] + 1
    terms = {}
    for g in (1, 2):
        for idx in monomial_basis(2, g):
            terms[(idx.m, idx.r)] = G(rng.randint(-4, 4), 0) / 4
    gfield = PolyVectorField(2, terms, 2)
    lin = PolyVectorField.from_matrix(K, 2)
    e = G(1, 0) / round(1 / eps)
    return lin + gfield.scale(e), gfield, K


@pytest.mark.criterion("AC7", "linear-approximation error stays under the analytic bound; understated M is caught")
def test_ac7_error_bound(detail):
    # closed form for t0 and bound(t0) = delta
    for C, M, eps, mu, delta in [(1, 1, 0.1, 1, 0.1), (2.5, 0.3, 0.01, 2, 0.05), (0.7, 4.0, -0.2, 3, 1.0)]:
        eb = error_bound(ErrorBoundInput(C, M, eps, mu, delta))
        closed = math.log(1 + delta * C / (abs(eps) ** mu * M)) / C
        assert abs(eb.t0 - closed) <= 1e-12 * closed
        assert abs(eb.bound(eb.t0) - delta) <= 1e-12 * delta
    assert abs(error_bound(ErrorBoundInput(1, 1, 0.1, 1, 0.1)).t0 - math.log(2)) <= 1e-12

    rng = random.Random(17)
    R, worst = 1.0, 0.0
    for _ in range(10):
        for eps in (0.1, 0.01):
            f, g, K = _real_planar(rng, eps)
            inp = ErrorBoundInput(operator_norm(K), sup_bound(g, R), eps, 1, 0.1)
            x0 = np.array([0.3, -0.2]) * (1 + rng.random())
            rep = verify_bound(f, inp, x0, T=1.0, steps=1000, radius=R)
            # only samples before leaving the ball count; require most of [0, T] to be covered
            assert rep.samples >= 500, rep
            assert rep.ok, rep
            worst = max(worst, rep.max_ratio)

    # negative control: rotation + eps r^2 x with M understated tenfold
    eps = 0.1
    r2x = PolyVectorField(2, {((3, 0), 0): 1, ((1, 2), 0): 1, ((2, 1), 1): 1, ((0, 3), 1): 1}, 2)
    rot = PolyVectorField.from_matrix([[0, -1], [1, 0]], 2)
    f = rot + r2x.scale(G(1) / 10)
    x0 = np.array([0.6, 0.8])
    R = 1.1
    M = R ** 3  # exact sup of |r^2 x| on the ball
    assert M <= sup_bound(r2x, R)
    honest = verify_bound(f, ErrorBoundInput(1.0, M, eps, 1, 0.1), x0, T=1.0, steps=1000, radius=R)
    under = verify_bound(f, ErrorBoundInput(1.0, M / 10, eps, 1, 0.1), x0, T=1.0, steps=1000, radius=R)
    assert honest.samples >= 500
    assert honest.ok
    assert not under.ok and under.violations > 0
    detail(f"20 runs, worst ratio {worst:.3f}; control flagged {under.violations} samples")


# -----------------------------------------------------------------------------
def _rand_lambda(rng: random.Random, n: int) -> Eigenvalues:
    return Eigenvalues.of([G(rng.randint(-2, 2), rng.randint(-2, 2)) for _ in range(n)])


@pytest.mark.criterion("AC8", "algebra identities hold exactly on at least 200 random cases")
def test_ac8_algebra_properties(detail):
    rng = random.Random(88)
    t0 = time.perf_counter()
    counts = dict.fromkeys(["antisym", "jacobi", "grading", "adjoint", "splitting", "module_bracket", "oracle"], 0)

    for _ in range(40):
        n = rng.choice([2, 3])
        f, g = random_field(rng, n, 0, 3, 3, 0.3), random_field(rng, n, 0, 3, 3, 0.3)
        assert (bracket(f, g) + bracket(g, f)).is_zero()
        counts["antisym"] += 1
    for _ in range(40):
        n = rng.choice([2, 3])
        f, g, h = (random_field(rng, n, 0, 2, 3, 0.25) for _ in range(3))
        jac = bracket(f, bracket(g, h)) + bracket(g, bracket(h, f)) + bracket(h, bracket(f, g))
        assert jac.is_zero()
        counts["jacobi"] += 1
    for _ in range(40):
        n = rng.choice([2, 3])
        i, j = rng.randint(0, 3), rng.randint(0, 3)
        f, g = random_field(rng, n, i, i, 8, 0.5), random_field(rng, n, j, j, 8, 0.5)
        br = bracket(f, g)
        assert all(sum(m) == i + j + 1 for (m, _) in br.terms)
        if counts["oracle"] < 10:
            assert br == sympy_bracket(f, g, 8)
            counts["oracle"] += 1
        counts["grading"] += 1
    for _ in range(40):
        n = rng.choice([2, 3])
        lam = _rand_lambda(rng, n)
        k = rng.randint(1, 3)
        lin, linc = PolyVectorField.linear(lam, k), PolyVectorField.linear(lam.conjugate(), k)
        psi, phi = random_field(rng, n, k, k, k, 0.5), random_field(rng, n, k, k, k, 0.5)
        assert bargmann_inner(bracket(lin, psi), phi) == bargmann_inner(psi, bracket(linc, phi))
        L, La = l0_matrix(lam, k), l0_adjoint_matrix(lam, k)
        basis = monomial_basis(n, k)
        for j, idx in enumerate(basis):
            e_j = PolyVectorField.monomial(idx.m, idx.r, 1, k)
            assert list(L.columns[j]) == to_vector(bracket(lin, e_j), k)
            assert list(La.columns[j]) == to_vector(bracket(linc, e_j), k)
            assert La.columns[j][j] == L.columns[j][j].conjugate()
        counts["adjoint"] += 1
    for _ in range(40):
        n = rng.choice([2, 3])
        lam = Eigenvalues.of([rng.choice([G(1), G(2), G(-1), G(0, 1), G(0, -1), G(3)]) for _ in range(n)])
        k = rng.randint(1, 3)
        L, La = l0_matrix(lam, k), l0_adjoint_matrix(lam, k)
        dim = len(monomial_basis(n, k))
        ker, kera = nullspace(L.rows, dim), nullspace(La.rows, dim)
        res = resonant_basis(lam, k)
        assert len(ker) == len(kera) == res.dim
        assert all(res.contains(v) for v in ker) and all(res.contains(v) for v in kera)
        assert L.rank() + len(ker) == dim
        lin = PolyVectorField.linear(lam, k)
        for v in res.vectors:
            for _ in range(2):
                psi = random_field(rng, n, k, k, k, 0.5)
                assert bargmann_inner(bracket(lin, psi), v) == 0
        counts["splitting"] += 1
    rot_basis = centralizer_basis(ROTATION)
    inv = invariant_monomials(ROTATION, 6)
    for _ in range(40):
        lam, basis, invs = (ROTATION, rot_basis, inv) if rng.random() < 0.5 else _saddle()
        mu = Poly.monomial(rng.choice(invs.monomials), G(rng.randint(1, 3), rng.randint(-2, 2)))
        sigma = Poly.monomial(rng.choice(invs.monomials), G(rng.randint(1, 3), rng.randint(-2, 2)))
        K, Lm = rng.choice(basis.matrices), rng.choice(basis.matrices)
        order = 8
        W1 = module_element((0,) * 2, K, order)
        W2 = module_element((0,) * 2, Lm, order)
        lhs = bracket(scale_by_poly(mu, W1, order), scale_by_poly(sigma, W2, order), order=order)
        assert lhs == module_bracket(mu, K, sigma, Lm, order)
        counts["module_bracket"] += 1

    elapsed = time.perf_counter() - t0
    total = sum(v for k, v in counts.items() if k != "oracle")
    detail(f"{total} cases in {elapsed:.2f}s")
    assert total >= 200
    assert elapsed < 30


_SADDLE = None


def _saddle():
    global _SADDLE
    if _SADDLE is None:
        lam = Eigenvalues.of([1, -1])
        _SADDLE = (lam, centralizer_basis(lam), invariant_monomials(lam, 6))
    return _SADDLE


# -----------------------------------------------------------------------------
@pytest.mark.criterion("AC9", "renormalized forms pass membership at every grade; lower grades never move")
def test_ac9_structural_invariants(detail, tmp_path):
    rng = random.Random(99)
    systems = [(ROTATION, random_planar(rng, 7), 7) for _ in range(4)]
    for lam_vals in ([1, 2], [1, -1], [1, 1], [2, 3], [G(0, 1), G(0, -1)], [0, 0]):
        lam = Eigenvalues.of(lam_vals)
        systems.append((lam, PolyVectorField.linear(lam, 5) + random_field(rng, 2, 1, 5, 5, 0.5), 5))
    lam3 = Eigenvalues.of([1, 2, 3])
    systems.append((lam3, PolyVectorField.linear(lam3, 4) + random_field(rng, 3, 1, 4, 4, 0.3), 4))
    lam3b = Eigenvalues.of([G(0, 1), G(0, -1), 0])
    systems.append((lam3b, PolyVectorField.linear(lam3b, 4) + random_field(rng, 3, 1, 4, 4, 0.3), 4))
    checked = 0
    for lam, f, N in systems:
        try:
            res = prf(f, lam, N)
        except LowerOrderModifiedError as exc:  # pragma: no cover - would falsify the engine
            pytest.fail(f"lower-order modification: {exc}")
        rep = check_form(res)
        assert rep.ok, (lam, rep.first_failure())
        checked += len(rep.grades)
    # the same contract through the command line: exit code 4 must not occur
    spec = tmp_path / "sys.json"
    spec.write_text(
        '{"schema_version": 1, "n": 2, "eigenvalues": [["0","1"],["0","-1"]], "real_pairs": [[1,2]], "order": 7,'
        ' "terms": [{"m":[2,0],"r":1,"c":["1","0"]}, {"m":[1,2],"r":2,"c":["-2","0"]}, {"m":[3,0],"r":2,"c":["1/3","0"]}]}'
    )
    for flavor in ("pd", "prf", "lrf"):
        code, out, _ = cli.run(["normalize", "--flavor", flavor, str(spec)])
        assert code != cli.EXIT_INTERNAL
        assert code == 0 and out["check"]["ok"]
    detail(f"{len(systems)} systems, {checked} grade checks")
