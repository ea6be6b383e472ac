"""Centralizer, invariants and the module structure of resonant fields.

Resonant fields are written as ``sum_alpha mu_alpha(x) K_alpha x`` with
``K_alpha`` spanning the centralizer of ``A = diag(lambda)`` and ``mu_alpha``
polynomial invariants of ``x' = Ax``. When every resonant field has such a
form (quasi-linear case) and the centralizer has a terminating descending
central series, reduction can proceed one centralizer direction at a time:
the Lie renormalized form.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .algebra import (
    Eigenvalues,
    PolyVectorField,
    as_eigenvalues,
    exponents,
    lie_derivative,
    scale_by_poly,
)
from .linalg import independent_columns, solve
from .normalizer import (
    MethodNotApplicableError,
    LowerOrderModifiedError,
    NormalFormResult,
    ReductionEngine,
    StageRecord,
    grade_slice,
    is_resonant,
    poincare_dulac,
    to_vector,
    _combine,
)
from .polynomial import Poly
from .scalar import EXACT, is_zero, one, scalar_to_json, zero
from .transforms import GeneratorSequence

Matrix = list[list]


# -----------------------------------------------------------------------------
# small matrix helpers
def _identity(n: int, b: str) -> Matrix:
    return [[one(b) if i == j else zero(b) for j in range(n)] for i in range(n)]


def matmul(X: Matrix, Y: Matrix) -> Matrix:
    n = len(X)
    return [[sum((X[i][s] * Y[s][j] for s in range(n)), zero(_backend(X))) for j in range(n)] for i in range(n)]


def commutator(X: Matrix, Y: Matrix) -> Matrix:
    XY, YX = matmul(X, Y), matmul(Y, X)
    return [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(XY, YX)]


def _flat(X: Matrix) -> list:
    return [c for row in X for c in row]


def _backend(X: Matrix) -> str:
    from .scalar import backend_of

    return backend_of(X[0][0])


def _span_rank(mats: Sequence[Matrix], n: int, b: str) -> list[int]:
    return independent_columns([_flat(M) for M in mats], n * n, b)


def _in_span(X: Matrix, mats: Sequence[Matrix], n: int, b: str) -> bool:
    if all(is_zero(c) for c in _flat(X)):
        return True
    return len(_span_rank(list(mats) + [X], n, b)) == len(_span_rank(mats, n, b)) if mats else False


def _mat_json(X: Matrix) -> list:
    return [[scalar_to_json(c) for c in row] for row in X]


# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class CentralizerBasis:
    """Basis ``K_1 = I, K_2 = A, ...`` of the matrices commuting with ``A``."""

    matrices: tuple
    labels: tuple[str, ...]
    includes_A: bool

    @property
    def d(self) -> int:
        return len(self.matrices)

    @property
    def n(self) -> int:
        return len(self.matrices[0])

    def field(self, alpha: int, order: int = 0) -> PolyVectorField:
        """Linear field ``K_alpha x``."""
        return PolyVectorField.from_matrix(self.matrices[alpha], order, _backend(self.matrices[alpha]))

    def to_json(self) -> dict:
        return {"labels": list(self.labels), "includes_A": self.includes_A,
                "matrices": [_mat_json(M) for M in self.matrices]}


def centralizer_basis(lam) -> CentralizerBasis:
    """Centralizer of ``diag(lambda)``: block-diagonal over equal eigenvalues.

    The basis starts with ``I`` and ``A`` (when ``A`` is not a multiple of
    ``I``), then adds elementary matrices inside equal-eigenvalue blocks.
    """
    lam = as_eigenvalues(lam)
    n, b = lam.n, lam.backend
    mats = [_identity(n, b)]
    labels = ["I"]
    A = [[lam[i] if i == j else zero(b) for j in range(n)] for i in range(n)]
    includes_A = False
    if not lam.is_zero() and not _in_span(A, mats, n, b):
        mats.append(A)
        labels.append("A")
        includes_A = True
    blocks: dict = {}
    for i, v in enumerate(lam):
        key = next((k for k in blocks if is_zero(k - v)), v)
        blocks.setdefault(key, []).append(i)
    target = sum(len(ix) ** 2 for ix in blocks.values())
    for ix in blocks.values():
        for i in ix:
            for j in ix:
                if len(mats) == target:
                    break
                E = [[one(b) if (r, c) == (i, j) else zero(b) for c in range(n)] for r in range(n)]
                if not _in_span(E, mats, n, b):
                    mats.append(E)
                    labels.append(f"E{i + 1}{j + 1}")
    return CentralizerBasis(tuple(mats), tuple(labels), includes_A)


# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class InvariantSet:
    """Monomial invariants ``x^m`` with ``m . lambda = 0`` up to a degree cap."""

    monomials: tuple[tuple[int, ...], ...]
    cap: int
    basic: tuple[tuple[int, ...], ...] = ()

    @property
    def single_basic_invariant(self) -> bool:
        """Sufficient condition for quasi-linearity: exactly one basic invariant."""
        return len(self.basic) == 1

    def of_degree(self, d: int) -> list[tuple[int, ...]]:
        return [m for m in self.monomials if sum(m) == d]

    def to_json(self) -> dict:
        return {"cap": self.cap, "monomials": [list(m) for m in self.monomials],
                "basic": [list(m) for m in self.basic], "single_basic_invariant": self.single_basic_invariant}


def invariant_monomials(lam, cap: int) -> InvariantSet:
    lam = as_eigenvalues(lam)
    if cap < 1:
        raise ValueError("cap must be >= 1")
    found = []
    for d in range(1, cap + 1):
        if d == 1 and not any(is_zero(v) for v in lam):
            continue
        for m in exponents(lam.n, d):
            if is_zero(lam.dot(m)):
                found.append(m)
    fs = set(found)
    basic = []
    for m in found:
        decomposable = any(
            all(a <= c for a, c in zip(u, m)) and tuple(c - a for a, c in zip(u, m)) in fs
            for u in found if u != m and sum(u) < sum(m)
        )
        if not decomposable:
            basic.append(m)
    return InvariantSet(tuple(found), cap, tuple(basic))


# -----------------------------------------------------------------------------
def module_element(m: Sequence[int], K: Matrix, order: int | None = None) -> PolyVectorField:
    """The field ``x^m K x``."""
    b = _backend(K)
    lin = PolyVectorField.from_matrix(K, 0, b)
    return scale_by_poly(Poly.monomial(m, one(b), b), lin, sum(m) if order is None else order)


def _module_generators(basis: CentralizerBasis, inv: InvariantSet, k: int) -> list[tuple[tuple, int]]:
    ms = [tuple([0] * basis.n)] if k == 0 else inv.of_degree(k)
    return [(m, a) for a in range(basis.d) for m in ms]


@dataclass(frozen=True)
class ModuleDecomposition:
    """Coefficients ``mu_alpha`` per grade, or the first grade where none exist."""

    quasi_linear: bool
    per_grade: tuple  # ((k, {alpha: Poly}), ...)
    labels: tuple[str, ...]
    failed_grade: int | None = None

    def coefficient(self, alpha: int) -> Poly | None:
        total = None
        for _, coeffs in self.per_grade:
            p = coeffs.get(alpha)
            if p is not None:
                total = p if total is None else total + p
        return total

    def reassemble(self, basis: CentralizerBasis, order: int) -> PolyVectorField:
        out = PolyVectorField.zero(basis.n, order, _backend(basis.matrices[0]))
        for k, coeffs in self.per_grade:
            for a, p in coeffs.items():
                out = out + scale_by_poly(p, basis.field(a, order), order)
        return out

    def to_json(self) -> dict:
        rows = []
        for k, coeffs in self.per_grade:
            rows.append({"k": k, "coeffs": {self.labels[a]: [{"m": list(m), "c": scalar_to_json(c)} for m, c in p.items()]
                                            for a, p in coeffs.items()}})
        out = {"quasi_linear": self.quasi_linear, "per_grade": rows}
        if self.failed_grade is not None:
            out["failed_grade"] = self.failed_grade
        return out


def module_decompose(W: PolyVectorField, basis: CentralizerBasis, inv: InvariantSet) -> ModuleDecomposition:
    """Write each grade of ``W`` as ``sum_alpha mu_alpha(x) K_alpha x`` with invariant ``mu_alpha``.

    Failure is reported in the result (``quasi_linear = False``) rather
    than raised.
    """
    b = W.backend
    per_grade = []
    for k in sorted(set(W.grades())):
        gens = _module_generators(basis, inv, k)
        target = to_vector(W, k, b)
        cols = [to_vector(module_element(m, basis.matrices[a], k), k, b) for m, a in gens]
        sol = solve([list(r) for r in zip(*cols)], target, len(cols), b) if cols else None
        if sol is None:
            return ModuleDecomposition(False, tuple(per_grade), basis.labels, k)
        coeffs: dict[int, Poly] = {}
        for (m, a), c in zip(gens, sol):
            if is_zero(c):
                continue
            term = Poly.monomial(m, c, b)
            coeffs[a] = coeffs[a] + term if a in coeffs else term
        per_grade.append((k, coeffs))
    return ModuleDecomposition(True, tuple(per_grade), basis.labels)


def module_bracket(mu: Poly, K: Matrix, sigma: Poly, L: Matrix, order: int) -> PolyVectorField:
    """Bracket of ``mu K x`` and ``sigma L x`` assembled term by term.

    ``{mu X, sigma Y} = mu X(sigma) Y - sigma Y(mu) X + mu sigma (L K - K L) x``
    where ``X = Kx``, ``Y = Lx`` and ``X(sigma)`` is a directional derivative.
    """
    b = _backend(K)
    X = PolyVectorField.from_matrix(K, order, b)
    Y = PolyVectorField.from_matrix(L, order, b)
    comm = commutator(L, K)
    Z = PolyVectorField.from_matrix(comm, order, b)
    out = scale_by_poly(mu.mul(lie_derivative(X, sigma)), Y, order)
    out = out - scale_by_poly(sigma.mul(lie_derivative(Y, mu)), X, order)
    out = out + scale_by_poly(mu.mul(sigma), Z, order)
    return out


# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class NilpotentChain:
    """Descending central series ``G_0 = G, G_{p+1} = [G, G_p]`` of the centralizer.

    ``factors[p]`` holds the indices (into ``basis``) of an adapted basis of
    ``G_p / G_{p+1}``; ``phases`` lists them in reduction order.
    """

    dims: tuple[int, ...]
    terminates: bool
    basis: CentralizerBasis
    factors: tuple[tuple[int, ...], ...]

    @property
    def factor_dims(self) -> tuple[int, ...]:
        return tuple(len(f) for f in self.factors)

    @property
    def lengths(self) -> tuple[int, ...]:
        """Factor dimensions followed by the terminal zero."""
        return self.factor_dims + ((0,) if self.terminates else ())

    @property
    def phases(self) -> tuple[int, ...]:
        return tuple(a for f in self.factors for a in f)

    def to_json(self) -> dict:
        return {"dims": list(self.dims), "terminates": self.terminates,
                "factors": [[self.basis.labels[a] for a in f] for f in self.factors]}


def chain_from_central_series(basis: CentralizerBasis) -> NilpotentChain:
    mats = list(basis.matrices)
    n = basis.n
    b = _backend(mats[0])
    series = [[mats[i] for i in _span_rank(mats, n, b)]]
    terminates = True
    while series[-1]:
        cur = series[-1]
        prods = [commutator(X, Y) for X in mats for Y in cur]
        nxt = [prods[i] for i in _span_rank(prods, n, b)] if prods else []
        if len(nxt) == len(cur):
            terminates = False
            break
        series.append(nxt)
    dims = tuple(len(s) for s in series)
    # adapted basis: extend G_{p+1} to G_p with matrices, labelling new ones
    all_mats = list(mats)
    labels = list(basis.labels)
    factors = []
    for p, Gp in enumerate(series):
        if not Gp:
            break
        nxt = series[p + 1] if p + 1 < len(series) else []
        chosen: list[int] = []
        span = list(nxt)
        candidates = [i for i in range(len(all_mats)) if _in_span(all_mats[i], Gp, n, b)] if p else list(range(len(all_mats)))
        for i in candidates:
            if not _in_span(all_mats[i], span, n, b):
                chosen.append(i)
                span.append(all_mats[i])
        for X in Gp:
            if not _in_span(X, span, n, b):
                all_mats.append(X)
                labels.append(f"G{p}_{len(all_mats)}")
                chosen.append(len(all_mats) - 1)
                span.append(X)
        if not terminates and p == len(series) - 1:
            break
        factors.append(tuple(chosen))
    adapted = CentralizerBasis(tuple(all_mats), tuple(labels), basis.includes_A)
    return NilpotentChain(dims, terminates, adapted, tuple(factors))


# -----------------------------------------------------------------------------
class ModuleCoordinates:
    """Per-grade coordinates of resonant fields in the basis ``x^m K_alpha x``.

    Raises :class:`MethodNotApplicableError` at the first grade where the
    module elements are dependent or fail to span the resonant fields.
    """

    def __init__(self, lam: Eigenvalues, basis: CentralizerBasis, inv: InvariantSet, N: int):
        self.lam = lam
        self.basis = basis
        self.n = lam.n
        self.b = lam.backend
        self.grades: dict[int, tuple] = {}
        for k in range(1, N + 1):
            sl = grade_slice(self.n, k)
            res_idx = [j for j, idx in enumerate(sl.basis) if is_resonant(lam, idx)]
            gens = _module_generators(basis, inv, k)
            cols = [to_vector(module_element(m, basis.matrices[a], k), k, self.b) for m, a in gens]
            if len(gens) != len(res_idx) or len(independent_columns(cols, sl.dim, self.b)) != len(cols):
                raise MethodNotApplicableError(
                    f"resonant fields of grade {k} are not a free module over the invariants", grade=k)
            B = [[cols[c][i] for c in range(len(cols))] for i in res_idx]
            inv_cols = []
            for t in range(len(res_idx)):
                e = [one(self.b) if s == t else zero(self.b) for s in range(len(res_idx))]
                inv_cols.append(solve(B, e, len(cols), self.b))
            self.grades[k] = (gens, cols, inv_cols, res_idx)

    def coords(self, v: Sequence, k: int) -> list:
        gens, cols, inv_cols, res_idx = self.grades[k]
        res = set(res_idx)
        if any(not is_zero(c) for j, c in enumerate(v) if j not in res):
            raise LowerOrderModifiedError(f"nonresonant component appeared at grade {k}")
        out = [zero(self.b)] * len(gens)
        for t, j in enumerate(res_idx):
            c = v[j]
            if is_zero(c):
                continue
            out = [o + c * x for o, x in zip(out, inv_cols[t])]
        return out

    def project(self, v: Sequence, k: int, alphas: frozenset) -> list:
        gens, cols, _, _ = self.grades[k]
        c = self.coords(v, k)
        keep = [ci if gens[i][1] in alphas else zero(self.b) for i, ci in enumerate(c)]
        return _combine(keep, cols, grade_slice(self.n, k).dim, self.b)

    def span_basis(self, g: int, alpha: int) -> list[tuple]:
        gens, cols, _, _ = self.grades[g]
        return [tuple(c) for (m, a), c in zip(gens, cols) if a == alpha]


class _PhaseEngine(ReductionEngine):
    flavor = "LRF"
    cache_kernels = False

    def __init__(self, lam, n, N, backend, tie_break, module: ModuleCoordinates, alpha: int, earlier: Sequence[int], label: str):
        super().__init__(lam, n, N, backend, tie_break)
        self.module = module
        self.alpha = alpha
        self.own = frozenset([alpha])
        self.before = frozenset(earlier)
        self.upto = frozenset(earlier) | self.own
        self.phase = label

    def initial_space(self, g: int):
        from .normalizer import SubspaceBasis

        return SubspaceBasis(g, self.n, tuple(self.module.span_basis(g, self.alpha)), f"S[{self.phase}]", self.backend)

    def target_map(self, v, k):
        return self.module.project(v, k, self.own)

    def kernel_map(self, v, k):
        return self.module.project(v, k, self.upto)

    def _proj(self, f, k, alphas):
        return self.module.project(to_vector(f, k, self.backend), k, alphas)

    def check_step(self, before, after, k):
        for q in range(1, self.N + 1):
            if self.before and self._proj(before, q, self.before) != self._proj(after, q, self.before):
                raise LowerOrderModifiedError(f"phase {self.phase} changed earlier-phase terms at grade {q}")
            if q < k and self._proj(before, q, self.upto) != self._proj(after, q, self.upto):
                raise LowerOrderModifiedError(f"phase {self.phase} changed grade {q} while working at order {k}")


def _check_tail_conditions(chain: NilpotentChain, inv: InvariantSet, n: int) -> None:
    basis = chain.basis
    phases = chain.phases
    b = _backend(basis.matrices[0])
    for i, a in enumerate(phases):
        tail = [basis.matrices[c] for c in phases[i:]]
        for c in phases[:i]:
            if not _in_span(commutator(basis.matrices[a], basis.matrices[c]), tail, n, b):
                raise MethodNotApplicableError(
                    f"[K_{basis.labels[a]}, K_{basis.labels[c]}] leaves the remaining directions")
        if i == 0:
            continue
        X = basis.field(a)
        for m in inv.monomials:
            if not lie_derivative(X, Poly.monomial(m, one(b), b)).is_zero():
                raise MethodNotApplicableError(
                    f"direction {basis.labels[a]} does not preserve the invariant x^{list(m)}")


def lrf(f: PolyVectorField, lam, N: int | None = None, tie_break: str = "min_norm") -> NormalFormResult:
    """Lie renormalized form up to grade ``N``.

    Runs the standard normalization, checks that the resonant fields form a
    free module over the polynomial invariants and that the centralizer's
    central series terminates, then reduces one centralizer direction at a
    time. Directions inside an abelian factor are taken in basis order, so
    for a planar rotation the ``I`` components are simplified before the
    ``A`` components.

    Raises
    ------
    MethodNotApplicableError
        Not quasi-linear (``.grade`` holds the first failing grade) or the
        central series does not terminate.
    """
    lam = as_eigenvalues(lam)
    N = f.order if N is None else N
    pd = poincare_dulac(f, lam, N)
    g = pd.normal_form
    basis = centralizer_basis(lam)
    chain = chain_from_central_series(basis)
    if not chain.terminates:
        raise MethodNotApplicableError("the centralizer's descending central series does not terminate")
    inv = invariant_monomials(lam, max(N, 1))
    module = ModuleCoordinates(lam, chain.basis, inv, N)
    decomp = module_decompose(g, chain.basis, inv)
    if not decomp.quasi_linear:
        raise MethodNotApplicableError(f"normal form is not quasi-linear at grade {decomp.failed_grade}",
                                       grade=decomp.failed_grade)
    _check_tail_conditions(chain, inv, lam.n)
    gens = list(pd.generators)
    report = list(pd.report)
    phases = chain.phases
    for i, a in enumerate(phases):
        engine = _PhaseEngine(lam, lam.n, N, g.backend, tie_break, module, a, phases[:i], chain.basis.labels[a])
        for k in range(1, N + 1):
            g = engine.reduce_order(g, k, gens, report)
    return NormalFormResult("LRF", g, GeneratorSequence(tuple(gens)), tuple(report), lam, N)
