"""Homological equations, Poincare-Dulac normalization and renormalized forms.

Every grade slice ``V_k`` is handled in its monomial basis (see
:func:`normalforms.algebra.monomial_basis`); subspaces and operators are
coordinate vectors and dense matrices over that basis. Orthogonality always
refers to the Bargmann product, under which the monomial basis is orthogonal
with weights ``m!``.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Callable, Sequence

from .algebra import (
    Eigenvalues,
    MonomialIndex,
    PolyVectorField,
    as_eigenvalues,
    bracket,
    mfact,
    monomial_basis,
)
from .linalg import (
    independent_columns,
    min_norm_solution,
    nullspace,
    orthogonal_projection,
    solve,
    transpose,
    weighted_gram,
)
from .scalar import EXACT, is_zero, one, zero
from .transforms import Generator, GeneratorSequence, push_forward

TIE_BREAKS = ("min_norm", "free_zero")


class LowerOrderModifiedError(RuntimeError):
    """A normalization step changed terms it was required to leave alone.

    This signals a defect in the implementation, never a bad input.
    """


class MethodNotApplicableError(ValueError):
    """The requested reduction does not apply to this system."""

    def __init__(self, message: str, grade: int | None = None):
        super().__init__(message)
        self.grade = grade


# -----------------------------------------------------------------------------
# grade slices
@dataclass(frozen=True)
class GradeSlice:
    n: int
    k: int
    basis: tuple[MonomialIndex, ...]
    index: dict
    weights: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)


@lru_cache(maxsize=None)
def grade_slice(n: int, k: int) -> GradeSlice:
    basis = tuple(monomial_basis(n, k))
    index = {(b.m, b.r): i for i, b in enumerate(basis)}
    return GradeSlice(n, k, basis, index, tuple(mfact(b.m) for b in basis))


def to_vector(f: PolyVectorField, k: int, backend: str | None = None) -> list:
    """Coordinates of the grade-``k`` part of ``f`` in the monomial basis."""
    sl = grade_slice(f.n, k)
    v = [zero(backend or f.backend)] * sl.dim
    d = k + 1
    for key, c in f.terms.items():
        if sum(key[0]) == d:
            v[sl.index[key]] = c
    return v


def from_vector(v: Sequence, n: int, k: int, order: int | None = None, backend: str = EXACT) -> PolyVectorField:
    sl = grade_slice(n, k)
    terms = {(b.m, b.r): c for b, c in zip(sl.basis, v) if not is_zero(c)}
    return PolyVectorField._wrap(n, k if order is None else order, backend, terms)


def _combine(coeffs: Sequence, vectors: Sequence[Sequence], dim: int, backend: str) -> list:
    out = [zero(backend)] * dim
    for a, v in zip(coeffs, vectors):
        if is_zero(a):
            continue
        out = [o + a * x for o, x in zip(out, v)]
    return out


def _is_zero_vec(v: Sequence) -> bool:
    return all(is_zero(c) for c in v)


# -----------------------------------------------------------------------------
# domain types
@dataclass(frozen=True)
class ResonanceRelation:
    """``m . lambda = lambda_r`` with ``|m| >= 2`` (``r`` is 0-based)."""

    m: tuple[int, ...]
    r: int

    @property
    def order(self) -> int:
        return sum(self.m)

    def to_json(self) -> dict:
        return {"m": list(self.m), "r": self.r + 1, "order": self.order}


@dataclass(frozen=True)
class SubspaceBasis:
    """Independent vectors spanning a subspace of ``V_grade``."""

    grade: int
    n: int
    coords: tuple[tuple, ...]
    tag: str = ""
    backend: str = EXACT

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def vectors(self) -> list[PolyVectorField]:
        return [from_vector(c, self.n, self.grade, backend=self.backend) for c in self.coords]

    def rank(self) -> int:
        return len(independent_columns(self.coords, grade_slice(self.n, self.grade).dim, self.backend))

    def contains(self, v: Sequence) -> bool:
        """Whether the coordinate vector ``v`` lies in the span."""
        if _is_zero_vec(v):
            return True
        dim = grade_slice(self.n, self.grade).dim
        return len(independent_columns(list(self.coords) + [list(v)], dim, self.backend)) == self.dim


@dataclass(frozen=True)
class OperatorMatrix:
    """Matrix of a linear map from a subspace into ``V_k``.

    Column ``j`` holds the image of ``domain.coords[j]`` in the monomial basis
    of ``V_k``.
    """

    domain: SubspaceBasis
    k: int
    columns: tuple[tuple, ...]

    @property
    def rows(self) -> list[list]:
        return transpose(self.columns) if self.columns else []

    def is_zero(self) -> bool:
        return all(_is_zero_vec(c) for c in self.columns)

    def rank(self) -> int:
        return len(independent_columns(self.columns, grade_slice(self.domain.n, self.k).dim, self.domain.backend))

    def apply(self, coeffs: Sequence) -> list:
        return _combine(coeffs, self.columns, grade_slice(self.domain.n, self.k).dim, self.domain.backend)

    def diagonal(self) -> list:
        return [self.columns[j][j] for j in range(len(self.columns))]


@dataclass(frozen=True)
class StageRecord:
    """What one reduction stage did at working order ``k``."""

    k: int
    stage: int
    removed: tuple[MonomialIndex, ...] = ()
    kept: tuple[MonomialIndex, ...] = ()
    phase: str | None = None

    def to_json(self) -> dict:
        out = {
            "k": self.k,
            "stage": self.stage,
            "removed": [{"m": list(i.m), "r": i.r + 1} for i in self.removed],
            "kept": [{"m": list(i.m), "r": i.r + 1} for i in self.kept],
        }
        if self.phase is not None:
            out["phase"] = self.phase
        return out


@dataclass(frozen=True)
class NormalFormResult:
    flavor: str
    normal_form: PolyVectorField
    generators: GeneratorSequence
    report: tuple[StageRecord, ...]
    eigenvalues: Eigenvalues
    order: int

    def to_json(self) -> dict:
        return {
            "flavor": self.flavor,
            "order": self.order,
            "eigenvalues": self.eigenvalues.to_json(),
            "normal_form": self.normal_form.to_json(),
            "generators": self.generators.to_json(),
            "report": [r.to_json() for r in self.report],
        }


# -----------------------------------------------------------------------------
# linear part and resonances
def l0_matrix(lam, k: int) -> OperatorMatrix:
    """Matrix of ``psi -> {Ax, psi}`` on ``V_k``: diagonal with ``m . lambda - lambda_r``."""
    lam = as_eigenvalues(lam)
    if k < 0:
        raise ValueError("k must be >= 0")
    return _diag_operator(lam, k, adjoint=False)


def l0_adjoint_matrix(lam, k: int) -> OperatorMatrix:
    """Matrix of the Bargmann adjoint ``psi -> {conj(A) x, psi}``."""
    return _diag_operator(as_eigenvalues(lam), k, adjoint=True)


def _diag_operator(lam: Eigenvalues, k: int, adjoint: bool) -> OperatorMatrix:
    sl = grade_slice(lam.n, k)
    b = lam.backend
    z = zero(b)
    ident = []
    cols = []
    for j, idx in enumerate(sl.basis):
        e = [z] * sl.dim
        e[j] = one(b)
        ident.append(tuple(e))
        d = lam.divisor(idx.m, idx.r)
        col = [z] * sl.dim
        col[j] = d.conjugate() if adjoint else d
        cols.append(tuple(col))
    dom = SubspaceBasis(k, lam.n, tuple(ident), "V", b)
    return OperatorMatrix(dom, k, tuple(cols))


def is_resonant(lam: Eigenvalues, idx) -> bool:
    m, r = idx
    return is_zero(lam.divisor(m, r))


def resonances(lam, kmax: int) -> list[ResonanceRelation]:
    """All resonance relations with ``2 <= |m| <= kmax + 1``, in basis order."""
    lam = as_eigenvalues(lam)
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    out = []
    for k in range(1, kmax + 1):
        for idx in grade_slice(lam.n, k).basis:
            if is_resonant(lam, idx):
                out.append(ResonanceRelation(idx.m, idx.r))
    return out


def resonant_basis(lam: Eigenvalues, g: int) -> SubspaceBasis:
    """``Ker(L0)`` in ``V_g``: spanned by the resonant monomials."""
    sl = grade_slice(lam.n, g)
    b = lam.backend
    coords = []
    for j, idx in enumerate(sl.basis):
        if is_resonant(lam, idx):
            e = [zero(b)] * sl.dim
            e[j] = one(b)
            coords.append(tuple(e))
    return SubspaceBasis(g, lam.n, tuple(coords), "H1", b)


def solve_homological(lam, fk: PolyVectorField, k: int | None = None) -> tuple[Generator, PolyVectorField]:
    """Solve ``L0 h = f_k - resonant`` on one grade.

    Returns
    -------
    h : Generator
        Nonresonant coefficients divided by ``m . lambda - lambda_r``; no
        component along the kernel.
    resonant : PolyVectorField
        The part of ``fk`` in ``Ker(L0+)``.
    """
    lam = as_eigenvalues(lam)
    grades = fk.grades()
    if k is None:
        if len(grades) > 1:
            raise ValueError("fk must be homogeneous")
        k = grades[0] if grades else 1
    elif grades and grades != [k]:
        raise ValueError(f"fk is not homogeneous of grade {k}")
    if k < 1:
        raise ValueError("homological equation is posed on grades k >= 1")
    h_terms, res_terms = {}, {}
    for key, c in fk.terms.items():
        d = lam.divisor(*key)
        if is_zero(d):
            res_terms[key] = c
        else:
            h_terms[key] = c / d
    order = fk.order
    h = PolyVectorField._wrap(fk.n, order, fk.backend, h_terms)
    res = PolyVectorField._wrap(fk.n, order, fk.backend, res_terms)
    return Generator(h, k, (k, 0)), res


def _check_linear_part(f: PolyVectorField, lam: Eigenvalues) -> None:
    if f.n != lam.n:
        raise ValueError(f"field dimension {f.n} does not match {lam.n} eigenvalues")
    lin = f.grade(0)
    expected = PolyVectorField.linear(lam, f.order)
    if not lin.same_terms(expected):
        K = f.linear_matrix()
        diag = all(is_zero(K[i][j]) for i in range(f.n) for j in range(f.n) if i != j)
        if not diag:
            raise ValueError("linear part is not diagonal in the working coordinates")
        raise ValueError("linear part does not match the supplied eigenvalues")


def _snapshot_below(f: PolyVectorField, k: int) -> dict:
    return {key: c for key, c in f.terms.items() if sum(key[0]) - 1 < k}


def _monomials(f: PolyVectorField) -> tuple[MonomialIndex, ...]:
    return tuple(idx for idx, _ in f.items())


def _apply(f: PolyVectorField, gen: Generator, N: int, k: int) -> PolyVectorField:
    """Push forward and insist that grades below ``k`` are untouched."""
    before = _snapshot_below(f, k)
    out = push_forward(f, gen, N)
    if _snapshot_below(out, k) != before:
        raise LowerOrderModifiedError(f"generator of grade {gen.grade} at order {k} changed lower grades")
    return out


# -----------------------------------------------------------------------------
def poincare_dulac(f: PolyVectorField, lam, N: int | None = None) -> NormalFormResult:
    """Remove every nonresonant term of grades ``1..N``.

    Examples
    --------
    >>> from normalforms.algebra import PolyVectorField, Eigenvalues
    >>> lam = Eigenvalues.of([1, 2])
    >>> f = PolyVectorField.linear(lam, 2) + PolyVectorField(2, {((1, 1), 0): 1, ((2, 0), 1): 1}, 2)
    >>> poincare_dulac(f, lam, 2).normal_form.pretty()
    '1*x1 e1 + 2*x2 e2 + 1*x1^2 e2'
    """
    lam = as_eigenvalues(lam)
    N = f.order if N is None else N
    f = f.truncate(N)
    _check_linear_part(f, lam)
    gens: list[Generator] = []
    report: list[StageRecord] = []
    if lam.is_zero():
        return NormalFormResult("PD", f, GeneratorSequence(), (), lam, N)
    for k in range(1, N + 1):
        fk = f.grade(k)
        if fk.is_zero():
            continue
        h, res = solve_homological(lam, fk, k)
        if not h.is_zero():
            f = _apply(f, h, N, k)
            gens.append(h)
        removed = tuple(i for i in _monomials(fk) if not is_resonant(lam, i))
        report.append(StageRecord(k, 0, removed, _monomials(f.grade(k))))
        if not f.grade(k).same_terms(res):
            raise LowerOrderModifiedError(f"stage 0 at order {k} did not leave the resonant part")
    return NormalFormResult("PD", f, GeneratorSequence(tuple(gens)), tuple(report), lam, N)


# -----------------------------------------------------------------------------
def higher_operator(fhat_p: PolyVectorField, domain: SubspaceBasis, p: int | None = None,
                    target_map: Callable[[list, int], list] | None = None) -> OperatorMatrix:
    """Matrix of ``alpha -> {fhat_p, alpha}`` from ``domain`` into ``V_{p + grade}``."""
    grades = fhat_p.grades()
    if p is None:
        if len(grades) > 1:
            raise ValueError("fhat_p must be homogeneous")
        if not grades:
            raise ValueError("cannot infer the grade of a zero term; pass p")
        p = grades[0]
    elif grades and grades != [p]:
        raise ValueError(f"fhat_p is not homogeneous of grade {p}")
    k = domain.grade + p
    dim = grade_slice(domain.n, k).dim
    b = domain.backend
    cols = []
    for v in domain.coords:
        if fhat_p.is_zero():
            cols.append(tuple([zero(b)] * dim))
            continue
        img = to_vector(bracket(fhat_p, from_vector(v, domain.n, domain.grade, k, b), order=k), k, b)
        if target_map is not None:
            img = target_map(img, k)
        cols.append(tuple(img))
    return OperatorMatrix(domain, k, tuple(cols))


def _restrict_kernel(basis: SubspaceBasis, op: OperatorMatrix, tag: str) -> SubspaceBasis:
    """Subspace of ``basis`` mapped to zero by ``op`` (rank-nullity over the field)."""
    if not basis.coords or op.is_zero():
        return SubspaceBasis(basis.grade, basis.n, basis.coords, tag, basis.backend)
    ns = nullspace(op.rows, len(basis.coords), basis.backend)
    dim = grade_slice(basis.n, basis.grade).dim
    coords = tuple(tuple(_combine(c, basis.coords, dim, basis.backend)) for c in ns)
    return SubspaceBasis(basis.grade, basis.n, coords, tag, basis.backend)


def nested_kernel_basis(lam, finalized: Sequence[PolyVectorField] | dict, p: int, g: int) -> SubspaceBasis:
    """Basis of ``H^(p)`` restricted to ``V_g``.

    ``finalized`` supplies the frozen terms ``fhat_1 .. fhat_{p-1}``, either as
    a mapping grade -> field or as a list indexed from grade 1.
    """
    lam = as_eigenvalues(lam)
    fin = _as_grade_map(finalized)
    if p == 0:
        sl = grade_slice(lam.n, g)
        coords = tuple(tuple(one(lam.backend) if i == j else zero(lam.backend) for i in range(sl.dim))
                       for j in range(sl.dim))
        return SubspaceBasis(g, lam.n, coords, "H0", lam.backend)
    basis = resonant_basis(lam, g)
    for q in range(1, p):
        fq = fin.get(q)
        if fq is None or fq.is_zero() or not basis.coords:
            basis = SubspaceBasis(g, lam.n, basis.coords, f"H{q + 1}", lam.backend)
            continue
        op = higher_operator(fq, basis, q)
        basis = _restrict_kernel(basis, op, f"H{q + 1}")
    return basis


def _as_grade_map(finalized) -> dict:
    if isinstance(finalized, dict):
        return finalized
    if isinstance(finalized, PolyVectorField):
        return {q: finalized.grade(q) for q in range(1, finalized.order + 1)}
    return {q + 1: fq for q, fq in enumerate(finalized)}


def _solve_block(blocks, r, weights_out, tie_break: str, backend: str):
    """Coefficients over the concatenated domains of ``blocks`` hitting ``r``."""
    cols = [c for _, op in blocks for c in op.columns]
    if not cols:
        return None
    if tie_break == "free_zero":
        a = solve(transpose(cols), r, len(cols), backend)
        return a
    gram = [[zero(backend)] * len(cols) for _ in cols]
    off = 0
    for dom, _ in blocks:
        w = grade_slice(dom.n, dom.grade).weights
        G = weighted_gram(dom.coords, w, backend)
        for i in range(dom.dim):
            for j in range(dom.dim):
                gram[off + i][off + j] = G[i][j]
        off += dom.dim
    return min_norm_solution(cols, weights_out, gram, r, backend)


def solve_higher(M: OperatorMatrix, target: PolyVectorField | Sequence, tie_break: str = "min_norm",
                 p: int | None = None) -> tuple[Generator | None, PolyVectorField]:
    """Solve ``pi_p(target) = M h`` with ``pi_p`` the orthogonal projector onto ``Ran(M)``.

    Returns the generator (``None`` when nothing can be removed) and the
    residual ``target - M h``, which is Bargmann-orthogonal to ``Ran(M)``.
    """
    if tie_break not in TIE_BREAKS:
        raise ValueError(f"tie_break must be one of {TIE_BREAKS}")
    dom = M.domain
    b = dom.backend
    tvec = to_vector(target, M.k, b) if isinstance(target, PolyVectorField) else list(target)
    resid_field = from_vector(tvec, dom.n, M.k, backend=b)
    if not dom.coords or M.is_zero():
        return None, resid_field
    w = grade_slice(dom.n, M.k).weights
    r, _, _ = orthogonal_projection(M.columns, w, tvec, b)
    if _is_zero_vec(r):
        return None, resid_field
    a = _solve_block([(dom, M)], r, w, tie_break, b)
    assert a is not None, "projection onto the range must be solvable"
    hvec = _combine(a, dom.coords, grade_slice(dom.n, dom.grade).dim, b)
    stage = p if p is not None else M.k - dom.grade
    h = Generator(from_vector(hvec, dom.n, dom.grade, backend=b), dom.grade, (M.k, stage))
    resid = [t - x for t, x in zip(tvec, r)]
    return h, from_vector(resid, dom.n, M.k, backend=b)


# -----------------------------------------------------------------------------
class ReductionEngine:
    """Order-by-order reduction with nested kernels and higher operators.

    The default hooks give the Poincare renormalized form. Subclasses change
    the admissible generators (``initial_space``), the component being
    simplified (``target_map``) and the preservation contract
    (``check_step``).
    """

    flavor = "PRF"
    cache_kernels = True

    def __init__(self, lam: Eigenvalues, n: int, N: int, backend: str, tie_break: str = "min_norm"):
        if tie_break not in TIE_BREAKS:
            raise ValueError(f"tie_break must be one of {TIE_BREAKS}")
        self.lam = lam
        self.n = n
        self.N = N
        self.backend = backend
        self.tie_break = tie_break
        self._kernels: dict[tuple[int, int], SubspaceBasis] = {}
        self.phase: str | None = None

    # hooks --------------------------------------------------------------
    def initial_space(self, g: int) -> SubspaceBasis:
        return resonant_basis(self.lam, g)

    def target_map(self, v: list, k: int) -> list:
        return v

    def kernel_map(self, v: list, k: int) -> list:
        """Part of ``{fhat_q, h}`` that must vanish for ``h`` to stay admissible."""
        return self.target_map(v, k)

    def check_step(self, before: PolyVectorField, after: PolyVectorField, k: int) -> None:
        if _snapshot_below(after, k) != _snapshot_below(before, k):
            raise LowerOrderModifiedError(f"a stage at order {k} changed lower grades")

    # machinery ----------------------------------------------------------
    def kernel(self, f: PolyVectorField, p: int, g: int) -> SubspaceBasis:
        """``H^(p)`` within the admissible generators of grade ``g``."""
        key = (p, g)
        if self.cache_kernels and key in self._kernels:
            return self._kernels[key]
        if p <= 1:
            basis = self.initial_space(g)
        else:
            prev = self.kernel(f, p - 1, g)
            fq = f.grade(p - 1)
            if fq.is_zero() or not prev.coords:
                basis = prev
            else:
                op = higher_operator(fq, prev, p - 1, self.kernel_map)
                basis = _restrict_kernel(prev, op, f"H{p}")
        self._kernels[key] = basis
        return basis

    def reduce_order(self, f: PolyVectorField, k: int, gens: list, report: list) -> PolyVectorField:
        """Stages ``p = 1 .. k-1`` at working order ``k``."""
        blocks: list[tuple[SubspaceBasis, OperatorMatrix, int]] = []
        w = grade_slice(self.n, k).weights
        b = self.backend
        for p in range(1, k):
            fp = f.grade(p)
            if fp.is_zero():
                continue
            dom = self.kernel(f, p, k - p)
            if not dom.coords:
                continue
            op = higher_operator(fp, dom, p, self.target_map)
            if op.is_zero():
                continue
            blocks.append((dom, op, p))
            target = self.target_map(to_vector(f, k, b), k)
            cols = [c for _, o, _ in blocks for c in o.columns]
            r, _, _ = orthogonal_projection(cols, w, target, b)
            if _is_zero_vec(r):
                continue
            a = _solve_block([(dom, op)], r, w, self.tie_break, b)
            used = [(dom, op, p)]
            if a is None:
                used = list(blocks)
                a = _solve_block([(d, o) for d, o, _ in used], r, w, self.tie_break, b)
            if a is None:
                raise LowerOrderModifiedError(f"projected target at order {k}, stage {p} is not reachable")
            before_k = f.grade(k)
            off = 0
            for d, _, q in used:
                coeffs = a[off:off + d.dim]
                off += d.dim
                hvec = _combine(coeffs, d.coords, grade_slice(self.n, d.grade).dim, b)
                if _is_zero_vec(hvec):
                    continue
                gen = Generator(from_vector(hvec, self.n, d.grade, backend=b), d.grade, (k, q))
                new = push_forward(f, gen, self.N)
                self.check_step(f, new, k)
                f = new
                gens.append(gen)
            expected = [t - x for t, x in zip(target, r)]
            got = self.target_map(to_vector(f, k, b), k)
            if not all(is_zero(x - y) for x, y in zip(expected, got)):
                raise LowerOrderModifiedError(f"stage {p} at order {k} did not remove its projection")
            after_k = f.grade(k)
            removed = tuple(i for i in _monomials(before_k) if is_zero(after_k.coefficient(i.m, i.r)))
            report.append(StageRecord(k, p, removed, _monomials(after_k), self.phase))
        return f


def prf(f: PolyVectorField, lam, N: int | None = None, tie_break: str = "min_norm") -> NormalFormResult:
    """Poincare renormalized form up to grade ``N``.

    For each order ``k`` the standard homological step runs first (skipped
    when the linear part vanishes). Stages ``p = 1 .. k-1`` then use
    generators of grade ``k - p`` from the nested kernel ``H^(p)`` to remove
    the projection of ``f_k`` onto the ranges of the higher operators
    ``{fhat_p, .}``.

    Parameters
    ----------
    tie_break : {"min_norm", "free_zero"}
        How non-unique higher homological solutions are fixed: least
        Bargmann norm (keeps real systems real), or free variables set to
        zero in the column-reduced solve.
    """
    lam = as_eigenvalues(lam)
    N = f.order if N is None else N
    f = f.truncate(N)
    _check_linear_part(f, lam)
    engine = ReductionEngine(lam, f.n, N, f.backend, tie_break)
    gens: list[Generator] = []
    report: list[StageRecord] = []
    for k in range(1, N + 1):
        if not lam.is_zero():
            fk = f.grade(k)
            if not fk.is_zero():
                h, res = solve_homological(lam, fk, k)
                if not h.is_zero():
                    f = _apply(f, h, N, k)
                    gens.append(h)
                removed = tuple(i for i in _monomials(fk) if not is_resonant(lam, i))
                report.append(StageRecord(k, 0, removed, _monomials(f.grade(k))))
        f = engine.reduce_order(f, k, gens, report)
    return NormalFormResult("PRF", f, GeneratorSequence(tuple(gens)), tuple(report), lam, N)


# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class GradeCheck:
    k: int
    ok: bool
    offending: tuple[MonomialIndex, ...] = ()

    def to_json(self) -> dict:
        return {"k": self.k, "ok": self.ok, "offending": [{"m": list(i.m), "r": i.r + 1} for i in self.offending]}


@dataclass(frozen=True)
class FormCheck:
    flavor: str
    grades: tuple[GradeCheck, ...] = dc_field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return all(g.ok for g in self.grades)

    def first_failure(self) -> int | None:
        return next((g.k for g in self.grades if not g.ok), None)

    def to_json(self) -> dict:
        return {"flavor": self.flavor, "ok": self.ok, "grades": [g.to_json() for g in self.grades]}


def check_form(result: NormalFormResult | PolyVectorField, lam=None, N: int | None = None,
               flavor: str | None = None) -> FormCheck:
    """Replay the membership conditions of a normal form grade by grade.

    PD (and LRF) require every grade in ``Ker(L0+)``. PRF additionally
    requires ``f_k`` to be orthogonal to the ranges of all restricted higher
    operators built from the form's own lower grades.
    """
    if isinstance(result, NormalFormResult):
        f = result.normal_form
        lam = result.eigenvalues if lam is None else lam
        N = result.order if N is None else N
        flavor = flavor or result.flavor
    else:
        f = result
        N = f.order if N is None else N
        flavor = flavor or "PD"
    lam = as_eigenvalues(lam)
    checks = []
    engine = ReductionEngine(lam, f.n, N, f.backend) if flavor == "PRF" else None
    for k in range(1, N + 1):
        fk = f.grade(k)
        bad = [i for i in _monomials(fk) if not is_resonant(lam, i)]
        if engine is not None and not bad and not fk.is_zero():
            w = grade_slice(f.n, k).weights
            cols = []
            for p in range(1, k):
                fp = f.grade(p)
                if fp.is_zero():
                    continue
                dom = engine.kernel(f, p, k - p)
                if dom.coords:
                    cols.extend(higher_operator(fp, dom, p).columns)
            if cols:
                r, _, _ = orthogonal_projection(cols, w, to_vector(f, k), f.backend)
                sl = grade_slice(f.n, k)
                bad = [sl.basis[j] for j, c in enumerate(r) if not is_zero(c)]
        checks.append(GradeCheck(k, not bad, tuple(bad)))
    return FormCheck(flavor, tuple(checks))
