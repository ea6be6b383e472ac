"""Dense linear algebra over the coefficient field.

Matrices are lists of rows of scalars. Everything is exact on the exact
backend; on the float backend pivots are chosen by modulus and zero tests use
the scalar tolerance.
"""
from __future__ import annotations

from typing import Sequence

from .scalar import EXACT, Scalar, is_zero, one, zero

Matrix = list[list[Scalar]]
Vector = list[Scalar]


def rref(M: Sequence[Sequence[Scalar]], ncols: int, backend: str = EXACT) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the pivot columns."""
    R = [list(row) for row in M]
    pivots: list[int] = []
    row = 0
    nrows = len(R)
    for col in range(ncols):
        if row >= nrows:
            break
        if backend == EXACT:
            piv = next((i for i in range(row, nrows) if not is_zero(R[i][col])), None)
        else:
            best = max(range(row, nrows), key=lambda i: abs(R[i][col]))
            piv = None if is_zero(R[best][col]) else best
        if piv is None:
            continue
        R[row], R[piv] = R[piv], R[row]
        inv = one(backend) / R[row][col]
        R[row] = [v * inv for v in R[row]]
        R[row][col] = one(backend)
        for i in range(nrows):
            if i != row:
                f = R[i][col]
                if not is_zero(f):
                    Ri, Rr = R[i], R[row]
                    R[i] = [a - f * b for a, b in zip(Ri, Rr)]
                    R[i][col] = zero(backend)
        pivots.append(col)
        row += 1
    return R, pivots


def rank(M: Sequence[Sequence[Scalar]], ncols: int, backend: str = EXACT) -> int:
    return len(rref(M, ncols, backend)[1])


def nullspace(M: Sequence[Sequence[Scalar]], ncols: int, backend: str = EXACT) -> list[Vector]:
    """Basis of ``{v : M v = 0}``; each vector has one free variable set to 1."""
    R, pivots = rref(M, ncols, backend)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for fc in free:
        v = [zero(backend)] * ncols
        v[fc] = one(backend)
        for i, pc in enumerate(pivots):
            v[pc] = -R[i][fc]
        basis.append(v)
    return basis


def solve(M: Sequence[Sequence[Scalar]], b: Sequence[Scalar], ncols: int, backend: str = EXACT) -> Vector | None:
    """A solution of ``M v = b`` with free variables zero, or ``None``."""
    aug = [list(row) + [bi] for row, bi in zip(M, b)]
    R, pivots = rref(aug, ncols + 1, backend)
    if ncols in pivots:
        return None
    v = [zero(backend)] * ncols
    for i, pc in enumerate(pivots):
        v[pc] = R[i][ncols]
    return v


def transpose(M: Sequence[Sequence[Scalar]]) -> Matrix:
    return [list(col) for col in zip(*M)]


def matvec(M: Sequence[Sequence[Scalar]], v: Sequence[Scalar], backend: str = EXACT) -> Vector:
    out = []
    for row in M:
        s = zero(backend)
        for a, b in zip(row, v):
            if not is_zero(a) and not is_zero(b):
                s = s + a * b
        out.append(s)
    return out


def independent_columns(cols: Sequence[Sequence[Scalar]], dim: int, backend: str = EXACT) -> list[int]:
    """Indices of the greedy (left-to-right) maximal independent subset of ``cols``."""
    if not cols:
        return []
    rows = [[col[i] for col in cols] for i in range(dim)]
    return rref(rows, len(cols), backend)[1]


def weighted_gram(cols: Sequence[Sequence[Scalar]], weights: Sequence[int], backend: str = EXACT) -> Matrix:
    """``G[i][j] = sum_k conj(cols[i][k]) * w_k * cols[j][k]``."""
    out = []
    for ci in cols:
        row = []
        for cj in cols:
            s = zero(backend)
            for a, w, b in zip(ci, weights, cj):
                if not is_zero(a) and not is_zero(b):
                    s = s + a.conjugate() * b * w
            row.append(s)
        out.append(row)
    return out


def weighted_dot(u: Sequence[Scalar], v: Sequence[Scalar], weights: Sequence[int], backend: str = EXACT) -> Scalar:
    s = zero(backend)
    for a, w, b in zip(u, weights, v):
        if not is_zero(a) and not is_zero(b):
            s = s + a.conjugate() * b * w
    return s


def orthogonal_projection(
    cols: Sequence[Sequence[Scalar]], weights: Sequence[int], t: Sequence[Scalar], backend: str = EXACT
) -> tuple[Vector, list[int], Vector]:
    """Project ``t`` onto the span of ``cols`` for the weighted inner product.

    Returns
    -------
    proj : list
        The projection of ``t``.
    pivots : list of int
        Independent columns used as a basis of the span.
    coeffs : list
        Coefficients of ``proj`` on the pivot columns.
    """
    dim = len(t)
    pivots = independent_columns(cols, dim, backend)
    if not pivots:
        return [zero(backend)] * dim, [], []
    B = [cols[j] for j in pivots]
    G = weighted_gram(B, weights, backend)
    rhs = [weighted_dot(b, t, weights, backend) for b in B]
    coeffs = solve(G, rhs, len(B), backend)
    assert coeffs is not None, "Gram matrix of independent columns must be invertible"
    proj = [zero(backend)] * dim
    for c, b in zip(coeffs, B):
        if is_zero(c):
            continue
        proj = [p + c * x for p, x in zip(proj, b)]
    return proj, pivots, coeffs


def min_norm_solution(
    cols: Sequence[Sequence[Scalar]],
    weights_out: Sequence[int],
    domain_gram: Sequence[Sequence[Scalar]],
    r: Sequence[Scalar],
    backend: str = EXACT,
) -> Vector | None:
    """Coefficients ``a`` of least domain norm with ``sum_j a_j cols[j] = r``.

    The domain norm is ``a^* G a`` for the Hermitian positive definite
    ``domain_gram`` ``G``; the codomain carries the diagonal weights. Returns
    ``None`` if ``r`` is not in the span of the columns.
    """
    ncol = len(cols)
    dim = len(r)
    if ncol == 0:
        return [] if all(is_zero(v) for v in r) else None
    # Y = G^{-1} M^* W : columns of M^* W are the rows of the adjoint map
    MsW = [[cols[j][i].conjugate() * weights_out[i] for i in range(dim)] for j in range(ncol)]
    Y_cols = []
    for i in range(dim):
        rhs = [MsW[j][i] for j in range(ncol)]
        y = solve(domain_gram, rhs, ncol, backend)
        assert y is not None, "domain Gram matrix must be invertible"
        Y_cols.append(y)
    # S = M Y (dim x dim); solve S z = r, then a = Y z
    S = [[zero(backend)] * dim for _ in range(dim)]
    for i in range(dim):
        for k in range(dim):
            s = zero(backend)
            for j in range(ncol):
                a, b = cols[j][i], Y_cols[k][j]
                if not is_zero(a) and not is_zero(b):
                    s = s + a * b
            S[i][k] = s
    z = solve(S, r, dim, backend)
    if z is None:
        return None
    a = [zero(backend)] * ncol
    for k in range(dim):
        if is_zero(z[k]):
            continue
        for j in range(ncol):
            a[j] = a[j] + Y_cols[k][j] * z[k]
    # reject if r was not actually reachable (float noise guard)
    check = [zero(backend)] * dim
    for j in range(ncol):
        if not is_zero(a[j]):
            check = [c + a[j] * x for c, x in zip(check, cols[j])]
    if not all(is_zero(c - v) for c, v in zip(check, r)):
        return None
    return a
