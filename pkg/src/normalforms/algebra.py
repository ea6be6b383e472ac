"""Graded polynomial vector fields and their Lie algebra.

A monomial vector field ``x^m e_r`` has *grade* ``|m| - 1``, so the grade-0
part of a field is its linear part and ``V_k`` is spanned by fields that are
homogeneous of degree ``k + 1``. Directions ``r`` are 0-based in Python and
1-based in the JSON encoding.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from math import comb, factorial, prod
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

import numpy as np

from .polynomial import Poly
from .scalar import (
    EXACT,
    FLOAT,
    I_UNIT,
    Scalar,
    backend_of,
    is_zero,
    one,
    scalar_from_json,
    scalar_to_json,
    to_scalar,
    zero,
)

Exponent = tuple[int, ...]


class MonomialIndex(NamedTuple):
    """Basis element ``x^m e_r`` of the space of vector fields."""

    m: Exponent
    r: int

    @property
    def degree(self) -> int:
        return sum(self.m)

    @property
    def grade(self) -> int:
        return sum(self.m) - 1


def monomial_sort_key(idx: tuple[Exponent, int]) -> tuple:
    """Deterministic ordering: grade, then direction, then exponents (x1 first)."""
    m, r = idx
    return (sum(m), r, tuple(-e for e in m))


def exponents(n: int, degree: int) -> Iterator[Exponent]:
    """All exponent vectors of length ``n`` and total ``degree``, x1-heavy first."""
    if n == 1:
        yield (degree,)
        return
    for first in range(degree, -1, -1):
        for rest in exponents(n - 1, degree - first):
            yield (first,) + rest


def monomial_basis(n: int, k: int) -> list[MonomialIndex]:
    """Monomial basis of ``V_k``; it has ``n * C(n + k, k + 1)`` elements."""
    if n < 1 or k < 0:
        raise ValueError("need n >= 1 and k >= 0")
    ms = list(exponents(n, k + 1))
    basis = [MonomialIndex(m, r) for r in range(n) for m in ms]
    assert len(basis) == n * comb(n + k, k + 1)
    return basis


def mfact(m: Sequence[int]) -> int:
    """Multi-index factorial ``m! = prod(m_s!)``."""
    return prod(factorial(e) for e in m)


# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class Eigenvalues:
    """Diagonal entries of the (semisimple) linear part in working coordinates."""

    values: tuple

    @classmethod
    def of(cls, values: Iterable, backend: str | None = None) -> "Eigenvalues":
        vals = list(values)
        if backend is None:
            backend = FLOAT if any(isinstance(v, (complex, float)) for v in vals) else EXACT
        return cls(tuple(to_scalar(v, backend) for v in vals))

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def backend(self) -> str:
        return backend_of(self.values[0]) if self.values else EXACT

    def __iter__(self):
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def dot(self, m: Sequence[int]) -> Scalar:
        total = zero(self.backend)
        for e, lam in zip(m, self.values):
            if e:
                total = total + lam * e
        return total

    def divisor(self, m: Sequence[int], r: int) -> Scalar:
        """``m . lambda - lambda_r``: the eigenvalue of ``{Ax, .}`` on ``x^m e_r``."""
        return self.dot(m) - self.values[r]

    def is_zero(self) -> bool:
        return all(is_zero(v) for v in self.values)

    def conjugate(self) -> "Eigenvalues":
        return Eigenvalues(tuple(v.conjugate() for v in self.values))

    def to_json(self) -> list:
        return [scalar_to_json(v) for v in self.values]


def as_eigenvalues(lam) -> Eigenvalues:
    if isinstance(lam, Eigenvalues):
        return lam
    return Eigenvalues.of(lam)


# -----------------------------------------------------------------------------
class PolyVectorField:
    """Truncated polynomial vector field on ``K^n``.

    Parameters
    ----------
    n : int
        Dimension.
    terms : mapping or iterable of ``((m, r), c)``
        Coefficient ``c`` of ``x^m e_r``.
    order : int, optional
        Truncation order ``N`` (highest stored grade). Terms above it are
        dropped. Defaults to the highest grade present.
    backend : {"exact", "float"}, optional
        Inferred from the coefficients when omitted.
    """

    __slots__ = ("n", "order", "backend", "_terms")

    def __init__(self, n: int, terms: Mapping | Iterable = (), order: int | None = None, backend: str | None = None):
        items = list(terms.items() if isinstance(terms, Mapping) else terms)
        if backend is None:
            backend = EXACT
            for _, c in items:
                if isinstance(c, (complex, float)):
                    backend = FLOAT
                    break
        store: dict[tuple[Exponent, int], Scalar] = {}
        for key, c in items:
            m, r = key
            m = tuple(int(e) for e in m)
            r = int(r)
            if len(m) != n or any(e < 0 for e in m) or sum(m) < 1:
                raise ValueError(f"bad exponent {m} for n={n}")
            if not 0 <= r < n:
                raise ValueError(f"direction {r} out of range for n={n}")
            c = to_scalar(c, backend)
            k = (m, r)
            store[k] = store[k] + c if k in store else c
        if order is None:
            order = max((sum(m) - 1 for m, _ in store), default=0)
        self.n = n
        self.order = order
        self.backend = backend
        self._terms = {k: c for k, c in store.items() if sum(k[0]) - 1 <= order and not is_zero(c)}

    @classmethod
    def _wrap(cls, n: int, order: int, backend: str, terms: dict) -> "PolyVectorField":
        obj = object.__new__(cls)
        obj.n = n
        obj.order = order
        obj.backend = backend
        obj._terms = terms
        return obj

    # -- constructors ----------------------------------------------------
    @classmethod
    def zero(cls, n: int, order: int = 0, backend: str = EXACT) -> "PolyVectorField":
        return cls._wrap(n, order, backend, {})

    @classmethod
    def linear(cls, lam, order: int = 0) -> "PolyVectorField":
        """The diagonal linear field ``diag(lam) x``."""
        lam = as_eigenvalues(lam)
        n = lam.n
        terms = {}
        for r, v in enumerate(lam):
            if not is_zero(v):
                m = tuple(1 if s == r else 0 for s in range(n))
                terms[(m, r)] = v
        return cls._wrap(n, order, lam.backend, terms)

    @classmethod
    def from_matrix(cls, K: Sequence[Sequence], order: int = 0, backend: str | None = None) -> "PolyVectorField":
        """The linear field ``K x``."""
        n = len(K)
        terms = []
        for r in range(n):
            for j in range(n):
                m = tuple(1 if s == j else 0 for s in range(n))
                terms.append(((m, r), K[r][j]))
        return cls(n, terms, order, backend)

    @classmethod
    def monomial(cls, m: Sequence[int], r: int, c=1, order: int | None = None, backend: str = EXACT) -> "PolyVectorField":
        return cls(len(m), {(tuple(m), r): c}, order, backend)

    @classmethod
    def from_components(cls, comps: Sequence[Poly], order: int | None = None) -> "PolyVectorField":
        n = len(comps)
        backend = comps[0].backend if comps else EXACT
        terms = [((m, r), c) for r, p in enumerate(comps) for m, c in p.terms.items()]
        if any(sum(m) == 0 for (m, _), _ in terms):
            raise ValueError("vector field components must vanish at the origin")
        return cls(n, terms, order, backend)

    # -- inspection ------------------------------------------------------
    @property
    def terms(self) -> Mapping[tuple[Exponent, int], Scalar]:
        return MappingProxyType(self._terms)

    def items(self) -> list[tuple[MonomialIndex, Scalar]]:
        """Terms in canonical monomial order."""
        return [(MonomialIndex(*k), self._terms[k]) for k in sorted(self._terms, key=monomial_sort_key)]

    def coefficient(self, m: Sequence[int], r: int) -> Scalar:
        return self._terms.get((tuple(m), r), zero(self.backend))

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def grades(self) -> list[int]:
        return sorted({sum(m) - 1 for m, _ in self._terms})

    def max_grade(self) -> int:
        return max((sum(m) - 1 for m, _ in self._terms), default=-1)

    def is_homogeneous(self, k: int | None = None) -> bool:
        g = self.grades()
        if not g:
            return True
        return len(g) == 1 and (k is None or g[0] == k)

    def grade(self, k: int) -> "PolyVectorField":
        return grade_project(self, k)

    def truncate(self, order: int) -> "PolyVectorField":
        return PolyVectorField._wrap(
            self.n, order, self.backend, {k: c for k, c in self._terms.items() if sum(k[0]) - 1 <= order}
        )

    def component(self, r: int) -> Poly:
        return Poly._wrap(self.n, self.backend, {m: c for (m, rr), c in self._terms.items() if rr == r})

    def components(self) -> list[Poly]:
        return [self.component(r) for r in range(self.n)]

    def linear_matrix(self) -> list[list[Scalar]]:
        """Matrix ``K`` of the grade-0 part ``K x``."""
        z = zero(self.backend)
        K = [[z] * self.n for _ in range(self.n)]
        for (m, r), c in self._terms.items():
            if sum(m) == 1:
                K[r][m.index(1)] = c
        return K

    # -- arithmetic ------------------------------------------------------
    def _compatible(self, other: "PolyVectorField") -> None:
        if not isinstance(other, PolyVectorField):
            raise TypeError(f"expected PolyVectorField, got {type(other).__name__}")
        if other.n != self.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")
        if other.backend != self.backend and other._terms and self._terms:
            raise TypeError("cannot mix exact and float backends")

    def __add__(self, other: "PolyVectorField") -> "PolyVectorField":
        self._compatible(other)
        order = min(self.order, other.order)
        out = {k: c for k, c in self._terms.items() if sum(k[0]) - 1 <= order}
        for k, c in other._terms.items():
            if sum(k[0]) - 1 > order:
                continue
            if k in out:
                s = out[k] + c
                if is_zero(s):
                    del out[k]
                else:
                    out[k] = s
            else:
                out[k] = c
        backend = self.backend if self._terms else other.backend
        return PolyVectorField._wrap(self.n, order, backend, out)

    def __neg__(self) -> "PolyVectorField":
        return PolyVectorField._wrap(self.n, self.order, self.backend, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "PolyVectorField") -> "PolyVectorField":
        return self + (-other)

    def scale(self, c) -> "PolyVectorField":
        c = to_scalar(c, self.backend)
        if is_zero(c):
            return PolyVectorField._wrap(self.n, self.order, self.backend, {})
        out = {}
        for k, a in self._terms.items():
            v = a * c
            if not is_zero(v):
                out[k] = v
        return PolyVectorField._wrap(self.n, self.order, self.backend, out)

    def __mul__(self, c) -> "PolyVectorField":
        if isinstance(c, PolyVectorField):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def conjugate(self) -> "PolyVectorField":
        return PolyVectorField._wrap(self.n, self.order, self.backend, {k: c.conjugate() for k, c in self._terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyVectorField):
            return NotImplemented
        return self.n == other.n and self.order == other.order and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.n, self.order, frozenset(self._terms.items())))

    def same_terms(self, other: "PolyVectorField") -> bool:
        """Coefficient-wise equality, ignoring truncation order."""
        return self._terms == other._terms

    def __repr__(self) -> str:
        return f"PolyVectorField(n={self.n}, N={self.order}, {self.pretty()})"

    def pretty(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (m, r), c in self.items():
            mono = "*".join(f"x{i + 1}^{e}" if e > 1 else f"x{i + 1}" for i, e in enumerate(m) if e)
            parts.append(f"{c}*{mono} e{r + 1}")
        return " + ".join(parts)

    # -- serialization ---------------------------------------------------
    def to_json(self) -> dict:
        return {
            "n": self.n,
            "N": self.order,
            "backend": self.backend,
            "terms": [{"m": list(idx.m), "r": idx.r + 1, "c": scalar_to_json(c)} for idx, c in self.items()],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    @classmethod
    def from_json(cls, obj: Mapping) -> "PolyVectorField":
        n = int(obj["n"])
        terms = []
        coeffs = []
        for t in obj.get("terms", []):
            c = scalar_from_json(t["c"])
            coeffs.append(c)
            terms.append(((tuple(t["m"]), int(t["r"]) - 1), c))
        backend = obj.get("backend")
        if backend is None:
            backend = FLOAT if any(isinstance(c, complex) for c in coeffs) else EXACT
        return cls(n, terms, obj.get("N"), backend)

    @classmethod
    def loads(cls, text: str) -> "PolyVectorField":
        return cls.from_json(json.loads(text))


# -----------------------------------------------------------------------------
def grade_project(f: PolyVectorField, k: int) -> PolyVectorField:
    """Grade-``k`` component of ``f`` (monomials of degree ``k + 1``)."""
    d = k + 1
    return PolyVectorField._wrap(f.n, f.order, f.backend, {key: c for key, c in f._terms.items() if sum(key[0]) == d})


def _by_variable(psi: PolyVectorField, n: int) -> list[list[tuple]]:
    """Group ``psi``'s terms by the variable they can be differentiated in.

    Entry ``s`` lists ``(grade, m - e_s, r, c * m_s)`` sorted by grade.
    """
    groups: list[list[tuple]] = [[] for _ in range(n)]
    for (m, r), c in psi._terms.items():
        g = sum(m) - 1
        for s, e in enumerate(m):
            if e:
                mm = m[:s] + (e - 1,) + m[s + 1:]
                groups[s].append((g, mm, r, c * e))
    for grp in groups:
        grp.sort(key=lambda t: t[0])
    return groups


def _accumulate_directional(out: dict, phi: PolyVectorField, psi_groups, order: int, sign: int) -> None:
    # (phi . grad) psi, added into ``out`` with the given sign
    for (p, s), a in phi._terms.items():
        gp = sum(p) - 1
        if sign < 0:
            a = -a
        for gq, qm, r, b in psi_groups[s]:
            if gp + gq > order:
                break
            m = tuple(x + y for x, y in zip(p, qm))
            key = (m, r)
            v = a * b
            out[key] = out[key] + v if key in out else v


def directional(phi: PolyVectorField, psi: PolyVectorField, order: int | None = None) -> PolyVectorField:
    """``(phi . grad) psi``."""
    phi._compatible(psi)
    if order is None:
        order = min(phi.order, psi.order)
    out: dict = {}
    _accumulate_directional(out, phi, _by_variable(psi, phi.n), order, 1)
    backend = phi.backend if phi._terms else psi.backend
    return PolyVectorField._wrap(phi.n, order, backend, {k: c for k, c in out.items() if not is_zero(c)})


def bracket(phi: PolyVectorField, psi: PolyVectorField, order: int | None = None) -> PolyVectorField:
    """Commutator ``{phi, psi} = (phi . grad) psi - (psi . grad) phi``.

    The result is truncated at ``min(phi.order, psi.order)`` unless ``order``
    is given. Grades add: ``{V_i, V_j}`` lies in ``V_{i+j}``.
    """
    phi._compatible(psi)
    if order is None:
        order = min(phi.order, psi.order)
    out: dict = {}
    _accumulate_directional(out, phi, _by_variable(psi, phi.n), order, 1)
    _accumulate_directional(out, psi, _by_variable(phi, phi.n), order, -1)
    backend = phi.backend if phi._terms else psi.backend
    return PolyVectorField._wrap(phi.n, order, backend, {k: c for k, c in out.items() if not is_zero(c)})


def bargmann_inner(v: PolyVectorField, w: PolyVectorField) -> Scalar:
    """Bargmann product, conjugate-linear in ``v``.

    Distinct monomials are orthogonal and ``(x^m e_r, x^m e_r) = m!``.
    """
    v._compatible(w)
    backend = v.backend if v._terms else w.backend
    total = zero(backend)
    small, big = (v, w) if len(v) <= len(w) else (w, v)
    for key, c in small._terms.items():
        d = big._terms.get(key)
        if d is None:
            continue
        a, b = (c, d) if small is v else (d, c)
        total = total + a.conjugate() * b * mfact(key[0])
    return total


def bargmann_weight(idx: tuple[Exponent, int]) -> int:
    return mfact(idx[0])


def lie_derivative(field: PolyVectorField, p: Poly) -> Poly:
    """Derivative of the scalar polynomial ``p`` along ``field``."""
    out = Poly._wrap(p.n, p.backend, {})
    comps = field.components()
    for s in range(field.n):
        if comps[s].is_zero():
            continue
        ds = p.diff(s)
        if not ds.is_zero():
            out = out + comps[s].mul(ds)
    return out


def scale_by_poly(p: Poly, field: PolyVectorField, order: int | None = None) -> PolyVectorField:
    """Pointwise product ``p(x) * field(x)``."""
    if order is None:
        order = field.order + max(p.degree(), 0)
    out: dict = {}
    for m1, c1 in p.terms.items():
        for (m2, r), c2 in field._terms.items():
            m = tuple(a + b for a, b in zip(m1, m2))
            if sum(m) - 1 > order:
                continue
            key = (m, r)
            v = c1 * c2
            out[key] = out[key] + v if key in out else v
    backend = field.backend if field._terms else p.backend
    return PolyVectorField._wrap(field.n, order, backend, {k: c for k, c in out.items() if not is_zero(c)})


# -----------------------------------------------------------------------------
class NumericField:
    """Fast complex evaluator for a fixed field.

    Accepts a point of shape ``(n,)`` or a batch of shape ``(n, S)``.
    """

    def __init__(self, f: PolyVectorField):
        self.n = f.n
        items = list(f._terms.items())
        self.exps = np.array([m for (m, _), _ in items], dtype=np.int64).reshape(len(items), f.n)
        self.matrix = np.zeros((f.n, len(items)), dtype=complex)
        for j, ((_, r), c) in enumerate(items):
            self.matrix[r, j] = complex(c)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        if not len(self.exps):
            return np.zeros_like(x)
        if x.ndim == 1:
            vals = np.prod(x[None, :] ** self.exps, axis=1)
        else:
            vals = np.prod(x[None, :, :] ** self.exps[:, :, None], axis=1)
        return self.matrix @ vals


def evaluate(f: PolyVectorField, x) -> np.ndarray:
    """Evaluate ``f`` at a complex point; exact coefficients are coerced to float."""
    x = np.asarray(x, dtype=complex)
    if x.shape[0] != f.n:
        raise ValueError(f"point has length {x.shape[0]}, field dimension is {f.n}")
    return NumericField(f)(x)


# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class RealPairStructure:
    """Declares which real coordinates combine into complex-conjugate pairs.

    For a pair ``(i, j)`` the complex coordinates are ``z_i = x_i + i x_j`` and
    ``z_j = x_i - i x_j``; unpaired indices stay real. Indices are 0-based.
    """

    n: int
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        seen = [i for p in self.pairs for i in p]
        if len(seen) != len(set(seen)) or any(not 0 <= i < self.n for i in seen):
            raise ValueError(f"invalid pair structure {self.pairs} for n={self.n}")

    @classmethod
    def planar(cls) -> "RealPairStructure":
        return cls(2, ((0, 1),))

    @property
    def real_indices(self) -> tuple[int, ...]:
        used = {i for p in self.pairs for i in p}
        return tuple(i for i in range(self.n) if i not in used)

    def partner(self, i: int) -> int:
        for a, b in self.pairs:
            if i == a:
                return b
            if i == b:
                return a
        return i

    def swap_index(self, idx: tuple[Exponent, int]) -> tuple[Exponent, int]:
        m, r = idx
        mm = [0] * self.n
        for s, e in enumerate(m):
            mm[self.partner(s)] = e
        return tuple(mm), self.partner(r)

    def x_in_z(self, backend: str = EXACT) -> list[Poly]:
        """Real coordinates as polynomials in the complex ones."""
        n = self.n
        half = to_scalar("1/2", backend)
        ih = (I_UNIT if backend == EXACT else 1j) * half
        xs = [Poly.variable(n, i, backend) for i in range(n)]
        for i, j in self.pairs:
            zi, zj = Poly.variable(n, i, backend), Poly.variable(n, j, backend)
            xs[i] = (zi + zj).scale(half)
            xs[j] = (zi - zj).scale(-ih)
        return xs

    def z_in_x(self, backend: str = EXACT) -> list[Poly]:
        """Complex coordinates as polynomials in the real ones."""
        n = self.n
        iu = I_UNIT if backend == EXACT else 1j
        zs = [Poly.variable(n, i, backend) for i in range(n)]
        for i, j in self.pairs:
            xi, xj = Poly.variable(n, i, backend), Poly.variable(n, j, backend)
            zs[i] = xi + xj.scale(iu)
            zs[j] = xi - xj.scale(iu)
        return zs

    def point_to_complex(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        z = x.copy()
        for i, j in self.pairs:
            z[i] = x[i] + 1j * x[j]
            z[j] = x[i] - 1j * x[j]
        return z

    def point_to_real(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        x = z.copy()
        for i, j in self.pairs:
            x[i] = (z[i] + z[j]) / 2
            x[j] = (z[i] - z[j]) / 2j
        return x

    def to_json(self) -> list:
        return [[i + 1, j + 1] for i, j in self.pairs]


def check_reality(f: PolyVectorField, pairs: RealPairStructure) -> bool:
    """True iff ``f`` (in complex coordinates) comes from a real field."""
    for key, c in f._terms.items():
        partner = f._terms.get(pairs.swap_index(key))
        if partner is None or not is_zero(partner - c.conjugate()):
            return False
    return True


def _is_diagonal(K) -> bool:
    return all(is_zero(K[i][j]) for i in range(len(K)) for j in range(len(K)) if i != j)


def complexify_planar(f: PolyVectorField, pairs: RealPairStructure | None = None) -> PolyVectorField:
    """Rewrite a real field in the complex coordinates declared by ``pairs``.

    Raises ``ValueError`` when the coefficients are not real or the resulting
    linear part is not diagonal.
    """
    pairs = pairs or RealPairStructure.planar()
    if pairs.n != f.n:
        raise ValueError("pair structure dimension does not match the field")
    for c in f._terms.values():
        if not is_zero(c.imag if f.backend == EXACT else complex(c).imag):
            raise ValueError("complexification expects real coefficients")
    b = f.backend
    xs = pairs.x_in_z(b)
    iu = I_UNIT if b == EXACT else 1j
    comps = [p.substitute(xs) for p in f.components()]
    out = list(comps)
    for i, j in pairs.pairs:
        out[i] = comps[i] + comps[j].scale(iu)
        out[j] = comps[i] - comps[j].scale(iu)
    g = PolyVectorField.from_components(out, f.order)
    if not _is_diagonal(g.linear_matrix()):
        raise ValueError("linear part is not diagonalized by the declared pair structure")
    return g


def realify_planar(g: PolyVectorField, pairs: RealPairStructure | None = None) -> PolyVectorField:
    """Inverse of :func:`complexify_planar`."""
    pairs = pairs or RealPairStructure.planar()
    if pairs.n != g.n:
        raise ValueError("pair structure dimension does not match the field")
    if not check_reality(g, pairs):
        raise ValueError("field does not respect the declared reality structure")
    b = g.backend
    zs = pairs.z_in_x(b)
    half = to_scalar("1/2", b)
    ih = (I_UNIT if b == EXACT else 1j) * half
    comps = [p.substitute(zs) for p in g.components()]
    out = list(comps)
    for i, j in pairs.pairs:
        out[i] = (comps[i] + comps[j]).scale(half)
        out[j] = (comps[i] - comps[j]).scale(-ih)
    if b == EXACT:
        # conjugation symmetry makes these exactly real; drop the zero imaginary parts
        out = [Poly._wrap(p.n, b, {m: type(c)(c.real) for m, c in p.terms.items()}) for p in out]
    else:
        out = [Poly._wrap(p.n, b, {m: complex(c.real, 0.0) for m, c in p.terms.items()}) for p in out]
    return PolyVectorField.from_components(out, g.order)
