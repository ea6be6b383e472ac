"""Sparse multivariate scalar polynomials over the coefficient field."""
from __future__ import annotations

from typing import Iterable, Mapping, Sequence

import numpy as np

from .scalar import EXACT, Scalar, backend_of, is_zero, one, to_scalar, zero

Exponent = tuple[int, ...]


class Poly:
    """Polynomial in ``n`` variables stored as ``{exponent tuple: coefficient}``.

    Instances are treated as immutable; every operation returns a new object.
    Zero coefficients are never stored.
    """

    __slots__ = ("n", "backend", "_terms")

    def __init__(self, n: int, terms: Mapping[Sequence[int], object] | Iterable = (), backend: str | None = None):
        items = terms.items() if isinstance(terms, Mapping) else terms
        store: dict[Exponent, Scalar] = {}
        for m, c in items:
            m = tuple(int(e) for e in m)
            if len(m) != n or any(e < 0 for e in m):
                raise ValueError(f"bad exponent {m} for n={n}")
            if backend is None:
                backend = _guess_backend(c)
            c = to_scalar(c, backend)
            if m in store:
                c = store[m] + c
            store[m] = c
        self.n = n
        self.backend = backend or EXACT
        self._terms = {m: c for m, c in store.items() if not is_zero(c)}

    @classmethod
    def _wrap(cls, n: int, backend: str, terms: dict) -> "Poly":
        obj = object.__new__(cls)
        obj.n = n
        obj.backend = backend
        obj._terms = terms
        return obj

    # -- constructors ----------------------------------------------------
    @classmethod
    def constant(cls, n: int, c=1, backend: str = EXACT) -> "Poly":
        return cls(n, {(0,) * n: c}, backend)

    @classmethod
    def variable(cls, n: int, i: int, backend: str = EXACT) -> "Poly":
        m = [0] * n
        m[i] = 1
        return cls(n, {tuple(m): 1}, backend)

    @classmethod
    def monomial(cls, m: Sequence[int], c=1, backend: str = EXACT) -> "Poly":
        return cls(len(m), {tuple(m): c}, backend)

    # -- inspection ------------------------------------------------------
    @property
    def terms(self) -> dict[Exponent, Scalar]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items(), key=lambda kv: (sum(kv[0]), tuple(-e for e in kv[0])))

    def coefficient(self, m: Sequence[int]) -> Scalar:
        return self._terms.get(tuple(m), zero(self.backend))

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        return max((sum(m) for m in self._terms), default=-1)

    def homogeneous(self, d: int) -> "Poly":
        return Poly._wrap(self.n, self.backend, {m: c for m, c in self._terms.items() if sum(m) == d})

    def truncate(self, maxdeg: int) -> "Poly":
        return Poly._wrap(self.n, self.backend, {m: c for m, c in self._terms.items() if sum(m) <= maxdeg})

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self._terms.items())))

    def __repr__(self) -> str:
        if not self._terms:
            return "Poly(0)"
        parts = []
        for m, c in self.items():
            mono = "*".join(f"x{i + 1}^{e}" if e > 1 else f"x{i + 1}" for i, e in enumerate(m) if e)
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return "Poly(" + " + ".join(parts) + ")"

    # -- arithmetic ------------------------------------------------------
    def _check(self, other: "Poly") -> None:
        if other.n != self.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.constant(self.n, other, self.backend)
        self._check(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out[m] + c if m in out else c
            if is_zero(s):
                out.pop(m, None)
            else:
                out[m] = s
        return Poly._wrap(self.n, self.backend, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._wrap(self.n, self.backend, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.constant(self.n, other, self.backend)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        return self.mul(other)

    __rmul__ = __mul__

    def scale(self, c) -> "Poly":
        if is_zero(c):
            return Poly._wrap(self.n, self.backend, {})
        return Poly._wrap(self.n, self.backend, {m: a * c for m, a in self._terms.items()})

    def mul(self, other: "Poly", maxdeg: int | None = None) -> "Poly":
        """Product, optionally dropping terms of total degree above ``maxdeg``."""
        self._check(other)
        out: dict[Exponent, Scalar] = {}
        for m1, c1 in self._terms.items():
            d1 = sum(m1)
            for m2, c2 in other._terms.items():
                if maxdeg is not None and d1 + sum(m2) > maxdeg:
                    continue
                m = tuple(a + b for a, b in zip(m1, m2))
                v = c1 * c2
                out[m] = out[m] + v if m in out else v
        return Poly._wrap(self.n, self.backend, {m: c for m, c in out.items() if not is_zero(c)})

    def __pow__(self, k: int) -> "Poly":
        return self.power(k)

    def power(self, k: int, maxdeg: int | None = None) -> "Poly":
        if k < 0:
            raise ValueError("negative power")
        result = Poly.constant(self.n, one(self.backend), self.backend)
        base = self
        while k:
            if k & 1:
                result = result.mul(base, maxdeg)
            k >>= 1
            if k:
                base = base.mul(base, maxdeg)
        return result

    def diff(self, i: int) -> "Poly":
        """Partial derivative with respect to variable ``i`` (0-based)."""
        out = {}
        for m, c in self._terms.items():
            e = m[i]
            if e:
                mm = m[:i] + (e - 1,) + m[i + 1:]
                out[mm] = c * e
        return Poly._wrap(self.n, self.backend, out)

    def conjugate(self) -> "Poly":
        return Poly._wrap(self.n, self.backend, {m: c.conjugate() for m, c in self._terms.items()})

    def substitute(self, subs: Sequence["Poly"], maxdeg: int | None = None) -> "Poly":
        """Compose: replace variable ``i`` by ``subs[i]``.

        ``subs`` may live in a different number of variables than ``self``.
        """
        if len(subs) != self.n:
            raise ValueError("need one substitution per variable")
        if not subs:
            return self
        tn = subs[0].n
        powers: list[dict[int, Poly]] = [{} for _ in subs]

        def power_of(i: int, e: int) -> Poly:
            cache = powers[i]
            if e not in cache:
                if e == 0:
                    cache[e] = Poly.constant(tn, one(self.backend), self.backend)
                elif e == 1:
                    cache[e] = subs[i].truncate(maxdeg) if maxdeg is not None else subs[i]
                else:
                    cache[e] = power_of(i, e - 1).mul(power_of(i, 1), maxdeg)
            return cache[e]

        out = Poly._wrap(tn, self.backend, {})
        for m, c in self._terms.items():
            term = Poly.constant(tn, c, self.backend)
            for i, e in enumerate(m):
                if e:
                    term = term.mul(power_of(i, e), maxdeg)
            out = out + term
        return out

    def evaluate(self, x) -> complex:
        x = np.asarray(x, dtype=complex)
        total = 0j
        for m, c in self._terms.items():
            total += complex(c) * np.prod(x ** np.asarray(m))
        return total


def _guess_backend(c) -> str:
    try:
        return backend_of(c)
    except TypeError:
        return EXACT


def compose_maps(outer: Sequence[Poly], inner: Sequence[Poly], maxdeg: int | None = None) -> list[Poly]:
    """Polynomial map composition ``outer(inner(y))``, truncated at ``maxdeg``."""
    return [p.substitute(inner, maxdeg) for p in outer]


def identity_map(n: int, backend: str = EXACT) -> list[Poly]:
    return [Poly.variable(n, i, backend) for i in range(n)]
