"""Near-identity changes of coordinates generated by polynomial vector fields.

A generator ``h`` (homogeneous of grade ``m >= 1``) acts through the time-1
flow of ``x' = h(x)``. In the new coordinates ``y`` with ``x = Phi(1; y)`` the
field becomes the Lie series ``sum_s (1/s!) {h, .}^s f``.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .algebra import NumericField, PolyVectorField, bracket
from .integrate import NonFiniteStateError, rk4_final
from .polynomial import Poly, identity_map
from .scalar import to_scalar

DEFAULT_FLOW_STEPS = 64


@dataclass(frozen=True)
class Generator:
    """Homogeneous generator with a ``(k, p)`` label: working order and stage."""

    field: PolyVectorField
    grade: int
    stage: tuple[int, int] = (0, 0)

    def __post_init__(self):
        if self.grade < 1:
            raise ValueError("generators must have grade >= 1 (the linear part is never changed)")
        if not self.field.is_homogeneous(self.grade):
            raise ValueError(f"generator is not homogeneous of grade {self.grade}")

    @classmethod
    def of(cls, h: PolyVectorField, stage: tuple[int, int] = (0, 0)) -> "Generator":
        grades = h.grades()
        if len(grades) != 1:
            raise ValueError("cannot infer the grade of a zero or inhomogeneous field")
        return cls(h, grades[0], stage)

    def is_zero(self) -> bool:
        return self.field.is_zero()

    def to_json(self) -> dict:
        k, p = self.stage
        return {"stage": {"k": k, "p": p}, "grade": self.grade, "field": self.field.to_json()}

    @classmethod
    def from_json(cls, obj) -> "Generator":
        f = PolyVectorField.from_json(obj["field"])
        grade = obj.get("grade")
        if grade is None:
            grade = f.grades()[0]
        st = obj.get("stage", {})
        return cls(f, int(grade), (int(st.get("k", 0)), int(st.get("p", 0))))


@dataclass(frozen=True)
class GeneratorSequence:
    """Generators in the order they were applied."""

    generators: tuple[Generator, ...] = dc_field(default_factory=tuple)

    def __iter__(self) -> Iterator[Generator]:
        return iter(self.generators)

    def __len__(self) -> int:
        return len(self.generators)

    def __getitem__(self, i):
        return self.generators[i]

    def extend(self, gens: Iterable[Generator]) -> "GeneratorSequence":
        return GeneratorSequence(self.generators + tuple(gens))

    def to_json(self) -> list:
        return [g.to_json() for g in self.generators]

    @classmethod
    def from_json(cls, obj) -> "GeneratorSequence":
        return cls(tuple(Generator.from_json(g) for g in obj))


def _as_generator(h) -> Generator:
    if isinstance(h, Generator):
        return h
    return Generator.of(h)


def push_forward(f: PolyVectorField, h: Generator | PolyVectorField, N: int | None = None) -> PolyVectorField:
    """Transform ``f`` by the flow of ``h``, exactly up to grade ``N``.

    Grades below ``grade(h)`` are untouched; grade ``k`` receives
    ``sum_{s <= k/m} (1/s!) H^s f_{k - s m}`` with ``H = {h, .}``.
    """
    if isinstance(h, PolyVectorField) and h.is_zero():
        return f.truncate(f.order if N is None else N)
    gen = _as_generator(h)
    if N is None:
        N = f.order
    f = f.truncate(N)
    if gen.is_zero():
        return f
    m = gen.grade
    hf = gen.field
    result = f
    term = f
    s = 1
    while s * m <= N:
        term = bracket(hf, term, order=N)
        if term.is_zero():
            break
        term = term.scale(to_scalar(Fraction(1, s), f.backend))
        result = result + term
        s += 1
    return result


def truncated_flow_map(h: Generator | PolyVectorField, N: int) -> list[Poly]:
    """Time-1 flow ``y -> Phi(1; y)`` of ``h`` as polynomials of degree <= ``N + 1``.

    Uses the Lie series ``Phi_i = sum_s (1/s!) L_h^s (y_i)`` where
    ``L_h = h . grad`` acts on scalar functions.
    """
    if isinstance(h, PolyVectorField) and h.is_zero():
        return identity_map(h.n, h.backend)
    gen = _as_generator(h)
    n, backend = gen.field.n, gen.field.backend
    comps = gen.field.components()
    maxdeg = N + 1

    def lie(p: Poly) -> Poly:
        out = Poly(n, backend=backend)
        for j, hj in enumerate(comps):
            if hj.is_zero():
                continue
            d = p.diff(j)
            if not d.is_zero():
                out = out + hj.mul(d, maxdeg)
        return out

    result = []
    for i in range(n):
        y = Poly.variable(n, i, backend)
        total, term, s = y, y, 1
        while True:
            term = lie(term)
            if term.is_zero():
                break
            term = term.scale(to_scalar(Fraction(1, s), backend))
            total = total + term
            s += 1
        result.append(total)
    return result


def push_forward_substitution_oracle(f: PolyVectorField, h: Generator | PolyVectorField, N: int) -> PolyVectorField:
    """Reference route for :func:`push_forward` by direct substitution.

    Computes ``[I + D]^{-1} f(Phi(y))`` with ``Phi`` the truncated time-1 flow
    map of ``h`` and ``I + D`` its Jacobian, inverting ``I + D`` as a
    Neumann series. Independent of the bracket machinery.
    """
    f = f.truncate(N)
    if isinstance(h, PolyVectorField) and h.is_zero():
        return f
    gen = _as_generator(h)
    n, backend = f.n, f.backend
    maxdeg = N + 1
    phi = truncated_flow_map(gen, N)
    fphi = [c.substitute(phi, maxdeg) for c in f.components()]
    D = [[phi[i].diff(j) - (1 if i == j else 0) for j in range(n)] for i in range(n)]
    total = list(fphi)
    term = list(fphi)
    while any(not t.is_zero() for t in term):
        nxt = []
        for i in range(n):
            acc = Poly(n, backend=backend)
            for j in range(n):
                if not D[i][j].is_zero() and not term[j].is_zero():
                    acc = acc + D[i][j].mul(term[j], maxdeg)
            nxt.append(-acc)
        term = nxt
        total = [a + b for a, b in zip(total, term)]
    return PolyVectorField.from_components(total, N)


def _flow(F: NumericField, y: np.ndarray, sigma: float, steps: int) -> np.ndarray:
    return rk4_final(F, y, sigma, steps)


def map_point(
    seq: GeneratorSequence | Sequence[Generator],
    y,
    direction: str = "forward",
    steps: int = DEFAULT_FLOW_STEPS,
) -> np.ndarray:
    """Map points between normalized and original coordinates numerically.

    ``"forward"`` sends normal-form coordinates to original ones (the last
    generator's flow is applied first); ``"inverse"`` undoes it with time -1
    flows. ``y`` may be a point or a batch of shape ``(n, S)``.
    """
    gens = list(seq)
    y = np.array(y, dtype=complex)
    if direction == "forward":
        order, sigma = reversed(gens), 1.0
    elif direction == "inverse":
        order, sigma = iter(gens), -1.0
    else:
        raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    with np.errstate(over="ignore", invalid="ignore"):
        for g in order:
            if g.is_zero():
                continue
            y = _flow(NumericField(g.field), y, sigma, steps)
            if not np.all(np.isfinite(y)):
                raise NonFiniteStateError("flow left the finite range")
    return y


def evaluate_map(maps: Sequence[Poly], y) -> np.ndarray:
    return np.array([p.evaluate(y) for p in maps], dtype=complex)
