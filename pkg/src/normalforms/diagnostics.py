"""Finite-order convergence diagnostics, error estimates and numeric checks.

Nothing here certifies convergence. The small-denominator scan, for example,
only sees finitely many orders, so its Siegel-type fit is labelled empirical.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import Eigenvalues, NumericField, PolyVectorField, as_eigenvalues, exponents
from .integrate import NonFiniteStateError, Trajectory, rk4_integrate
from .normalizer import NormalFormResult, is_resonant
from .polynomial import Poly
from .scalar import EXACT, abs2, is_zero, scalar_to_json
from .transforms import map_point

__all__ = [
    "ConditionA",
    "ConjugacyReport",
    "ErrorBound",
    "ErrorBoundInput",
    "NonFiniteStateError",
    "ScanEntry",
    "SmallDenominatorScan",
    "BoundReport",
    "condition_a_check",
    "conjugacy_defect",
    "error_bound",
    "hull_distance",
    "poincare_criterion",
    "rk4_integrate",
    "small_denominator_scan",
    "sup_bound",
    "verify_bound",
]


# -----------------------------------------------------------------------------
# convex hull of the spectrum
def _points(lam: Eigenvalues) -> list[tuple]:
    if lam.backend == EXACT:
        return [(v.real, v.imag) for v in lam]
    return [(complex(v).real, complex(v).imag) for v in lam]


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull(pts: list[tuple]) -> list[tuple]:
    """Monotone chain; counter-clockwise, collinear points dropped."""
    pts = sorted(set(pts))
    if len(pts) <= 2:
        return pts
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _origin_in_hull(hull: list[tuple]) -> bool:
    o = (0, 0)
    if len(hull) == 1:
        return hull[0] == o or (hull[0][0] == 0 and hull[0][1] == 0)
    if len(hull) == 2:
        a, b = hull
        if _cross(a, b, o) != 0:
            return False
        return min(a[0], b[0]) <= 0 <= max(a[0], b[0]) and min(a[1], b[1]) <= 0 <= max(a[1], b[1])
    return all(_cross(hull[i], hull[(i + 1) % len(hull)], o) >= 0 for i in range(len(hull)))


def poincare_criterion(lam) -> bool:
    """True iff 0 lies strictly outside the convex hull of the eigenvalues.

    Cross products are exact for exact eigenvalues, so boundary cases (0 on
    a hull edge) are decided correctly and count as inside.
    """
    lam = as_eigenvalues(lam)
    if lam.n < 1:
        raise ValueError("need at least one eigenvalue")
    return not _origin_in_hull(_hull(_points(lam)))


def _seg_dist(a, b) -> float:
    ax, ay, bx, by = map(float, (a[0], a[1], b[0], b[1]))
    dx, dy = bx - ax, by - ay
    L2 = dx * dx + dy * dy
    t = 0.0 if L2 == 0 else max(0.0, min(1.0, -(ax * dx + ay * dy) / L2))
    return math.hypot(ax + t * dx, ay + t * dy)


def hull_distance(lam) -> float:
    """Euclidean distance from 0 to the convex hull of the eigenvalues (0 if inside)."""
    lam = as_eigenvalues(lam)
    hull = _hull(_points(lam))
    if _origin_in_hull(hull):
        return 0.0
    if len(hull) == 1:
        return math.hypot(float(hull[0][0]), float(hull[0][1]))
    return min(_seg_dist(hull[i], hull[(i + 1) % len(hull)]) for i in range(len(hull)))


# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class ScanEntry:
    order: int
    min: float | None
    min_sq: object = None  # exact squared modulus when available
    witness: tuple | None = None  # (m, r), r 0-based

    def to_json(self) -> dict:
        out = {"order": self.order, "min": self.min}
        if self.witness is None:
            out["note"] = "no nonresonant pair"
            out["witness"] = None
        else:
            m, r = self.witness
            out["witness"] = {"m": list(m), "r": r + 1}
        if isinstance(self.min_sq, Fraction):
            out["min_sq"] = f"{self.min_sq.numerator}/{self.min_sq.denominator}"
        return out


@dataclass(frozen=True)
class SmallDenominatorScan:
    entries: tuple[ScanEntry, ...]
    siegel: dict
    omegas: tuple[float | None, ...]
    partial_sums: tuple[float, ...]

    @property
    def partial_sum(self) -> float:
        return self.partial_sums[-1] if self.partial_sums else 0.0

    def to_json(self) -> dict:
        return {
            "scan": [e.to_json() for e in self.entries],
            "siegel": self.siegel,
            "bruno": {"omegas": list(self.omegas), "partial_sums": list(self.partial_sums),
                      "partial_sum": self.partial_sum},
        }


def small_denominator_scan(lam, cap: int) -> SmallDenominatorScan:
    """Minimal ``|m . lambda - lambda_r|`` per order over nonresonant pairs.

    Bruno's ``omega_k`` is the minimum over ``2 <= |m| <= 2^k`` and the
    partial sums use ``ln+ (1 / omega_k) = max(0, -ln omega_k)``.
    """
    lam = as_eigenvalues(lam)
    if cap < 2:
        raise ValueError("cap must be >= 2")
    entries = []
    for d in range(2, cap + 1):
        best, wit = None, None
        for m in exponents(lam.n, d):
            for r in range(lam.n):
                div = lam.divisor(m, r)
                if is_zero(div):
                    continue
                a2 = abs2(div)
                if best is None or a2 < best:
                    best, wit = a2, (m, r)
        if best is None:
            entries.append(ScanEntry(d, None))
        else:
            entries.append(ScanEntry(d, math.sqrt(float(best)), best, wit))
    siegel = _fit_siegel(entries)
    omegas, sums, total = [], [], 0.0
    K = int(math.floor(math.log2(cap)))
    for k in range(1, K + 1):
        vals = [e.min for e in entries if e.order <= 2 ** k and e.min is not None]
        om = min(vals) if vals else None
        omegas.append(om)
        if om is not None:
            total += 2.0 ** (-k) * max(0.0, -math.log(om))
        sums.append(total)
    return SmallDenominatorScan(tuple(entries), siegel, tuple(omegas), tuple(sums))


def _fit_siegel(entries: Sequence[ScanEntry]) -> dict:
    pts = [(e.order, e.min) for e in entries if e.min]
    if len(pts) < 2:
        return {"C": None, "nu": None, "status": "empirical", "points": len(pts)}
    x = np.log([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    slope, intercept = np.polyfit(x, y, 1)
    return {"C": float(math.exp(intercept)), "nu": float(-slope), "status": "empirical", "points": len(pts)}


# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class ConditionA:
    holds: bool
    alpha: Poly | None
    failed_grade: int | None = None

    def to_json(self) -> dict:
        out = {"holds": self.holds}
        out["alpha"] = None if self.alpha is None else [{"m": list(m), "c": scalar_to_json(c)} for m, c in self.alpha.items()]
        if self.failed_grade is not None:
            out["failed_grade"] = self.failed_grade
        return out


def condition_a_check(nf: PolyVectorField, lam, N: int | None = None) -> ConditionA:
    """Test whether ``nf = (1 + alpha(x)) A x`` up to grade ``N``; ``alpha`` is the witness."""
    lam = as_eigenvalues(lam)
    N = nf.order if N is None else N
    n, b = nf.n, nf.backend
    lin = PolyVectorField.linear(lam, N)
    if not nf.grade(0).same_terms(lin):
        return ConditionA(False, None, 0)
    alpha: dict = {}
    for k in range(1, N + 1):
        gk = nf.grade(k)
        local: dict = {}
        ok = True
        for (m, r), c in gk.terms.items():
            if is_zero(lam[r]):
                ok = False
                break
            mm = tuple(e - (1 if s == r else 0) for s, e in enumerate(m))
            if min(mm) < 0:
                ok = False
                break
            val = c / lam[r]
            if mm in local and not is_zero(local[mm] - val):
                ok = False
                break
            local[mm] = val
        if ok:
            # every monomial of alpha must reappear in every direction with lambda_r != 0
            for mm, a in local.items():
                for r in range(n):
                    if is_zero(lam[r]):
                        continue
                    m = tuple(e + (1 if s == r else 0) for s, e in enumerate(mm))
                    if not is_zero(gk.coefficient(m, r) - a * lam[r]):
                        ok = False
        if not ok:
            return ConditionA(False, None, k)
        alpha.update(local)
    return ConditionA(True, Poly(n, alpha, b))


# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class ErrorBoundInput:
    """Data of the linear-approximation estimate.

    Attributes
    ----------
    C : float
        Operator norm of the linear part.
    M : float
        Bound on ``|g|`` in the region of validity.
    eps : float
        Perturbation size; the nonlinearity enters as ``|eps|^muExp g``.
    muExp : int
        Leading nonlinear order.
    delta : float
        Tolerated error.
    """

    C: float
    M: float
    eps: float
    muExp: int = 1
    delta: float = 0.1

    def __post_init__(self):
        if not (self.C > 0 and self.M > 0 and self.eps != 0 and self.delta > 0):
            raise ValueError("C, M, delta must be positive and eps nonzero")
        if int(self.muExp) != self.muExp or self.muExp < 1:
            raise ValueError("muExp must be an integer >= 1")


@dataclass(frozen=True)
class ErrorBound:
    a: float
    b: float
    t0: float

    def bound(self, t):
        """``(b / a) (exp(a t) - 1)``."""
        return (self.b / self.a) * np.expm1(self.a * np.asarray(t, dtype=float))

    def to_json(self) -> dict:
        return {"rho_bound": {"a": self.a, "b": self.b}, "t0": self.t0}


def error_bound(inp: ErrorBoundInput) -> ErrorBound:
    b = abs(inp.eps) ** inp.muExp * inp.M
    t0 = math.log1p(inp.delta * inp.C / b) / inp.C
    return ErrorBound(inp.C, b, t0)


def sup_bound(f: PolyVectorField, R: float) -> float:
    """Upper bound for ``|f(x)|`` (Euclidean) on the ball ``|x| <= R``: ``sum |c| R^|m|``."""
    return float(sum(abs(complex(c)) * R ** sum(m) for (m, _), c in f.terms.items()))


def operator_norm(K) -> float:
    return float(np.linalg.norm(np.array([[complex(c) for c in row] for row in K]), 2))


@dataclass(frozen=True)
class BoundReport:
    ok: bool
    max_ratio: float
    violations: int
    samples: int
    exited: bool
    exit_time: float | None
    t0: float

    def to_json(self) -> dict:
        return dict(self.__dict__)


def verify_bound(f: PolyVectorField, inp: ErrorBoundInput, x0, T: float, steps: int = 1000,
                 radius: float | None = None) -> BoundReport:
    """Compare the distance between full and linearized trajectories with the estimate.

    The linear comparison system is the grade-0 part of ``f``. Samples after
    either trajectory leaves the ball of the given ``radius`` are ignored and
    the exit is reported.
    """
    eb = error_bound(inp)
    lin = f.grade(0)
    full = rk4_integrate(f, x0, T, steps)
    linear = rk4_integrate(lin, x0, T, steps)
    rho = np.linalg.norm(full.x - linear.x, axis=1)
    bnd = eb.bound(full.t)
    exited, exit_time = False, None
    valid = np.ones_like(rho, dtype=bool)
    if radius is not None:
        outside = (np.linalg.norm(full.x, axis=1) > radius) | (np.linalg.norm(linear.x, axis=1) > radius)
        if outside.any():
            first = int(np.argmax(outside))
            exited, exit_time = True, float(full.t[first])
            valid[first:] = False
    valid[0] = False  # both sides vanish at t = 0
    ratios = rho[valid] / bnd[valid]
    max_ratio = float(ratios.max()) if ratios.size else 0.0
    violations = int((rho[valid] > bnd[valid]).sum())
    return BoundReport(violations == 0, max_ratio, violations, int(valid.sum()), exited, exit_time, eb.t0)


# -----------------------------------------------------------------------------
def _rate(d0: float, d1: float, s0: float, s1: float) -> float:
    # exact conjugacies give zero defects; report the rate as unbounded
    if d1 == 0.0:
        return float("nan") if d0 == 0.0 else float("inf")
    if d0 == 0.0:
        return float("-inf")
    return math.log2(d0 / d1) / math.log2(s0 / s1)


@dataclass(frozen=True)
class ConjugacyReport:
    scales: tuple[float, ...]
    defects: tuple[float, ...]
    exponents: tuple[float, ...] = dc_field(default_factory=tuple)

    @property
    def min_exponent(self) -> float:
        finite = [e for e in self.exponents if not math.isnan(e)]
        return min(finite) if finite else float("nan")

    def to_json(self) -> dict:
        return {"scales": list(self.scales), "defects": list(self.defects), "exponents": list(self.exponents)}


def conjugacy_defect(f: PolyVectorField, result: NormalFormResult, x0, scales: Sequence[float],
                     T: float = 1.0, steps: int = 1000, samples: int = 21, flow_steps: int = 64) -> ConjugacyReport:
    """Measure ``max_t |x(t) - Phi(y(t))|`` for initial data ``s * x0``.

    ``x(t)`` follows ``f``; ``y(t)`` follows the normal form from
    ``y0 = Phi^{-1}(x0)`` and ``Phi`` is the composed generator flow. Ratios
    between successive scales are returned as base-2 exponents.
    """
    gens = result.generators
    nf = result.normal_form
    x0 = np.asarray(x0, dtype=complex)
    every = max(1, steps // (samples - 1))
    Ff, Fn = NumericField(f), NumericField(nf)
    defects = []
    for s in scales:
        xs = s * x0
        y0 = map_point(gens, xs, "inverse", flow_steps)
        tx = rk4_integrate(Ff, xs, T, steps, every)
        ty = rk4_integrate(Fn, y0, T, steps, every)
        mapped = map_point(gens, ty.x.T, "forward", flow_steps)
        defects.append(float(np.max(np.linalg.norm(tx.x.T - mapped, axis=0))))
    exps = tuple(_rate(defects[i], defects[i + 1], scales[i], scales[i + 1]) for i in range(len(defects) - 1))
    return ConjugacyReport(tuple(scales), tuple(defects), exps)
