"""Fixed-step classical RK4."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import NumericField, PolyVectorField


class NonFiniteStateError(ArithmeticError):
    """Integration produced NaN or infinity."""


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    x: np.ndarray  # shape (len(t), *x0.shape)

    @property
    def final(self) -> np.ndarray:
        return self.x[-1]


def as_callable(field) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(field, PolyVectorField):
        return NumericField(field)
    return field


def rk4_step(F, x: np.ndarray, h: float) -> np.ndarray:
    k1 = F(x)
    k2 = F(x + 0.5 * h * k1)
    k3 = F(x + 0.5 * h * k2)
    k4 = F(x + h * k3)
    return x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def rk4_integrate(field, x0, T: float, steps: int, every: int = 1) -> Trajectory:
    """Integrate ``x' = field(x)`` from ``x0`` over ``[0, T]`` with ``steps`` steps.

    States are recorded every ``every`` steps (the endpoints always). ``x0``
    may be a single point or a batch of shape ``(n, S)``.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    F = as_callable(field)
    x = np.array(x0, dtype=complex)
    h = T / steps
    ts, xs = [0.0], [x.copy()]
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(1, steps + 1):
            x = rk4_step(F, x, h)
            if not np.all(np.isfinite(x)):
                raise NonFiniteStateError(f"non-finite state at step {i} (t={i * h:g})")
            if i % every == 0 or i == steps:
                ts.append(i * h)
                xs.append(x.copy())
    return Trajectory(np.array(ts), np.array(xs))


def rk4_final(F, x0, T: float, steps: int) -> np.ndarray:
    """Endpoint of :func:`rk4_integrate` without storing the path."""
    x = np.array(x0, dtype=complex)
    h = T / steps
    for i in range(steps):
        x = rk4_step(F, x, h)
    if not np.all(np.isfinite(x)):
        raise NonFiniteStateError("non-finite state during flow integration")
    return x
