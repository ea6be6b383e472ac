"""Run configurations shared by the command line and the experiment scripts."""
from __future__ import annotations

from dataclasses import dataclass, field

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class NormalizeConfig:
    flavor: str = "prf"
    order: int | None = None
    tie_break: str = "min_norm"

    def __post_init__(self):
        if self.flavor not in ("pd", "prf", "lrf"):
            raise ValueError(f"unknown flavor {self.flavor!r}")


@dataclass(frozen=True)
class ConjugacyConfig:
    """Numeric conjugacy check: defects for initial data ``s * x0`` over ``t in [0, T]``."""

    scales: tuple[float, ...] = (0.1, 0.05, 0.025, 0.0125)
    T: float = 1.0
    steps: int = 1000
    samples: int = 21
    flow_steps: int = 64


@dataclass(frozen=True)
class BoundConfig:
    """Trajectory comparison for the linear-approximation estimate."""

    T: float = 1.0
    steps: int = 1000
    radius: float = 1.0


@dataclass(frozen=True)
class ScanConfig:
    cap: int = 16


@dataclass(frozen=True)
class SelftestConfig:
    seed: int = 0
    oracle_cases: int = 10
    planar_order: int = 7
    extras: dict = field(default_factory=dict)
