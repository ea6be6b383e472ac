"""Compare the linear-approximation estimate with integrated trajectories.

For ``x' = K x + eps g(x)`` the distance to the linear flow is bounded by
``(b/a)(exp(a t) - 1)`` with ``a = |K|`` and ``b = |eps|^mu M``. The script
prints the validity time ``t0`` and the worst observed ratio for a few ``eps``.

    python scripts/error_bound_demo.py
"""
from __future__ import annotations

import argparse

import numpy as np

from normalforms.algebra import PolyVectorField
from normalforms.config import BoundConfig
from normalforms.diagnostics import ErrorBoundInput, error_bound, operator_norm, sup_bound, verify_bound
from normalforms.scalar import GaussianRational as G


def system(eps_den: int):
    K = [[G(-1, 0) / 4, G(-1)], [G(1), G(-1, 0) / 4]]
    g = PolyVectorField(2, {((2, 0), 0): G(1, 0) / 2, ((1, 1), 1): G(-1), ((0, 3), 0): G(1, 0) / 4}, 2)
    return PolyVectorField.from_matrix(K, 2) + g.scale(G(1, 0) / eps_den), g, K


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--delta", type=float, default=0.05)
    ap.add_argument("--x0", type=float, nargs=2, default=[0.4, -0.3])
    args = ap.parse_args()

    cfg = BoundConfig()
    for den in (5, 10, 100):
        f, g, K = system(den)
        inp = ErrorBoundInput(operator_norm(K), sup_bound(g, cfg.radius), 1 / den, 1, args.delta)
        eb = error_bound(inp)
        rep = verify_bound(f, inp, np.array(args.x0), max(cfg.T, eb.t0), cfg.steps, cfg.radius)
        print(f"eps=1/{den}: t0={eb.t0:.4f}  max rho/bound={rep.max_ratio:.3f}  "
              f"violations={rep.violations}  samples={rep.samples}  exited={rep.exited}")


if __name__ == "__main__":
    main()
