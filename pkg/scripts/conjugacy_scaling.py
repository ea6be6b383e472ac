"""Numerical check that the generator flow conjugates the system to its normal form.

The defect between a trajectory of the original field and the image of the
normal-form trajectory should scale like ``s^(N+2)`` in the amplitude ``s``.

    python scripts/conjugacy_scaling.py --orders 3 5 7
"""
from __future__ import annotations

import argparse
import random

import numpy as np

from normalforms import prf
from normalforms.config import ConjugacyConfig
from normalforms.diagnostics import conjugacy_defect
from normalforms.systems import PAIRS, ROTATION, random_planar


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--orders", type=int, nargs="+", default=[3, 5, 7])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--steps", type=int, default=ConjugacyConfig.steps)
    args = ap.parse_args()

    cfg = ConjugacyConfig(steps=args.steps)
    x0 = PAIRS.point_to_complex(np.array([0.6, 0.8]))
    for N in args.orders:
        f = random_planar(random.Random(args.seed), N, coeff=1, denominator=2)
        res = prf(f, ROTATION, N)
        rep = conjugacy_defect(f, res, x0, cfg.scales, cfg.T, cfg.steps, cfg.samples, cfg.flow_steps)
        exps = ", ".join(f"{e:.2f}" for e in rep.exponents)
        defs = ", ".join(f"{d:.2e}" for d in rep.defects)
        print(f"N={N}: expected {N + 2}, measured [{exps}]  defects [{defs}]")


if __name__ == "__main__":
    main()
