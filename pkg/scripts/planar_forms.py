"""Tabulate which planar coefficients survive each reduction.

For every leading-order case (mu, nu) a real planar system is drawn whose
standard form starts at ``a_mu`` and ``b_nu``; the script prints the grades
``j`` at which ``a_j`` and ``b_j`` remain nonzero after PD, PRF and LRF.

    python scripts/planar_forms.py --order 9 --seed 11
"""
from __future__ import annotations

import argparse
import json
import random
import time

from normalforms import lrf, poincare_dulac, prf
from normalforms.config import NormalizeConfig
from normalforms.systems import ROTATION, crafted_planar, planar_coefficients


def survivors(nf, order):
    a, b = planar_coefficients(nf, order)
    return [j for j, v in a.items() if v], [j for j, v in b.items() if v]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--order", type=int, default=9)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--tie-break", default="min_norm")
    args = ap.parse_args()

    rng = random.Random(args.seed)
    rows = []
    for mu, nu in [(1, 2), (1, 1), (2, 1)]:
        sys_ = crafted_planar(mu, nu, args.order, rng)
        row = {"mu": mu, "nu": nu}
        for flavor, fn in (("pd", poincare_dulac), ("prf", prf), ("lrf", lrf)):
            cfg = NormalizeConfig(flavor, args.order, args.tie_break)
            t = time.perf_counter()
            if flavor == "pd":
                res = fn(sys_.field, ROTATION, cfg.order)
            else:
                res = fn(sys_.field, ROTATION, cfg.order, cfg.tie_break)
            a, b = survivors(res.normal_form, cfg.order)
            row[flavor] = {"a": a, "b": b, "seconds": round(time.perf_counter() - t, 3)}
        rows.append(row)
        print(f"mu={mu} nu={nu}  " + "  ".join(f"{k.upper()}: a{row[k]['a']} b{row[k]['b']}"
                                               for k in ("pd", "prf", "lrf")))
    print(json.dumps(rows))


if __name__ == "__main__":
    main()
