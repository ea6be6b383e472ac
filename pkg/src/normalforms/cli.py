"""Command-line interface.

Every command reads a system description (a JSON file, or ``-`` for stdin)
and prints one JSON document tagged with ``schema_version``. Exit codes:
0 success, 2 bad input, 3 method not applicable, 4 internal consistency
failure.

System description::

    {"schema_version": 1, "n": 2, "backend": "exact",
     "eigenvalues": [["0", "1"], ["0", "-1"]],
     "real_pairs": [[1, 2]],
     "order": 7,
     "terms": [{"m": [3, 0], "r": 1, "c": ["1", "0"]}]}

With ``real_pairs`` the terms are read in real coordinates and the linear
part is the real block form of the eigenvalues; otherwise terms are in the
diagonal coordinates and the linear part is ``diag(eigenvalues)``. Indices
in ``r`` and ``real_pairs`` are 1-based.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from . import diagnostics as dg
from .algebra import (
    Eigenvalues,
    PolyVectorField,
    RealPairStructure,
    check_reality,
    complexify_planar,
    realify_planar,
)
from .config import SCHEMA_VERSION, BoundConfig, ConjugacyConfig, NormalizeConfig
from .lie_structure import lrf
from .normalizer import (
    LowerOrderModifiedError,
    MethodNotApplicableError,
    check_form,
    poincare_dulac,
    prf,
    resonances,
)
from .scalar import BACKENDS, EXACT, is_zero, to_scalar, zero

EXIT_OK, EXIT_INPUT, EXIT_NOT_APPLICABLE, EXIT_INTERNAL = 0, 2, 3, 4


class InputError(ValueError):
    pass


# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class SystemSpec:
    """A parsed system: the field in working (diagonal) coordinates."""

    n: int
    backend: str
    eigenvalues: Eigenvalues
    order: int
    field: PolyVectorField
    pairs: RealPairStructure | None = None
    real_field: PolyVectorField | None = None

    @classmethod
    def from_json(cls, obj: Any, backend: str | None = None, order: int | None = None) -> "SystemSpec":
        if not isinstance(obj, dict):
            raise InputError("system description must be a JSON object")
        version = obj.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise InputError(f"unsupported schema_version {version!r}")
        try:
            n = int(obj["n"])
            backend = backend or obj.get("backend", EXACT)
            if backend not in BACKENDS:
                raise InputError(f"unknown backend {backend!r}")
            lam_raw = obj["eigenvalues"]
            if len(lam_raw) != n:
                raise InputError(f"expected {n} eigenvalues, got {len(lam_raw)}")
            lam = Eigenvalues(tuple(to_scalar(v, backend) for v in lam_raw))
            N = int(order if order is not None else obj.get("order", 3))
            if N < 1:
                raise InputError("order must be >= 1")
            terms = []
            for t in obj.get("terms", []):
                m = tuple(int(e) for e in t["m"])
                r = int(t["r"]) - 1
                if len(m) != n or not 0 <= r < n:
                    raise InputError(f"bad term {t!r}")
                if sum(m) < 2:
                    raise InputError(f"term {t!r} is not nonlinear; the linear part comes from the eigenvalues")
                terms.append(((m, r), to_scalar(t["c"], backend)))
            nonlinear = PolyVectorField(n, terms, N, backend)
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed system description: {exc}") from exc
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        raw_pairs = obj.get("real_pairs")
        if not raw_pairs:
            return cls(n, backend, lam, N, PolyVectorField.linear(lam, N) + nonlinear)
        try:
            pairs = RealPairStructure(n, tuple((int(i) - 1, int(j) - 1) for i, j in raw_pairs))
        except (TypeError, ValueError) as exc:
            raise InputError(f"bad real_pairs: {exc}") from exc
        K = _real_linear_part(lam, pairs, backend)
        real = PolyVectorField.from_matrix(K, N, backend) + nonlinear
        try:
            f = complexify_planar(real, pairs)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        if not f.grade(0).same_terms(PolyVectorField.linear(lam, N)):
            raise InputError("real block form does not diagonalize to the given eigenvalues")
        return cls(n, backend, lam, N, f, pairs, real)

    def to_real_point(self, z) -> np.ndarray:
        return self.pairs.point_to_real(z) if self.pairs else np.asarray(z)

    def to_working_point(self, x) -> np.ndarray:
        return self.pairs.point_to_complex(x) if self.pairs else np.asarray(x, dtype=complex)


def _real_linear_part(lam: Eigenvalues, pairs: RealPairStructure, backend: str) -> list:
    n = lam.n
    K = [[zero(backend)] * n for _ in range(n)]

    def parts(v):
        return (to_scalar(v.real, backend), to_scalar(v.imag, backend))

    for i in pairs.real_indices:
        a, b = parts(lam[i])
        if not is_zero(b):
            raise InputError(f"unpaired eigenvalue {i + 1} must be real")
        K[i][i] = a
    for i, j in pairs.pairs:
        if not is_zero(lam[i].conjugate() - lam[j]):
            raise InputError(f"eigenvalues {i + 1} and {j + 1} are not complex conjugates")
        a, b = parts(lam[i])
        K[i][i], K[i][j], K[j][i], K[j][j] = a, -b, b, a
    return K


def load_spec(path: str, backend: str | None = None, order: int | None = None) -> SystemSpec:
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc}") from exc
    return SystemSpec.from_json(obj, backend, order)


# -----------------------------------------------------------------------------
def _normalize(spec: SystemSpec, cfg: NormalizeConfig):
    N = cfg.order or spec.order
    if cfg.flavor == "pd":
        return poincare_dulac(spec.field, spec.eigenvalues, N)
    if cfg.flavor == "prf":
        return prf(spec.field, spec.eigenvalues, N, cfg.tie_break)
    return lrf(spec.field, spec.eigenvalues, N, cfg.tie_break)


def cmd_resonances(args) -> dict:
    spec = load_spec(args.system, args.backend)
    kmax = args.order or spec.order
    rels = resonances(spec.eigenvalues, kmax)
    return {"command": "resonances", "kmax": kmax, "resonances": [r.to_json() for r in rels]}


def cmd_normalize(args, flavor: str | None = None) -> dict:
    spec = load_spec(args.system, args.backend)
    cfg = NormalizeConfig(flavor or args.flavor, args.order, args.tie_break)
    res = _normalize(spec, cfg)
    out = {"command": "normalize", **res.to_json()}
    out["check"] = check_form(res).to_json()
    if spec.pairs is not None and check_reality(res.normal_form, spec.pairs):
        out["normal_form_real"] = realify_planar(res.normal_form, spec.pairs).to_json()
    return out


def cmd_diagnose(args) -> dict:
    spec = load_spec(args.system, args.backend)
    cap = args.cap
    scan = dg.small_denominator_scan(spec.eigenvalues, cap)
    nf = poincare_dulac(spec.field, spec.eigenvalues, args.order or spec.order).normal_form
    cond = dg.condition_a_check(nf, spec.eigenvalues)
    return {"command": "diagnose", "poincare": dg.poincare_criterion(spec.eigenvalues),
            **scan.to_json(), "condition_a": cond.to_json()}


def cmd_bound(args) -> dict:
    params = {}
    if args.params:
        try:
            params = json.load(sys.stdin if args.params == "-" else open(args.params, encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read bound parameters: {exc}") from exc
    for key in ("C", "M", "eps", "mu", "delta"):
        v = getattr(args, key)
        if v is not None:
            params[key] = v
    try:
        inp = dg.ErrorBoundInput(float(params["C"]), float(params["M"]), float(params["eps"]),
                                 int(params.get("mu", params.get("muExp", 1))), float(params.get("delta", 0.1)))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad bound parameters: {exc}") from exc
    eb = dg.error_bound(inp)
    out = {"command": "bound", **eb.to_json()}
    if args.system:
        spec = load_spec(args.system, args.backend)
        if args.x0 is None:
            raise InputError("--x0 is required to check a trajectory")
        real = spec.real_field if spec.real_field is not None else spec.field
        x0 = _parse_point(args.x0, spec.n)
        cfg = BoundConfig(args.T, args.steps, args.radius)
        out["verify"] = dg.verify_bound(real, inp, x0, cfg.T, cfg.steps, cfg.radius).to_json()
    return out


def _parse_point(text: str, n: int) -> np.ndarray:
    try:
        vals = [complex(v) for v in text.split(",")]
    except ValueError as exc:
        raise InputError(f"bad point {text!r}") from exc
    if len(vals) != n:
        raise InputError(f"point needs {n} coordinates")
    return np.array(vals)


def cmd_verify(args) -> dict:
    spec = load_spec(args.system, args.backend)
    res = _normalize(spec, NormalizeConfig(args.flavor, args.order, args.tie_break))
    x0 = spec.to_working_point(_parse_point(args.x0, spec.n)) if args.x0 else _default_direction(spec)
    cfg = ConjugacyConfig(tuple(args.scales), args.T, args.steps)
    rep = dg.conjugacy_defect(spec.field.truncate(res.order), res, x0, cfg.scales, cfg.T, cfg.steps,
                              cfg.samples, cfg.flow_steps)
    return {"command": "verify", "flavor": res.flavor, "order": res.order, "expected_exponent": res.order + 2,
            **rep.to_json(), "min_exponent": rep.min_exponent}


def _default_direction(spec: SystemSpec) -> np.ndarray:
    x = np.full(spec.n, 1.0 / np.sqrt(spec.n))
    return spec.to_working_point(x)


def cmd_selftest(args) -> dict:
    from .algebra import bracket, monomial_basis
    from .scalar import GaussianRational
    from .systems import ROTATION, planar_normal_monomials, random_planar
    from .transforms import push_forward, push_forward_substitution_oracle

    rng = random.Random(args.seed)
    checks = []

    def rand_field(gmin, gmax):
        terms = {}
        for g in range(gmin, gmax + 1):
            for idx in monomial_basis(2, g):
                if rng.random() < 0.5:
                    terms[(idx.m, idx.r)] = GaussianRational(rng.randint(-3, 3), rng.randint(-3, 3))
        return PolyVectorField(2, terms, gmax)

    ok = True
    for _ in range(5):
        f, g = rand_field(1, 3), rand_field(1, 3)
        ok &= (bracket(f, g) + bracket(g, f)).is_zero()
    checks.append({"name": "bracket antisymmetry", "ok": bool(ok)})
    ok = True
    for _ in range(5):
        f = PolyVectorField.linear(ROTATION, 4) + rand_field(1, 4)
        h = rand_field(2, 2)
        if h.is_zero():
            continue
        ok &= push_forward(f, h, 4) == push_forward_substitution_oracle(f, h, 4)
    checks.append({"name": "lie series matches substitution", "ok": bool(ok)})
    f = random_planar(rng, 5)
    nf = poincare_dulac(f, ROTATION, 5).normal_form
    checks.append({"name": "planar normal form pattern", "ok": set(nf.terms) <= planar_normal_monomials(5)})
    res = prf(f, ROTATION, 5)
    checks.append({"name": "renormalized form membership", "ok": check_form(res).ok})
    return {"command": "selftest", "seed": args.seed, "checks": checks, "ok": all(c["ok"] for c in checks)}


# -----------------------------------------------------------------------------
def _pretty(obj: Any, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        if "terms" in obj and "n" in obj:
            return pad + PolyVectorField.from_json(obj).pretty()
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(_pretty(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
    elif isinstance(obj, list):
        if obj and all(isinstance(v, list) and len(v) == 2 and all(isinstance(e, str) for e in v) for v in obj):
            return pad + ", ".join(f"{re}{'' if im.startswith('-') else '+'}{im}i" for re, im in obj)
        for v in obj:
            if isinstance(v, (dict, list)):
                lines.append(_pretty(v, indent + 1))
            else:
                lines.append(f"{pad}- {v}")
    else:
        lines.append(f"{pad}{obj}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--order", type=int, default=None, help="truncation order N")
    common.add_argument("--cap", type=int, default=16, help="degree cap for scans")
    common.add_argument("--backend", choices=BACKENDS, default=None)
    common.add_argument("--output", choices=("json", "pretty"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tie-break", dest="tie_break", choices=("min_norm", "free_zero"), default="min_norm")

    p = argparse.ArgumentParser(prog="normalforms", description="Normal forms of polynomial vector fields.",
                                parents=[common])
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("resonances", parents=[common])
    s.add_argument("system")
    s = sub.add_parser("normalize", parents=[common])
    s.add_argument("system")
    s.add_argument("--flavor", choices=("pd", "prf", "lrf"), default="prf")
    for alias in ("prf", "lrf"):
        s = sub.add_parser(alias, parents=[common])
        s.add_argument("system")
    s = sub.add_parser("diagnose", parents=[common])
    s.add_argument("system")
    s = sub.add_parser("bound", parents=[common])
    s.add_argument("params", nargs="?", help="JSON file with C, M, eps, mu, delta")
    s.add_argument("--C", type=float)
    s.add_argument("--M", type=float)
    s.add_argument("--eps", type=float)
    s.add_argument("--mu", type=int)
    s.add_argument("--delta", type=float)
    s.add_argument("--system", help="check the estimate along a trajectory of this system")
    s.add_argument("--x0")
    s.add_argument("--T", type=float, default=1.0)
    s.add_argument("--steps", type=int, default=1000)
    s.add_argument("--radius", type=float, default=1.0)
    s = sub.add_parser("verify", parents=[common])
    s.add_argument("system")
    s.add_argument("--flavor", choices=("pd", "prf", "lrf"), default="prf")
    s.add_argument("--x0", help="direction of the initial data, comma separated")
    s.add_argument("--scales", type=float, nargs="+", default=[0.1, 0.05])
    s.add_argument("--T", type=float, default=1.0)
    s.add_argument("--steps", type=int, default=1000)
    sub.add_parser("selftest", parents=[common])
    return p


def run(argv: Sequence[str] | None = None) -> tuple[int, dict, str]:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "resonances": cmd_resonances,
        "normalize": cmd_normalize,
        "prf": lambda a: cmd_normalize(a, "prf"),
        "lrf": lambda a: cmd_normalize(a, "lrf"),
        "diagnose": cmd_diagnose,
        "bound": cmd_bound,
        "verify": cmd_verify,
        "selftest": cmd_selftest,
    }
    try:
        out = handlers[args.command](args)
        code = EXIT_OK
        if args.command == "selftest" and not out["ok"]:
            code = EXIT_INTERNAL
    except InputError as exc:
        out, code = {"error": "input", "message": str(exc)}, EXIT_INPUT
    except MethodNotApplicableError as exc:
        out, code = {"error": "not_applicable", "message": str(exc), "grade": exc.grade}, EXIT_NOT_APPLICABLE
    except LowerOrderModifiedError as exc:
        out, code = {"error": "internal", "message": str(exc)}, EXIT_INTERNAL
    except ValueError as exc:
        out, code = {"error": "input", "message": str(exc)}, EXIT_INPUT
    return code, {"schema_version": SCHEMA_VERSION, **out}, args.output


def main(argv: Sequence[str] | None = None) -> int:
    code, out, fmt = run(argv)
    text = json.dumps(out, indent=2) if fmt == "json" else _pretty(out)
    stream = sys.stdout if code == EXIT_OK else sys.stderr
    print(text, file=stream)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
