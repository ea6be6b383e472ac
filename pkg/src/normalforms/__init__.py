"""Formal normal forms of polynomial vector fields near an equilibrium.

Standard (Poincare-Dulac) normalization, the projection-based
renormalized form and the Lie-structured renormalized form, together with
small-denominator diagnostics and a linear-approximation error estimate.
"""
from .algebra import (
    Eigenvalues,
    PolyVectorField,
    RealPairStructure,
    bargmann_inner,
    bracket,
    check_reality,
    complexify_planar,
    realify_planar,
)
from .diagnostics import (
    ErrorBoundInput,
    conjugacy_defect,
    condition_a_check,
    error_bound,
    hull_distance,
    poincare_criterion,
    small_denominator_scan,
    verify_bound,
)
from .lie_structure import centralizer_basis, chain_from_central_series, invariant_monomials, lrf, module_decompose
from .normalizer import (
    LowerOrderModifiedError,
    MethodNotApplicableError,
    NormalFormResult,
    check_form,
    poincare_dulac,
    prf,
    resonances,
    solve_homological,
)
from .transforms import Generator, GeneratorSequence, map_point, push_forward

__version__ = "0.1.0"

__all__ = [
    "Eigenvalues", "PolyVectorField", "RealPairStructure", "bargmann_inner", "bracket", "check_reality",
    "complexify_planar", "realify_planar", "ErrorBoundInput", "conjugacy_defect", "condition_a_check",
    "error_bound", "hull_distance", "poincare_criterion", "small_denominator_scan", "verify_bound",
    "centralizer_basis", "chain_from_central_series", "invariant_monomials", "lrf", "module_decompose",
    "LowerOrderModifiedError", "MethodNotApplicableError", "NormalFormResult", "check_form", "poincare_dulac",
    "prf", "resonances", "solve_homological", "Generator", "GeneratorSequence", "map_point", "push_forward",
]
