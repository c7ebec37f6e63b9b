"""Exact arithmetic for omega-increasing transformal valued fields.

Modules:

* :mod:`transval.sigma` -- N[sigma], Q(sigma), digits, specialization sigma -> q
* :mod:`transval.gamma` -- lexicographic value groups and their ideals
* :mod:`transval.fields` -- coefficient fields F_{p^n} and Q
* :mod:`transval.hahn` -- truncated Hahn series and Artin-Schreier data
* :mod:`transval.diffpoly` -- difference polynomials and Taylor calculus
* :mod:`transval.tropical` -- Newton polygons, tropical roots, Herbrand functions
* :mod:`transval.solver` -- Newton/Hensel lifting, root-in-ball descent
"""

from .diffpoly import DiffPoly
from . import errors
from .errors import TransvalError
from .fields import GF, QQ, field_from_spec
from .gamma import GammaVector, convex_level, divisible_defect, is_transformally_prime
from .hahn import CutData, HahnRing, HahnSeries, as_cut, as_root, term_budget, twisted_as
from .sigma import (
    EXP_ONE,
    EXP_ZERO,
    INF,
    SIGMA,
    SigmaExponent,
    SigmaPoly,
    SigmaRational,
    binom_mod_p,
    compare,
    digit_decompose,
    digit_dominates,
    injectivity_threshold,
    solve_affine_cut,
    specialize_q,
    truncate_approx,
)
from .solver import Budget, Certificate, LiftReport, hensel_lift, newton_step, root_distances, root_in_ball, solve_additive
from .tropical import (
    Ball,
    NewtonPolygon,
    PiecewiseTA,
    dominance_analysis,
    generic_value,
    herbrand,
    newton_polygon,
    singular_points,
    strictly_increasing,
    tropical_roots,
)

__version__ = "0.1.0"

__all__ = [
    "errors",
    "TransvalError",
    "DiffPoly",
    "GF",
    "QQ",
    "field_from_spec",
    "GammaVector",
    "convex_level",
    "divisible_defect",
    "is_transformally_prime",
    "CutData",
    "HahnRing",
    "HahnSeries",
    "as_cut",
    "as_root",
    "term_budget",
    "twisted_as",
    "EXP_ONE",
    "EXP_ZERO",
    "INF",
    "SIGMA",
    "SigmaExponent",
    "SigmaPoly",
    "SigmaRational",
    "binom_mod_p",
    "compare",
    "digit_decompose",
    "digit_dominates",
    "injectivity_threshold",
    "solve_affine_cut",
    "specialize_q",
    "truncate_approx",
    "Budget",
    "Certificate",
    "LiftReport",
    "hensel_lift",
    "newton_step",
    "root_distances",
    "root_in_ball",
    "solve_additive",
    "Ball",
    "NewtonPolygon",
    "PiecewiseTA",
    "dominance_analysis",
    "generic_value",
    "herbrand",
    "newton_polygon",
    "singular_points",
    "strictly_increasing",
    "tropical_roots",
]
