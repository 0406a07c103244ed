"""
Projective invariants and balanced parametrizations of convex cones in R^3.

The boundary of a regular convex cone is given as a 2 pi periodic curve
g: R -> R^3 \\ {0}. The package computes the normalized lift and its
coefficients alpha and beta, the monodromy of the reduced Hill equation,
the dual curve, and the balanced parametrization in which alpha is constant.
"""

from .analysis import SextacticReport, align_up_to_shift, projective_segment_lengths, sextactic_points
from .balancer import BalancedResult, Reparametrization
from .config import DEFAULT_GRID, DEFAULT_TOLERANCES, Tolerances
from .curve_model import CurveSpec, PeriodicVectorCurve, build_family, orient_and_validate
from .errors import ConeError
from .pipeline import Analysis, analyze, balance, dual, recheck
from .reduced_monodromy import ELLIPSOIDAL, ELLIPTIC, HYPERBOLIC, PARABOLIC, MonodromyClass

__all__ = [
    "Analysis", "BalancedResult", "ConeError", "CurveSpec", "DEFAULT_GRID", "DEFAULT_TOLERANCES",
    "ELLIPSOIDAL", "ELLIPTIC", "HYPERBOLIC", "MonodromyClass", "PARABOLIC", "PeriodicVectorCurve",
    "Reparametrization", "SextacticReport", "Tolerances", "align_up_to_shift", "analyze", "balance",
    "build_family", "dual", "orient_and_validate", "projective_segment_lengths", "recheck",
    "sextactic_points",
]
__version__ = "0.1.0"
