"""
End-to-end orchestration: curve -> lift and coefficients -> monodromy ->
balanced parametrization, plus the dual-curve diagnostics.
"""

from dataclasses import dataclass, field

import numpy as np

from .balancer import (
    BalancedResult,
    build_reparametrization,
    ellipsoidal_normalization,
    transform_lift,
)
from .config import DEFAULT_TOLERANCES, Tolerances
from .curve_model import CurveSpec, PeriodicVectorCurve, build_family, orient_and_validate
from .errors import TheoremViolationError
from .reduced_monodromy import (
    ELLIPSOIDAL,
    PARABOLIC,
    MonodromyClass,
    ReducedSystem,
    canonical_reduced_solution,
    classify_monodromy,
    integrate_reduced,
)
from .wilczynski import (
    CanonicalLift,
    DualLift,
    FramePath,
    InequalityReport,
    dual_lift,
    duality_inequality_check,
    frame_path,
    lift_from_curve,
)


@dataclass
class Analysis:
    curve: PeriodicVectorCurve
    lift: CanonicalLift
    frame: FramePath
    system: ReducedSystem
    monodromy: MonodromyClass
    tol: Tolerances
    warnings: list = field(default_factory=list)


def as_curve(source) -> PeriodicVectorCurve:
    if isinstance(source, PeriodicVectorCurve):
        return source
    if isinstance(source, CurveSpec):
        return build_family(source)
    if isinstance(source, dict):
        return build_family(CurveSpec.from_dict(source))
    return PeriodicVectorCurve(samples=np.asarray(source, dtype=float))


def analyze(source, tol: Tolerances = DEFAULT_TOLERANCES) -> Analysis:
    """Orient, lift, extract alpha and beta, check the frame and classify the monodromy."""
    curve = orient_and_validate(as_curve(source), tol)
    lift = lift_from_curve(curve, tol)
    frame = frame_path(lift, tol)
    system = integrate_reduced(lift.alpha, tol)
    cls = classify_monodromy(system, lift.beta, tol)
    return Analysis(curve=curve, lift=lift, frame=frame, system=system, monodromy=cls, tol=tol,
                    warnings=list(cls.warnings))


def check_alpha_bound(alpha_star: float, tag: str, tol: Tolerances = DEFAULT_TOLERANCES):
    """alpha* <= 1/2 with equality exactly for ellipsoidal cones; alpha* = 0 exactly when parabolic."""
    if alpha_star > 0.5 + tol.classification:
        raise TheoremViolationError(f"alpha* = {alpha_star:.12g} exceeds 1/2")
    if (tag == ELLIPSOIDAL) != (abs(alpha_star - 0.5) <= tol.classification):
        raise TheoremViolationError(f"alpha* = {alpha_star:.12g} inconsistent with tag {tag}")
    if (tag == PARABOLIC) != (alpha_star == 0.0):
        raise TheoremViolationError(f"alpha* = {alpha_star:.12g} inconsistent with tag {tag}")


def balance(analysis: Analysis) -> BalancedResult:
    tol = analysis.tol
    cls = analysis.monodromy
    warnings = list(analysis.warnings)
    if cls.tag == ELLIPSOIDAL:
        _, reparam = ellipsoidal_normalization(analysis.lift, tol, warnings)
    else:
        x = canonical_reduced_solution(cls, analysis.system, tol)
        reparam = build_reparametrization(cls, x, tol, warnings)
    check_alpha_bound(cls.alpha_star, cls.tag, tol)
    return transform_lift(analysis.lift, reparam, cls.alpha_star, cls.tag, tol, warnings)


def dual(analysis: Analysis, base_points=(0,), coefficients: bool = True
         ) -> tuple[DualLift, list[InequalityReport]]:
    """Dual lift and the differential-inequality diagnostic at the given node indices."""
    d = dual_lift(analysis.frame, analysis.tol, coefficients)
    reports = [duality_inequality_check(analysis.lift, d, i, analysis.tol) for i in base_points]
    return d, reports


def recheck(result: BalancedResult, tol: Tolerances = DEFAULT_TOLERANCES) -> dict:
    """
    Feed the balanced lift back in as raw samples.

    A balanced input is a fixed point up to shift: its alpha is already
    constant and its own balanced parameter differs from the input one by a
    constant.
    """
    again = analyze(PeriodicVectorCurve(samples=result.y_balanced), tol)
    second = balance(again)
    offset = second.reparam.p
    return {
        "alpha_star": second.alpha_star,
        "alpha_deviation": float(np.abs(again.lift.alpha - result.alpha_star).max()),
        "alpha_star_change": abs(second.alpha_star - result.alpha_star),
        "shift_deviation": float(np.abs(offset - offset.mean()).max()),
        "tag": second.case_tag,
    }
