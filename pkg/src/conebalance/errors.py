"""Exception hierarchy for the cone-balancing pipeline."""


class ConeError(Exception):
    """Base class for all pipeline failures."""


class InvalidCurveSpecError(ConeError, ValueError):
    pass


class MixedSignError(ConeError):
    """det(g'', g', g) changes sign: the curve has an inflection point."""


class NearDegenerateError(ConeError):
    pass


class NonMonotoneError(ConeError):
    pass


class IllConditionedError(ConeError):
    pass


class GaugeViolationError(ConeError):
    pass


class ClosureDefectError(ConeError):
    pass


class NegativePairingError(ConeError):
    """A pairing <y, z> between the cone and its dual came out negative."""


class StepFailureError(ConeError):
    pass


class TheoremViolationError(ConeError):
    """Monodromy spectrum that cannot occur for a valid convex cone."""


class OrthantViolationError(ConeError):
    pass


class InversionFailureError(ConeError):
    pass


class NotAQuadricError(ConeError):
    pass


class WrongSignatureError(ConeError):
    pass


class VerificationFailureError(ConeError):
    pass


class FlatBetaError(ConeError):
    pass
