"""Exception hierarchy shared by every module."""


class LaplaceCalcError(Exception):
    """Base class for all package errors."""


class NonFiniteEvaluation(LaplaceCalcError):
    """An integrand returned NaN or an infinity at a quadrature node."""


class ToleranceNotMet(LaplaceCalcError):
    """Adaptive quadrature hit its subdivision cap before reaching tolerance."""


class DomainError(LaplaceCalcError, ValueError):
    """A point or parameter lies outside the admissible domain."""


class DomainTooSmall(DomainError):
    """Neither one-sided neighbourhood of a point fits inside the domain."""


class DepthTooLarge(LaplaceCalcError, ValueError):
    pass


class NoWitnessAtDepth(LaplaceCalcError):
    """The finite model is too shallow to exhibit the requested witness."""


class NoRootBracketed(LaplaceCalcError):
    """A scan for a sign change found nothing to bisect."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ConsistencyError(LaplaceCalcError):
    """A hypothesis that is checked numerically rather than assumed failed."""


class DegenerateStep(LaplaceCalcError):
    """The contraction step collapsed below tolerance."""


class MaxIterExceeded(LaplaceCalcError):
    pass


class ConfigError(LaplaceCalcError, ValueError):
    """An experiment configuration failed validation."""
