"""Exception hierarchy.

Every error that can be raised on invalid input or an inconsistent solve
derives from :class:`EofError`. Errors that concern the state itself carry
the offending ``margin`` so callers can report how badly a check failed.
"""


class EofError(Exception):
    """Base class for all package errors."""


class CovarianceError(EofError):
    """Invalid covariance matrix; ``margin`` is the violated quantity."""

    def __init__(self, message, margin=float("nan")):
        super().__init__(message)
        self.margin = margin


class NonSymmetric(CovarianceError):
    pass


class Unphysical(CovarianceError):
    pass


class NotPositiveDefinite(Unphysical):
    """A matrix that is not positive definite cannot be a covariance matrix at all."""


class ComplexSpectrum(CovarianceError):
    pass


class DegenerateBlocks(CovarianceError):
    pass


class InconsistentInvariants(CovarianceError):
    pass


class NonPositiveScaling(EofError):
    pass


class ZeroPolynomial(EofError):
    pass


class NegativeDiscriminant(EofError):
    pass


class ConventionViolation(EofError):
    """Standard-form parameters outside ``c >= |d| = -d > 0``."""


class NoPositiveRoot(EofError):
    pass


class ResidualTooLarge(EofError):
    def __init__(self, message, residual=float("nan")):
        super().__init__(message)
        self.residual = residual


class NoFeasibleRoot(EofError):
    """No quartic root produced a consistent decomposition.

    ``candidates`` holds one diagnostic dict per examined root.
    """

    def __init__(self, message, candidates=()):
        super().__init__(message)
        self.candidates = list(candidates)


class DomainError(EofError):
    pass


class SpecialCaseMismatch(EofError):
    """A closed-form solver was called off its manifold."""


class NotSymmetric(SpecialCaseMismatch):
    pass


class NotSqueezedThermal(SpecialCaseMismatch):
    pass


class NotOnKappaManifold(SpecialCaseMismatch):
    pass


class CertificationFailed(EofError):
    def __init__(self, message, field, value):
        super().__init__(message)
        self.field = field
        self.value = value


class GenerationStalled(EofError):
    pass


class InputError(EofError):
    """Malformed or convention-violating state input."""
