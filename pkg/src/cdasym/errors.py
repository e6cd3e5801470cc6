"""Exception hierarchy shared by all modules."""


class CdasymError(Exception):
    """Base class for every error raised by the package."""


class InvalidField(CdasymError):
    pass


class InvalidExponent(CdasymError):
    pass


class ShapeMismatch(CdasymError):
    pass


class NonPositiveTime(CdasymError):
    pass


class DomainTooSmall(CdasymError):
    pass


class StepRejected(CdasymError):
    """Raised when a time step violates a stability guard.

    ``suggested_dt`` carries the largest step that would have been accepted.
    """

    def __init__(self, message: str, suggested_dt: float):
        super().__init__(message)
        self.suggested_dt = suggested_dt


class InternalError(CdasymError):
    pass


class InvalidSamples(CdasymError):
    pass


class InvalidRegime(CdasymError):
    pass


class InvalidConfig(CdasymError):
    pass
