"""Exception hierarchy shared by all lpkit modules."""


class LPKitError(Exception):
    """Base class for every error raised by lpkit."""


class UsageError(LPKitError):
    """An operation was called with an argument of the wrong kind."""


class DomainError(LPKitError, ValueError):
    """A numeric parameter lies outside the admissible range."""


class ConfigurationError(LPKitError, ValueError):
    """A grid, scale window or run configuration is inconsistent."""


class CapabilityError(LPKitError):
    """The requested computation cannot be carried out reliably."""


class EvaluationError(LPKitError):
    """A kernel symbol could not be evaluated (raised, or returned non-finite values)."""


class PreconditionError(LPKitError):
    """A mathematical precondition (e.g. the Tauberian condition) fails.

    The offending evidence is kept in ``witness``.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
