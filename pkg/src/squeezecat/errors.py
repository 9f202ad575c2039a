"""Exception types raised across the package."""


class SqueezeCatError(Exception):
    """Base class; ``code`` is the CLI exit status associated with the error."""

    code = 1


class TailTooLarge(SqueezeCatError):
    """Probability discarded by the Fock truncation exceeds the allowed budget."""

    code = 3


class ZeroNorm(SqueezeCatError):
    code = 3


class ZeroProbability(SqueezeCatError):
    code = 3


class DomainError(SqueezeCatError, ValueError):
    code = 3


class ConstraintViolated(SqueezeCatError, ValueError):
    code = 3


class InvalidRegime(SqueezeCatError, ValueError):
    code = 3


class NoSolution(SqueezeCatError):
    code = 3


class NoConvergence(SqueezeCatError):
    code = 3
