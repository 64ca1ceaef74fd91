"""Exception hierarchy.

The CLI maps each family to an exit code: configuration problems exit with 2,
bad input data with 3 and mathematical domain violations with 4.
"""


class StpairError(Exception):
    exit_code = 1


class ConfigError(StpairError, ValueError):
    exit_code = 2


class DataError(StpairError, ValueError):
    exit_code = 3


class ParseError(DataError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DeligneViolation(DataError):
    """An eigenvalue falls outside the Deligne interval [-2, 2]."""


class LevelDividesPrime(DataError):
    """A coefficient is attached to a prime dividing the level."""


class MathDomainError(StpairError, ValueError):
    exit_code = 4


class NonSquarefreeLevel(MathDomainError):
    pass


class BadWeight(MathDomainError):
    pass


class NotCoprime(MathDomainError):
    pass


class ZeroDimension(MathDomainError):
    pass


class EmptyWindow(MathDomainError):
    """Fewer than two angles fall in the local window."""


class TraceTooLarge(MathDomainError):
    """The requested Hecke trace is out of reach of the trace formula."""
