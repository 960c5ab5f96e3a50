"""Exception hierarchy shared across the package.

Two families matter to callers: configuration problems (bad inputs,
mapped to CLI exit code 2) and numerical failures (broken preconditions
detected mid-computation, mapped to exit code 3).
"""


class BeamselError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(BeamselError):
    """Invalid configuration or request."""


class ParseError(ConfigError):
    """Malformed config text; message carries the offending line number."""


class ConstraintError(ConfigError):
    """A configuration invariant is violated; message cites it."""


class NumericalError(BeamselError):
    """A numerical routine detected a broken precondition."""


class NonHermitianInput(NumericalError):
    """Matrix passed to the Hermitian eigensolver is not Hermitian."""


class BracketFailure(NumericalError):
    """Secular function does not change sign over an interlacing bracket."""


class SingularShift(NumericalError):
    """Eigenvector shift coincides with a pole of the secular function."""


class PsdViolation(NumericalError):
    """A downdated Gram spectrum went negative beyond round-off."""


class DimensionMismatch(NumericalError):
    """Operands have incompatible shapes."""


class InvalidBudget(ConfigError):
    """Selection budget inconsistent with the candidate set."""


class BudgetTooLarge(ConfigError):
    """Exhaustive enumeration would exceed the subset-count cap."""


class RankDeficient(NumericalError):
    """Channel Gram matrix is too ill-conditioned to invert."""
