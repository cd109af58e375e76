"""Exception hierarchy.

Every error raised by the library derives from :class:`MixingError`, which is
itself a :class:`ValueError`, so callers that only care about "bad input" can
catch ``ValueError``. The class name doubles as the typed error name printed by
the command line tool.
"""


class MixingError(ValueError):
    """Base class for all library errors."""


class InvalidComposition(MixingError):
    pass


class LengthMismatch(MixingError):
    pass


class DomainError(MixingError):
    pass


class NegativeValue(DomainError):
    pass


class NonPositiveValue(DomainError):
    pass


class BranchDomainError(DomainError):
    pass


class ZeroWithNonpositiveP(DomainError):
    pass


class NonInvertible(MixingError):
    pass


class InvalidGenerator(MixingError):
    pass


class Infeasible(MixingError):
    """The measured mixture value admits no nonnegative solution."""


class ZeroFraction(MixingError):
    pass


class OutOfRange(MixingError):
    pass


class DegenerateEqualPhases(MixingError):
    pass


class SaturationOutOfRange(MixingError):
    pass


class Unsolvable(MixingError):
    """No finite exponent reproduces the measurement.

    ``hint`` carries the limiting exponent (``inf`` or ``-inf``) whose
    max/min limit is the closest the power-mean family gets.
    """

    def __init__(self, message, hint=None):
        super().__init__(message)
        self.hint = hint


class Degenerate(MixingError):
    """All contributing phase values are equal, so every exponent fits."""


class AllDegenerate(MixingError):
    pass


class EmptyDataset(MixingError):
    pass


class DegenerateGrid(MixingError):
    pass


class DataFormatError(MixingError):
    """Unparseable dataset file; ``line`` is 1-based."""

    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line
