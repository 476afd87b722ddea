"""Exception types raised across the package.

Two families matter to callers: :class:`InputError` for I/O-shaped problems
(bad files, malformed rows) and :class:`DataError` for data that parses but
violates an operation's preconditions. The CLI maps the latter to exit code 2.
"""

from __future__ import annotations


class GazeSAError(Exception):
    """Base class for all package errors."""


class DataError(GazeSAError, ValueError):
    """Input is well-formed but violates a precondition."""


class InputError(DataError):
    """Problem found while parsing an input stream."""


class EmptyInput(InputError):
    pass


class MalformedRow(InputError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class NonMonotonicTime(InputError):
    def __init__(self, line: int, t: float):
        super().__init__(f"line {line}: timestamp {t!r} does not increase")
        self.line = line
        self.t = t


class NegativeSpeed(InputError):
    def __init__(self, line: int, speed: float):
        super().__init__(f"line {line}: negative speed {speed!r}")
        self.line = line
        self.speed = speed


# numerics
class DegenerateData(DataError):
    pass


class LengthMismatch(DataError):
    pass


class TooFewSamples(DataError):
    pass


class TooFewRows(DataError):
    pass


class NotADistribution(DataError):
    pass


class NotStochastic(DataError):
    pass


class ConstantSeries(DataError):
    pass


# scoring / baselines / study
class EmptyTrace(DataError):
    pass


class TooShort(DataError):
    pass


class TooFewTrials(DataError):
    pass


class TooFewRuns(DataError):
    pass


class NoRuns(DataError):
    pass


class ZeroDuration(DataError):
    pass


class ConstantSpeed(DataError):
    pass


class InvalidConfig(DataError):
    pass


class NonConvergedWarning(RuntimeWarning):
    """Power iteration hit its iteration cap before converging."""
