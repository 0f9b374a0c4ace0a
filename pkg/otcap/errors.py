"""Exception hierarchy for otcap."""

from typing import Any, Optional, Tuple


class OTCapError(Exception):
    """Base class for all otcap errors."""


class InvalidArgumentError(OTCapError, ValueError):
    """An argument violates an operation's precondition."""


class DegenerateMeasureError(InvalidArgumentError):
    """A measure has zero total mass where positive mass is required."""


class DegenerateScoreError(InvalidArgumentError):
    """An importance score cannot be computed for some entry."""

    def __init__(self, message: str, entry: Optional[Tuple[int, int]] = None):
        super().__init__(message)
        self.entry = entry


class InfeasibleInstanceError(OTCapError):
    """The constraint set of an instance is empty."""

    def __init__(self, message: str, report: Optional[Any] = None):
        super().__init__(message)
        self.report = report


class NotApplicableError(OTCapError):
    """A construction's hypothesis does not hold for the given input."""


class HeuristicExhaustedError(OTCapError):
    """The pattern search hit its attempt cap without a feasible pattern."""

    def __init__(self, message: str, attempts: int = 0):
        super().__init__(message)
        self.attempts = attempts


class OracleTooLargeError(OTCapError):
    """Exhaustive enumeration would exceed the configured cap."""

    def __init__(self, message: str, patterns: int = 0, cap: int = 0):
        super().__init__(message)
        self.patterns = patterns
        self.cap = cap


class PipelineStepError(OTCapError):
    """A per-step sparsification failed inside the combined pipeline."""

    def __init__(self, message: str, step: int, cause: Optional[BaseException] = None):
        super().__init__(message)
        self.step = step
        self.cause = cause


class InstanceFormatError(OTCapError):
    """An instance file is malformed."""

    def __init__(self, message: str, field: str = "", line: Optional[int] = None):
        super().__init__(message)
        self.field = field
        self.line = line

    def __str__(self) -> str:
        location = []
        if self.field:
            location.append(f"field '{self.field}'")
        if self.line is not None:
            location.append(f"line {self.line}")
        if location:
            return f"{super().__str__()} ({', '.join(location)})"
        return super().__str__()


class EquivalenceError(OTCapError):
    """Two formulations that must agree on optimal cost disagree."""


class SolverError(OTCapError):
    """The LP engine stopped without an optimal or infeasible verdict."""

    def __init__(self, message: str, status: Optional[Any] = None):
        super().__init__(message)
        self.status = status
