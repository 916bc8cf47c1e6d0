"""
SPDX-License-Identifier: MIT

Holds the custom exceptions defined for use by the toolkit.
"""

class ToolkitException(Exception):
    """
    Base class of every exception raised by the toolkit.
    """

class DimensionError(ToolkitException):
    """
    Thrown when two vectors (or a vector and a problem) disagree on their dimension.

    Attributes:
        expected: The expected dimension.
        actual: The dimension that was received.
    """
    def __init__(self, expected: int, actual: int) -> None:
        super().__init__(expected, actual)
        self.expected = expected
        self.actual = actual

    def __str__(self) -> str:
        return f'Dimension mismatch: expected {self.expected}, got {self.actual}'

class EvaluationError(ToolkitException):
    """
    Thrown when a non-finite value (NaN or Inf) appears in a computation.

    Divergence of the iterates is a legitimate outcome of a run, numeric overflow is not: this exception keeps the two
    distinguishable by aborting the run at the first non-finite intermediate.

    Attributes:
        what: A short description of the offending quantity.
        step: The step index of the run where the value appeared (if known).
        location: The `(t, k)` outer/inner location for VRADAM runs (if known).
    """
    def __init__(self, what: str, step: int | None = None, location: tuple[int, int] | None = None) -> None:
        super().__init__(what, step, location)
        self.what = what
        self.step = step
        self.location = location

    def __str__(self) -> str:
        where = ''
        if self.location is not None:
            where = f' at (t={self.location[0]}, k={self.location[1]})'
        elif self.step is not None:
            where = f' at step {self.step}'

        return f'Non-finite value in {self.what}{where}'

class BracketError(ToolkitException):
    """
    Thrown when a root finding bracket does not contain a sign change.

    Attributes:
        lo: The lower end of the bracket.
        hi: The upper end of the bracket.
        g_lo: The function value at `lo`.
        g_hi: The function value at `hi`.
    """
    def __init__(self, lo: float, hi: float, g_lo: float, g_hi: float) -> None:
        super().__init__(lo, hi, g_lo, g_hi)
        self.lo = lo
        self.hi = hi
        self.g_lo = g_lo
        self.g_hi = g_hi

    def __str__(self) -> str:
        return f'No sign change on [{self.lo}, {self.hi}]: g(lo)={self.g_lo}, g(hi)={self.g_hi}'

class ConstructionError(ToolkitException):
    """
    Thrown when a divergence construction cannot be built for the requested sizes.

    Attributes:
        reason: Why the construction is infeasible.
    """
    def __init__(self, reason: str) -> None:
        super().__init__(reason)
        self.reason = reason

    def __str__(self) -> str:
        return f'Infeasible construction: {self.reason}'

class DatasetFormatError(ToolkitException):
    """
    Thrown when a dataset file fails to parse.

    Attributes:
        path: The dataset file path.
        line: The 1-based line number where parsing failed.
        reason: The parser message.
    """
    def __init__(self, path: str, line: int, reason: str) -> None:
        super().__init__(path, line, reason)
        self.path = path
        self.line = line
        self.reason = reason

    def __str__(self) -> str:
        return f'Could not parse "{self.path}" (line {self.line}): {self.reason}'

class LabelError(ToolkitException):
    """
    Thrown when the labels of a dataset do not form a contiguous integer range.

    Attributes:
        labels: The sorted distinct labels found in the file.
    """
    def __init__(self, labels: list) -> None:
        super().__init__(labels)
        self.labels = labels

    def __str__(self) -> str:
        return f'Labels are not a contiguous integer range: {self.labels}'

class ConfigurationError(ToolkitException):
    """
    Thrown when an optimizer configuration violates the hypothesis of the check it is used for.

    Attributes:
        hypothesis: The violated hypothesis, spelled out.
    """
    def __init__(self, hypothesis: str) -> None:
        super().__init__(hypothesis)
        self.hypothesis = hypothesis

    def __str__(self) -> str:
        return f'Configuration rejected: {self.hypothesis}'

class TimeRangeError(ToolkitException):
    """
    Thrown when two time series have no overlapping time range.

    Attributes:
        range_a: The `(start, end)` time range of the first series.
        range_b: The `(start, end)` time range of the second series.
    """
    def __init__(self, range_a: tuple[float, float], range_b: tuple[float, float]) -> None:
        super().__init__(range_a, range_b)
        self.range_a = range_a
        self.range_b = range_b

    def __str__(self) -> str:
        return f'Time ranges {self.range_a} and {self.range_b} do not overlap'

class EnumerationSizeError(ToolkitException):
    """
    Thrown when an exhaustive batch enumeration would exceed the enumeration cap.

    Attributes:
        count: The number of batches the enumeration would visit.
        cap: The maximum number of batches allowed.
    """
    def __init__(self, count: int, cap: int) -> None:
        super().__init__(count, cap)
        self.count = count
        self.cap = cap

    def __str__(self) -> str:
        return f'Refusing to enumerate {self.count} batches (cap is {self.cap})'

class ReplayError(ToolkitException):
    """
    Thrown when replaying a recorded run does not reproduce the recorded state.

    Attributes:
        t: The outer iteration of the mismatch.
        k: The inner iteration of the mismatch.
        deviation: The observed deviation.
    """
    def __init__(self, t: int, k: int, deviation: float) -> None:
        super().__init__(t, k, deviation)
        self.t = t
        self.k = k
        self.deviation = deviation

    def __str__(self) -> str:
        return f'Replay mismatch at (t={self.t}, k={self.k}): deviation {self.deviation:.3e}'

class TrialException(ToolkitException):
    """
    Thrown by a worker when a Monte-Carlo trial fails.

    The trial is counted as failed by the harness and excluded from the aggregates.

    Attributes:
        trial: The index of the failed trial.
        cause: The original exception.
    """
    def __init__(self, trial: int, cause: Exception) -> None:
        super().__init__(trial, cause)
        self.trial = trial
        self.cause = cause

    def __str__(self) -> str:
        return f'Trial #{self.trial} failed: {self.cause}'
