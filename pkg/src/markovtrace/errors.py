"""Exception hierarchy shared by the syntactic and semantic layers."""
from __future__ import annotations


class MarkovTraceError(Exception):
    """Base class for all errors raised by this package."""


class LabelClash(MarkovTraceError):
    def __init__(self, first: int, second: int, labels: tuple[str, str]):
        self.wires = (first, second)
        self.labels = labels
        super().__init__(
            f"cannot identify wire {first} ({labels[0]}) with wire {second} ({labels[1]})"
        )


class SignatureMismatch(MarkovTraceError):
    pass


class BoundaryMismatch(MarkovTraceError):
    pass


class UnknownName(MarkovTraceError):
    pass


class InvalidDiagram(MarkovTraceError):
    """Raised by validation; ``violations`` lists every problem found."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class Cyclic(InvalidDiagram):
    pass


class NotLeftMonogamous(InvalidDiagram):
    pass


class EliminableBox(InvalidDiagram):
    pass


class SignallingInput(MarkovTraceError):
    pass


class DimensionMismatch(MarkovTraceError):
    pass


class NotStochastic(MarkovTraceError):
    pass


class ModelError(MarkovTraceError):
    pass


class EvaluationError(MarkovTraceError):
    """The evaluator produced something that is not a kernel: a bug, not a user error."""


class AuditFailure(MarkovTraceError):
    pass


class DSLError(MarkovTraceError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}")
