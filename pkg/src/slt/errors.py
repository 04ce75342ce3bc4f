"""Exception hierarchy shared across the package."""

from __future__ import annotations


class SLTError(Exception):
    """Base class for all errors raised by this package."""


class ExpressionSyntaxError(SLTError):
    """Malformed expression text; ``offset`` is the byte position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class EvaluationError(SLTError):
    """Expression evaluation produced a non-finite or undefined value."""


class ProblemValidationError(SLTError):
    """A problem instance violates its standing assumptions."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid problem: " + "; ".join(self.violations))


class GridMismatchError(SLTError):
    """Traces sampled on incompatible grids were combined."""


class DivergenceError(SLTError):
    """Integration blew up (|y| beyond the overflow guard)."""

    def __init__(self, side: str, node_index: int, lam: float):
        super().__init__(
            f"solution diverged on the {side} subinterval at node {node_index} "
            f"(lambda={lam!r})")
        self.side = side
        self.node_index = node_index
        self.lam = lam


class NearEigenvalueError(SLTError):
    """lambda is within tolerance of an eigenvalue; the resolvent is singular."""


class ScanExhaustedError(SLTError):
    """The eigenvalue scan range grew past its limit without finding enough roots."""


class ConfigError(SLTError):
    """Problem configuration file could not be parsed or is incomplete."""
