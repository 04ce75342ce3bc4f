"""Problem model: transmission matrix, two-interval problem, sampled traces.

The differential equation is ``-p(x) y'' + q(x) y = lambda y`` on
``[-pi, 0) U (0, pi]`` with a separated boundary condition at each outer
endpoint and two linear conditions coupling the one-sided values and
derivatives at the interior point 0.  The natural inner product of the
problem weights the left subinterval by ``Delta34/p1`` and the right by
``Delta12/p2``, where ``Deltaij`` are column minors of the coupling matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EvaluationError, GridMismatchError, ProblemValidationError
from .expr import Expression, as_expression

LEFT_END = -math.pi
RIGHT_END = math.pi
DEFAULT_GRID_STEPS = 2048


class TransmissionMatrix:
    """2x4 coefficient matrix of the interface conditions.

    Row ``i`` holds ``(b+_i0, b+_i1, b-_i0, b-_i1)``: the coefficients of
    ``y(0+), y'(0+), y(0-), y'(0-)`` in the i-th interface condition.  The
    2x2 column minors ``Delta_ij`` are precomputed.
    """

    __slots__ = ("entries", "_minors")

    def __init__(self, entries):
        rows = [tuple(float(v) for v in row) for row in entries]
        if len(rows) != 2 or any(len(r) != 4 for r in rows):
            raise ValueError("transmission matrix must be 2x4")
        self.entries = (rows[0], rows[1])
        self._minors = {}
        for i in range(1, 5):
            for j in range(i + 1, 5):
                a, b = self.entries
                self._minors[(i, j)] = a[i - 1] * b[j - 1] - a[j - 1] * b[i - 1]

    @classmethod
    def continuity(cls) -> "TransmissionMatrix":
        """The matrix enforcing plain continuity of y and y' across 0."""
        return cls([[1.0, 0.0, -1.0, 0.0], [0.0, 1.0, 0.0, -1.0]])

    def minor(self, i: int, j: int) -> float:
        """Determinant of columns ``i`` and ``j`` (1-based, ``i < j``)."""
        if not (1 <= i < j <= 4):
            raise IndexError(f"minor indices out of range: ({i}, {j})")
        return self._minors[(i, j)]

    @property
    def delta12(self) -> float:
        return self._minors[(1, 2)]

    @property
    def delta34(self) -> float:
        return self._minors[(3, 4)]

    def condition_residuals(self, y_minus, dy_minus, y_plus, dy_plus):
        """Residuals of the two interface conditions for given one-sided data."""
        out = []
        for row in self.entries:
            out.append(row[0] * y_plus + row[1] * dy_plus
                       + row[2] * y_minus + row[3] * dy_minus)
        return tuple(out)

    def __repr__(self):
        return f"TransmissionMatrix({[list(r) for r in self.entries]})"

    def __eq__(self, other):
        return isinstance(other, TransmissionMatrix) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)


def minor(tmatrix: TransmissionMatrix, i: int, j: int) -> float:
    """Column minor ``Delta_ij`` of a transmission matrix (1-based indices)."""
    return tmatrix.minor(i, j)


@dataclass(frozen=True, eq=False)
class TwoIntervalProblem:
    """A full problem instance: coefficients, boundary angles, coupling, grid."""

    p1: float
    p2: float
    alpha: float
    beta: float
    q_left: Expression
    q_right: Expression
    tmatrix: TransmissionMatrix
    grid_steps: int = DEFAULT_GRID_STEPS
    _cache: dict = field(init=False, default_factory=dict, repr=False, compare=False)

    @property
    def weight_left(self) -> float:
        """Inner-product weight Delta34/p1 on [-pi, 0)."""
        return self.tmatrix.delta34 / self.p1

    @property
    def weight_right(self) -> float:
        """Inner-product weight Delta12/p2 on (0, pi]."""
        return self.tmatrix.delta12 / self.p2

    @property
    def step(self) -> float:
        return math.pi / self.grid_steps

    def nodes(self, side: str) -> np.ndarray:
        """Uniform grid nodes of one subinterval (endpoints included)."""
        key = ("nodes", side)
        if key not in self._cache:
            if side == "left":
                self._cache[key] = np.linspace(LEFT_END, 0.0, self.grid_steps + 1)
            elif side == "right":
                self._cache[key] = np.linspace(0.0, RIGHT_END, self.grid_steps + 1)
            else:
                raise ValueError(f"side must be 'left' or 'right', got {side!r}")
        return self._cache[key]

    def q_expression(self, side: str) -> Expression:
        return self.q_left if side == "left" else self.q_right

    def p_value(self, side: str) -> float:
        return self.p1 if side == "left" else self.p2

    def q_on_nodes(self, side: str) -> np.ndarray:
        key = ("q_nodes", side)
        if key not in self._cache:
            self._cache[key] = self.q_expression(side)(self.nodes(side))
        return self._cache[key]

    def q_on_midpoints(self, side: str) -> np.ndarray:
        key = ("q_mids", side)
        if key not in self._cache:
            x = self.nodes(side)
            self._cache[key] = self.q_expression(side)(0.5 * (x[:-1] + x[1:]))
        return self._cache[key]

    def max_abs_q(self) -> float:
        return max(float(np.max(np.abs(self.q_on_nodes("left")))),
                   float(np.max(np.abs(self.q_on_nodes("right")))))

    def require_valid(self):
        violations = validate_problem(self)
        if violations:
            raise ProblemValidationError(violations)


def problem(p1=1.0, p2=1.0, alpha=0.0, beta=0.0, q_left="0", q_right="0",
            tmatrix=None, grid_steps=DEFAULT_GRID_STEPS) -> TwoIntervalProblem:
    """Convenience constructor accepting expression strings."""
    if tmatrix is None:
        tmatrix = TransmissionMatrix.continuity()
    elif not isinstance(tmatrix, TransmissionMatrix):
        tmatrix = TransmissionMatrix(tmatrix)
    return TwoIntervalProblem(
        p1=float(p1), p2=float(p2), alpha=float(alpha), beta=float(beta),
        q_left=as_expression(q_left), q_right=as_expression(q_right),
        tmatrix=tmatrix, grid_steps=int(grid_steps))


def validate_problem(P: TwoIntervalProblem) -> list[str]:
    """Check the standing assumptions; return a list of violation messages.

    An empty list means the problem is admissible.  Violations are data,
    not exceptions, so callers can report all of them at once.
    """
    violations = []
    if not (P.p1 > 0):
        violations.append("p1 not positive")
    if not (P.p2 > 0):
        violations.append("p2 not positive")
    d12 = P.tmatrix.delta12
    d34 = P.tmatrix.delta34
    if d12 == 0.0:
        violations.append("Delta12 = 0")
    if d34 == 0.0:
        violations.append("Delta34 = 0")
    if P.p1 > 0 and d34 != 0.0 and not (d34 / P.p1 > 0):
        violations.append("left weight Delta34/p1 not positive")
    if P.p2 > 0 and d12 != 0.0 and not (d12 / P.p2 > 0):
        violations.append("right weight Delta12/p2 not positive")
    if P.grid_steps < 4 or P.grid_steps % 2 != 0:
        violations.append("grid_steps must be an even integer >= 4")
    else:
        for side, name in (("left", "q_left"), ("right", "q_right")):
            try:
                P.q_on_nodes(side)
                P.q_on_midpoints(side)
            except EvaluationError as exc:
                violations.append(f"{name} not evaluable: {exc}")
    return violations


# ---------------------------------------------------------------------------
# Sampled solutions

@dataclass(frozen=True, eq=False)
class FullTrace:
    """A function sampled on both subinterval grids, with derivatives.

    The interface point carries two samples: ``left`` arrays end at 0- and
    ``right`` arrays start at 0+, so integrals never straddle the jump.
    """

    left_x: np.ndarray
    left_y: np.ndarray
    left_dy: np.ndarray
    right_x: np.ndarray
    right_y: np.ndarray
    right_dy: np.ndarray

    def __post_init__(self):
        for name in ("left_y", "left_dy", "right_y", "right_dy"):
            arr = getattr(self, name)
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"non-finite values in {name}")

    # one-sided limits at the interface, stored as the innermost samples
    @property
    def value_minus(self) -> float:
        """y(0-)"""
        return float(self.left_y[-1])

    @property
    def deriv_minus(self) -> float:
        """y'(0-)"""
        return float(self.left_dy[-1])

    @property
    def value_plus(self) -> float:
        """y(0+)"""
        return float(self.right_y[0])

    @property
    def deriv_plus(self) -> float:
        """y'(0+)"""
        return float(self.right_dy[0])

    def side_arrays(self, side: str):
        if side == "left":
            return self.left_x, self.left_y, self.left_dy
        if side == "right":
            return self.right_x, self.right_y, self.right_dy
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")

    def value_at(self, x, side: str | None = None):
        """Cubic Hermite interpolation of y at ``x`` (side required at x=0)."""
        side = _resolve_side(x, side)
        xs, ys, dys = self.side_arrays(side)
        return hermite_value(xs, ys, dys, x)

    def derivative_at(self, x, side: str | None = None):
        side = _resolve_side(x, side)
        xs, ys, dys = self.side_arrays(side)
        return hermite_derivative(xs, ys, dys, x)

    def same_grid(self, other: "FullTrace") -> bool:
        return (self.left_x.shape == other.left_x.shape
                and self.right_x.shape == other.right_x.shape
                and self.left_x[0] == other.left_x[0]
                and self.right_x[-1] == other.right_x[-1])

    def scaled(self, factor: float) -> "FullTrace":
        return FullTrace(self.left_x, factor * self.left_y, factor * self.left_dy,
                         self.right_x, factor * self.right_y, factor * self.right_dy)

    def max_abs(self) -> float:
        return max(float(np.max(np.abs(self.left_y))),
                   float(np.max(np.abs(self.right_y))))

    @classmethod
    def zeros(cls, P: TwoIntervalProblem) -> "FullTrace":
        xl, xr = P.nodes("left"), P.nodes("right")
        z = np.zeros_like(xl)
        return cls(xl, z.copy(), z.copy(), xr, z.copy(), z.copy())


def _resolve_side(x, side):
    if side is not None:
        if side not in ("left", "right"):
            raise ValueError(f"side must be 'left' or 'right', got {side!r}")
        return side
    x = float(x)
    if x == 0.0:
        raise ValueError("x=0 is two-sided; pass side='left' or side='right'")
    return "left" if x < 0.0 else "right"


def sample_expression(P: TwoIntervalProblem, f) -> FullTrace:
    """Sample an expression on the solver grid.

    Derivatives are filled by finite differences (4-point one-sided at the
    ends of each subinterval, central inside); they exist so generic trace
    consumers such as interface-condition checks have derivative data.
    """
    f = as_expression(f)
    h = P.step
    parts = []
    for side in ("left", "right"):
        x = P.nodes(side)
        y = f(x)
        dy = np.empty_like(y)
        dy[1:-1] = (y[2:] - y[:-2]) / (2.0 * h)
        dy[0] = (-11.0 * y[0] + 18.0 * y[1] - 9.0 * y[2] + 2.0 * y[3]) / (6.0 * h)
        dy[-1] = (11.0 * y[-1] - 18.0 * y[-2] + 9.0 * y[-3] - 2.0 * y[-4]) / (6.0 * h)
        parts.append((x, y, dy))
    (xl, yl, dyl), (xr, yr, dyr) = parts
    return FullTrace(xl, yl, dyl, xr, yr, dyr)


# ---------------------------------------------------------------------------
# Quadrature on the solver grid

def simpson(values: np.ndarray, h: float) -> float:
    """Composite Simpson integral of node values on a uniform grid.

    The node count must be odd (an even number of panels).
    """
    n = values.shape[0]
    if n < 3 or n % 2 == 0:
        raise ValueError("composite Simpson needs an odd number of nodes")
    acc = values[0] + values[-1] + 4.0 * np.sum(values[1:-1:2]) + 2.0 * np.sum(values[2:-2:2])
    return float(acc * h / 3.0)


def cumulative_quadrature(values: np.ndarray, h: float) -> np.ndarray:
    """Prefix integrals at every node, fourth-order accurate.

    Each per-cell increment integrates the cubic through the four nearest
    nodes, so the result is consistent with Simpson-level accuracy while
    being available at every node, not just even ones.
    """
    n = values.shape[0]
    if n < 4:
        raise ValueError("need at least 4 nodes")
    v = values
    inc = np.empty(n - 1, dtype=float)
    inc[1:-1] = (-v[:-3] + 13.0 * v[1:-2] + 13.0 * v[2:-1] - v[3:]) * (h / 24.0)
    inc[0] = (9.0 * v[0] + 19.0 * v[1] - 5.0 * v[2] + v[3]) * (h / 24.0)
    inc[-1] = (v[-4] - 5.0 * v[-3] + 19.0 * v[-2] + 9.0 * v[-1]) * (h / 24.0)
    out = np.empty(n, dtype=float)
    out[0] = 0.0
    np.cumsum(inc, out=out[1:])
    return out


def inner_product(P: TwoIntervalProblem, f: FullTrace, g: FullTrace) -> float:
    """Weighted inner product (Delta34/p1) int_left f g + (Delta12/p2) int_right f g."""
    _require_problem_grid(P, f)
    _require_problem_grid(P, g)
    h = P.step
    left = simpson(f.left_y * g.left_y, h)
    right = simpson(f.right_y * g.right_y, h)
    return P.weight_left * left + P.weight_right * right


def weighted_norm(P: TwoIntervalProblem, f: FullTrace) -> float:
    return math.sqrt(max(inner_product(P, f, f), 0.0))


def _require_problem_grid(P: TwoIntervalProblem, trace: FullTrace):
    n = P.grid_steps + 1
    if trace.left_y.shape[0] != n or trace.right_y.shape[0] != n:
        raise GridMismatchError(
            f"trace sampled on {trace.left_y.shape[0] - 1} steps, "
            f"problem uses {P.grid_steps}")


# ---------------------------------------------------------------------------
# Residual diagnostics

def btc_residuals(P: TwoIntervalProblem, trace: FullTrace) -> tuple[float, float, float, float]:
    """Residuals of the two boundary and two interface conditions.

    Order: left boundary, right boundary, first interface condition,
    second interface condition.  Values and derivatives are read from the
    trace samples.
    """
    r_left = (math.cos(P.alpha) * float(trace.left_y[0])
              + math.sin(P.alpha) * float(trace.left_dy[0]))
    r_right = (math.cos(P.beta) * float(trace.right_y[-1])
               + math.sin(P.beta) * float(trace.right_dy[-1]))
    t1, t2 = P.tmatrix.condition_residuals(
        trace.value_minus, trace.deriv_minus, trace.value_plus, trace.deriv_plus)
    return (r_left, r_right, float(t1), float(t2))


def second_derivative(values: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order central second derivative at interior nodes (index 2..n-3)."""
    v = values
    return (-v[:-4] + 16.0 * v[1:-3] - 30.0 * v[2:-2] + 16.0 * v[3:-1] - v[4:]) / (12.0 * h * h)


def ode_residual(P: TwoIntervalProblem, trace: FullTrace, lam: float,
                 rhs: FullTrace | None = None) -> float:
    """max over interior nodes of |-p y'' + (q - lambda) y - f|.

    ``rhs`` supplies f (defaults to 0); the second derivative comes from
    central differences of the trace values.
    """
    _require_problem_grid(P, trace)
    h = P.step
    worst = 0.0
    for side in ("left", "right"):
        _, y, _ = trace.side_arrays(side)
        d2 = second_derivative(y, h)
        q = P.q_on_nodes(side)[2:-2]
        res = -P.p_value(side) * d2 + (q - lam) * y[2:-2]
        if rhs is not None:
            _, fy, _ = rhs.side_arrays(side)
            res = res - fy[2:-2]
        worst = max(worst, float(np.max(np.abs(res))))
    return worst


# ---------------------------------------------------------------------------
# Cubic Hermite interpolation on a uniform grid

def _hermite_setup(x_nodes, x):
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    xq = np.atleast_1d(x)
    lo, hi = x_nodes[0], x_nodes[-1]
    if np.any(xq < lo - 1e-12) or np.any(xq > hi + 1e-12):
        raise ValueError("interpolation point outside the subinterval")
    h = x_nodes[1] - x_nodes[0]
    idx = np.clip(((xq - lo) / h).astype(int), 0, x_nodes.shape[0] - 2)
    t = (xq - x_nodes[idx]) / h
    return scalar, idx, t, h


def hermite_value(x_nodes, y, dy, x):
    scalar, i, t, h = _hermite_setup(x_nodes, x)
    t2, t3 = t * t, t * t * t
    v = ((2.0 * t3 - 3.0 * t2 + 1.0) * y[i]
         + (t3 - 2.0 * t2 + t) * h * dy[i]
         + (-2.0 * t3 + 3.0 * t2) * y[i + 1]
         + (t3 - t2) * h * dy[i + 1])
    return float(v[0]) if scalar else v


def hermite_derivative(x_nodes, y, dy, x):
    scalar, i, t, h = _hermite_setup(x_nodes, x)
    t2 = t * t
    v = ((6.0 * t2 - 6.0 * t) * y[i] / h
         + (3.0 * t2 - 4.0 * t + 1.0) * dy[i]
         + (-6.0 * t2 + 6.0 * t) * y[i + 1] / h
         + (3.0 * t2 - 2.0 * t) * dy[i + 1])
    return float(v[0]) if scalar else v
