"""Built-in reference problems used by the verification suite and the tests.

* ``c0`` is the classical problem in disguise: unit coefficients, zero
  potential, Dirichlet ends, plain continuity at the interface.  Its
  characteristic function is -sin(2 pi s)/s, so the eigenvalues are
  (k/2)^2 for k = 1, 2, 3, ...
* ``c1`` keeps everything except the interface, where the value jumps:
  y(0+) = 2 y(0-), y'(0+) = y'(0-).  The eigenvalues are unchanged but the
  natural inner product weights the left subinterval twice.
* ``c2`` is a Robin problem with a genuine potential, used where no closed
  form is available and only invariants are checked.
"""

from __future__ import annotations

import math

from .model import DEFAULT_GRID_STEPS, TwoIntervalProblem, problem

FIXTURE_NAMES = ("c0", "c1", "c2")


def c0(grid_steps: int = DEFAULT_GRID_STEPS) -> TwoIntervalProblem:
    return problem(grid_steps=grid_steps)


def c1(grid_steps: int = DEFAULT_GRID_STEPS) -> TwoIntervalProblem:
    return problem(tmatrix=[[1.0, 0.0, -2.0, 0.0], [0.0, 1.0, 0.0, -1.0]],
                   grid_steps=grid_steps)


def c2(grid_steps: int = DEFAULT_GRID_STEPS) -> TwoIntervalProblem:
    return problem(alpha=math.pi / 4, beta=math.pi / 3,
                   q_left="1+x*x", q_right="1+x*x", grid_steps=grid_steps)


def by_name(name: str, grid_steps: int = DEFAULT_GRID_STEPS) -> TwoIntervalProblem:
    try:
        builder = {"c0": c0, "c1": c1, "c2": c2}[name]
    except KeyError:
        raise ValueError(f"unknown fixture {name!r}; choose from {FIXTURE_NAMES}") from None
    return builder(grid_steps)
