"""Fixed-step fourth-order integration of -p y'' + q y = lambda y on one subinterval.

The first-order system (y, y')' = (y', (q - lambda) y / p) is advanced with
the classical Runge-Kutta scheme on the problem's uniform grid.  The
potential is evaluated exactly at the stage abscissae (nodes and cell
midpoints); those values depend only on the problem, not on lambda, so they
are computed once and reused.  The propagation core is vectorised over a
batch of lambda values, which is what makes dense characteristic-function
scans affordable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError
from .model import TwoIntervalProblem

OVERFLOW_LIMIT = 1e300


@dataclass(frozen=True, eq=False)
class HalfTrace:
    """A solution sampled on one subinterval grid (nodes in ascending order)."""

    side: str
    x: np.ndarray
    y: np.ndarray
    dy: np.ndarray
    initial: tuple
    direction: str


def propagate_batch(P: TwoIntervalProblem, side: str, lams: np.ndarray,
                    y0, dy0, direction: str = "forward"):
    """Integrate across one subinterval for a batch of lambda values.

    Parameters
    ----------
    lams : (m,) array of lambda values.
    y0, dy0 : scalars or (m,) arrays, the data at the starting endpoint
        (the left node for ``forward``, the right node for ``backward``).

    Returns
    -------
    Y, DY : (n_nodes, m) arrays indexed by ascending node order.
    """
    if direction not in ("forward", "backward"):
        raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")
    lams = np.asarray(lams, dtype=float)
    m = lams.shape[0]
    qn = P.q_on_nodes(side)
    qm = P.q_on_midpoints(side)
    n_steps = P.grid_steps
    inv_p = 1.0 / P.p_value(side)
    h = P.step if direction == "forward" else -P.step

    y = np.broadcast_to(np.asarray(y0, dtype=float), (m,)).copy()
    dy = np.broadcast_to(np.asarray(dy0, dtype=float), (m,)).copy()

    Y = np.empty((n_steps + 1, m))
    DY = np.empty((n_steps + 1, m))
    if direction == "forward":
        node_order = range(0, n_steps)
        mid_of = lambda i: i
        nxt = 1
        start = 0
    else:
        node_order = range(n_steps, 0, -1)
        mid_of = lambda i: i - 1
        nxt = -1
        start = n_steps
    Y[start] = y
    DY[start] = dy

    half = 0.5 * h
    sixth = h / 6.0
    with np.errstate(over="ignore", invalid="ignore"):  # divergence is detected below
        _run_steps(node_order, mid_of, nxt, qn, qm, lams, inv_p, h, half, sixth,
                   y, dy, Y, DY)
    _check_finite(Y, DY, side, lams)
    return Y, DY


def _run_steps(node_order, mid_of, nxt, qn, qm, lams, inv_p, h, half, sixth, y, dy, Y, DY):
    for i in node_order:
        a0 = (qn[i] - lams) * inv_p
        am = (qm[mid_of(i)] - lams) * inv_p
        a1 = (qn[i + nxt] - lams) * inv_p
        k1y = dy
        k1d = a0 * y
        k2y = dy + half * k1d
        k2d = am * (y + half * k1y)
        k3y = dy + half * k2d
        k3d = am * (y + half * k2y)
        k4y = dy + h * k3d
        k4d = a1 * (y + h * k3y)
        y = y + sixth * (k1y + 2.0 * (k2y + k3y) + k4y)
        dy = dy + sixth * (k1d + 2.0 * (k2d + k3d) + k4d)
        Y[i + nxt] = y
        DY[i + nxt] = dy


def _check_finite(Y, DY, side, lams):
    bad = ~np.isfinite(Y) | (np.abs(Y) > OVERFLOW_LIMIT)
    bad |= ~np.isfinite(DY) | (np.abs(DY) > OVERFLOW_LIMIT)
    if bad.any():
        node_idx, col = np.argwhere(bad)[0]
        raise DivergenceError(side, int(node_idx), float(lams[col]))


def integrate_subinterval(P: TwoIntervalProblem, side: str, lam: float,
                          y0: float, dy0: float,
                          direction: str = "forward") -> HalfTrace:
    """Integrate one subinterval for a single lambda and return the trace.

    ``y0, dy0`` are imposed at the starting endpoint; all grid nodes,
    including both endpoints, are sampled in the result.
    """
    P.require_valid()
    lams = np.array([float(lam)])
    Y, DY = propagate_batch(P, side, lams, float(y0), float(dy0), direction)
    return HalfTrace(side=side, x=P.nodes(side), y=Y[:, 0], dy=DY[:, 0],
                     initial=(float(y0), float(dy0)), direction=direction)
