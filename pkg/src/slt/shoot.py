"""Glued fundamental solutions and the characteristic function.

Two solutions of the full two-interval problem are built by shooting:

* ``phi`` starts at -pi with data (sin alpha, -cos alpha), so it satisfies
  the left boundary condition identically, and is pushed through the
  interface with the jump map derived from the transmission matrix minors.
* ``chi`` starts at +pi with data (-sin beta, cos beta) and is pushed
  through the interface backwards.

On each subinterval the Wronskian ``w_i = phi_i chi_i' - phi_i' chi_i`` is
constant in x, and the interface jump maps have determinants Delta34/Delta12
and Delta12/Delta34, which gives ``w2 = (Delta34/Delta12) w1``.  The single
characteristic scalar ``Omega = Delta34 w1 = Delta12 w2`` vanishes exactly
at the eigenvalues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .integrate import propagate_batch
from .model import FullTrace, TwoIntervalProblem

BATCH_CHUNK = 512


def forward_jump(tmatrix) -> np.ndarray:
    """2x2 map sending (y(0-), y'(0-)) to (y(0+), y'(0+))."""
    d = tmatrix.minor
    return np.array([[d(2, 3), d(2, 4)],
                     [-d(1, 3), -d(1, 4)]]) / tmatrix.delta12


def backward_jump(tmatrix) -> np.ndarray:
    """2x2 map sending (y(0+), y'(0+)) to (y(0-), y'(0-)); inverse of forward_jump."""
    d = tmatrix.minor
    return np.array([[-d(1, 4), -d(2, 4)],
                     [d(1, 3), d(2, 3)]]) / tmatrix.delta34


@dataclass(frozen=True, eq=False)
class SolutionBatch:
    """Both glued solutions for a batch of lambda values.

    Arrays are (n_nodes, m): node index ascending in x, column per lambda.
    """

    lams: np.ndarray
    phi_left: tuple
    phi_right: tuple
    chi_left: tuple
    chi_right: tuple


def solve_batch(P: TwoIntervalProblem, lams: np.ndarray) -> SolutionBatch:
    """Shoot phi (left to right) and chi (right to left) for a lambda batch."""
    lams = np.asarray(lams, dtype=float)
    sin_a, cos_a = math.sin(P.alpha), math.cos(P.alpha)
    sin_b, cos_b = math.sin(P.beta), math.cos(P.beta)
    jf = forward_jump(P.tmatrix)
    jb = backward_jump(P.tmatrix)

    phi_ly, phi_ld = propagate_batch(P, "left", lams, sin_a, -cos_a, "forward")
    v_plus = jf[0, 0] * phi_ly[-1] + jf[0, 1] * phi_ld[-1]
    d_plus = jf[1, 0] * phi_ly[-1] + jf[1, 1] * phi_ld[-1]
    phi_ry, phi_rd = propagate_batch(P, "right", lams, v_plus, d_plus, "forward")

    chi_ry, chi_rd = propagate_batch(P, "right", lams, -sin_b, cos_b, "backward")
    v_minus = jb[0, 0] * chi_ry[0] + jb[0, 1] * chi_rd[0]
    d_minus = jb[1, 0] * chi_ry[0] + jb[1, 1] * chi_rd[0]
    chi_ly, chi_ld = propagate_batch(P, "left", lams, v_minus, d_minus, "backward")

    return SolutionBatch(lams=lams,
                         phi_left=(phi_ly, phi_ld), phi_right=(phi_ry, phi_rd),
                         chi_left=(chi_ly, chi_ld), chi_right=(chi_ry, chi_rd))


def _trace_from_batch(P, ys_left, dys_left, ys_right, dys_right, col) -> FullTrace:
    return FullTrace(P.nodes("left"), ys_left[:, col].copy(), dys_left[:, col].copy(),
                     P.nodes("right"), ys_right[:, col].copy(), dys_right[:, col].copy())


def left_solution(P: TwoIntervalProblem, lam: float) -> FullTrace:
    """The solution phi: satisfies the left boundary condition and both
    interface conditions by construction."""
    P.require_valid()
    batch = solve_batch(P, np.array([float(lam)]))
    return _trace_from_batch(P, *batch.phi_left, *batch.phi_right, 0)


def right_solution(P: TwoIntervalProblem, lam: float) -> FullTrace:
    """The solution chi: satisfies the right boundary condition and both
    interface conditions by construction."""
    P.require_valid()
    batch = solve_batch(P, np.array([float(lam)]))
    return _trace_from_batch(P, *batch.chi_left, *batch.chi_right, 0)


def wronskian(phi: FullTrace, chi: FullTrace, side: str, x: float) -> float:
    """phi(x) chi'(x) - phi'(x) chi(x) at a grid node of the given side."""
    xs, py, pd = phi.side_arrays(side)
    _, cy, cd = chi.side_arrays(side)
    if phi.left_y.shape != chi.left_y.shape:
        raise ValueError("traces sampled on different grids")
    h = xs[1] - xs[0]
    idx = int(round((float(x) - xs[0]) / h))
    if idx < 0 or idx >= xs.shape[0] or abs(float(x) - xs[idx]) > 1e-9:
        raise ValueError(f"x={x!r} is not a grid node of the {side} subinterval")
    return float(py[idx] * cd[idx] - pd[idx] * cy[idx])


@dataclass(frozen=True)
class CharacteristicValue:
    """Characteristic data at one lambda.

    ``omega1``/``omega2`` are the per-side Wronskians (median over the
    side's nodes, since the Wronskian is constant in x and the median damps
    accumulated integration error).  ``Omega = Delta34 * omega1`` and the
    consistency residual measures how well ``Delta34 w1 = Delta12 w2`` holds.
    """

    lam: float
    omega1: float
    omega2: float
    Omega: float
    consistency_residual: float


def _omega_medians(batch: SolutionBatch):
    ply, pld = batch.phi_left
    cly, cld = batch.chi_left
    w1 = np.median(ply * cld - pld * cly, axis=0)
    pry, prd = batch.phi_right
    cry, crd = batch.chi_right
    w2 = np.median(pry * crd - prd * cry, axis=0)
    return w1, w2


def characteristic_batch(P: TwoIntervalProblem, lams) -> "CharacteristicBatch":
    """Characteristic values on a whole lambda grid (chunked internally)."""
    P.require_valid()
    lams = np.asarray(lams, dtype=float)
    w1 = np.empty_like(lams)
    w2 = np.empty_like(lams)
    for start in range(0, lams.shape[0], BATCH_CHUNK):
        sl = slice(start, start + BATCH_CHUNK)
        batch = solve_batch(P, lams[sl])
        w1[sl], w2[sl] = _omega_medians(batch)
    d12, d34 = P.tmatrix.delta12, P.tmatrix.delta34
    Omega = d34 * w1
    residual = np.abs(Omega - d12 * w2) / np.maximum(1.0, np.abs(Omega))
    return CharacteristicBatch(lams=lams, omega1=w1, omega2=w2,
                               Omega=Omega, consistency_residual=residual)


@dataclass(frozen=True, eq=False)
class CharacteristicBatch:
    lams: np.ndarray
    omega1: np.ndarray
    omega2: np.ndarray
    Omega: np.ndarray
    consistency_residual: np.ndarray

    def __getitem__(self, i: int) -> CharacteristicValue:
        return CharacteristicValue(
            lam=float(self.lams[i]), omega1=float(self.omega1[i]),
            omega2=float(self.omega2[i]), Omega=float(self.Omega[i]),
            consistency_residual=float(self.consistency_residual[i]))


def characteristic(P: TwoIntervalProblem, lam: float) -> CharacteristicValue:
    """Characteristic value at one lambda; Omega(lambda)=0 marks eigenvalues."""
    return characteristic_batch(P, np.array([float(lam)]))[0]


def omega_batch(P: TwoIntervalProblem, lams) -> np.ndarray:
    """Omega = Delta34 * omega1 on a lambda grid.

    Skips the phi right half (not needed for omega1), which saves a quarter
    of the work during dense scans and bisection.
    """
    P.require_valid()
    lams = np.asarray(lams, dtype=float)
    sin_a, cos_a = math.sin(P.alpha), math.cos(P.alpha)
    sin_b, cos_b = math.sin(P.beta), math.cos(P.beta)
    jb = backward_jump(P.tmatrix)
    out = np.empty_like(lams)
    for start in range(0, lams.shape[0], BATCH_CHUNK):
        sl = slice(start, start + BATCH_CHUNK)
        part = lams[sl]
        ply, pld = propagate_batch(P, "left", part, sin_a, -cos_a, "forward")
        cry, crd = propagate_batch(P, "right", part, -sin_b, cos_b, "backward")
        v_minus = jb[0, 0] * cry[0] + jb[0, 1] * crd[0]
        d_minus = jb[1, 0] * cry[0] + jb[1, 1] * crd[0]
        cly, cld = propagate_batch(P, "left", part, v_minus, d_minus, "backward")
        out[sl] = np.median(ply * cld - pld * cly, axis=0)
    return P.tmatrix.delta34 * out


def omega(P: TwoIntervalProblem, lam: float) -> float:
    return float(omega_batch(P, np.array([float(lam)]))[0])
