"""Green kernel, resolvent application, and their eigenfunction series.

The kernel is the single symmetric formula

    G(x, xi; lambda) = phi(min(x, xi)) * chi(max(x, xi)) / Omega(lambda)

with phi, chi the glued shooting solutions and Omega = Delta34 w1.  Applied
through the weighted quadrature with a leading minus sign,

    u = -[ (Delta34/p1) int_left G f + (Delta12/p2) int_right G f ],

the result satisfies -p u'' + (q - lambda) u = f together with all four
boundary and interface conditions.  The interface point is excluded from
the kernel's argument domain; callers must pick a side for x = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import shoot
from .errors import NearEigenvalueError, SLTError
from .expr import as_expression
from .model import FullTrace, TwoIntervalProblem, cumulative_quadrature

EIGEN_GUARD_RTOL = 1e-8


def _solution_pair(P: TwoIntervalProblem, lam: float):
    """phi, chi and Omega at one lambda, cached on the problem instance."""
    key = ("green_pair", float(lam))
    if key not in P._cache:
        P.require_valid()
        batch = shoot.solve_batch(P, np.array([float(lam)]))
        phi = shoot._trace_from_batch(P, *batch.phi_left, *batch.phi_right, 0)
        chi = shoot._trace_from_batch(P, *batch.chi_left, *batch.chi_right, 0)
        ply, pld = batch.phi_left
        cly, cld = batch.chi_left
        om = P.tmatrix.delta34 * float(np.median(ply[:, 0] * cld[:, 0]
                                                 - pld[:, 0] * cly[:, 0]))
        P._cache[key] = (phi, chi, om)
    return P._cache[key]


def _guard_off_spectrum(lam: float, om: float):
    if abs(om) <= EIGEN_GUARD_RTOL * max(1.0, abs(lam)):
        raise NearEigenvalueError(
            f"lambda={lam!r} is within tolerance of an eigenvalue "
            f"(|Omega|={abs(om):.3e})")


def _resolve_point(x: float, side: str | None, name: str):
    x = float(x)
    if x < -math.pi - 1e-12 or x > math.pi + 1e-12:
        raise ValueError(f"{name}={x!r} outside [-pi, pi]")
    if x == 0.0:
        if side not in ("left", "right"):
            raise ValueError(f"{name}=0 is two-sided; pass {name}_side='left' or 'right'")
    elif side is None:
        side = "left" if x < 0.0 else "right"
    elif (x < 0.0 and side != "left") or (x > 0.0 and side != "right"):
        raise ValueError(f"{name}={x!r} is not on the {side} subinterval")
    # ordering key: 0- sorts below 0+
    return x, side, (x, 0 if side == "left" else 1)


@dataclass(frozen=True)
class KernelEvaluation:
    """One kernel value with the min/max branch that produced it."""

    x: float
    xi: float
    lam: float
    value: float
    branch: str


def evaluate_kernel(P: TwoIntervalProblem, lam: float, x: float, xi: float,
                    x_side: str | None = None, xi_side: str | None = None) -> KernelEvaluation:
    x, x_side, xk = _resolve_point(x, x_side, "x")
    xi, xi_side, xik = _resolve_point(xi, xi_side, "xi")
    phi, chi, om = _solution_pair(P, lam)
    _guard_off_spectrum(lam, om)
    if xk <= xik:
        value = phi.value_at(x, x_side) * chi.value_at(xi, xi_side) / om
        branch = "phi(x)*chi(xi)"
    else:
        value = phi.value_at(xi, xi_side) * chi.value_at(x, x_side) / om
        branch = "phi(xi)*chi(x)"
    return KernelEvaluation(x=x, xi=xi, lam=float(lam), value=float(value), branch=branch)


def green_eval(P: TwoIntervalProblem, lam: float, x: float, xi: float,
               x_side: str | None = None, xi_side: str | None = None) -> float:
    """G(x, xi; lambda); lambda must be off the spectrum."""
    return evaluate_kernel(P, lam, x, xi, x_side, xi_side).value


def _f_node_values(P, f):
    """Right-hand-side samples on both grids from an expression or a trace."""
    if isinstance(f, FullTrace):
        return f.left_y, f.right_y
    f = as_expression(f)
    return f(P.nodes("left")), f(P.nodes("right"))


def resolvent_quadrature(P: TwoIntervalProblem, lam: float, f) -> FullTrace:
    """Apply the resolvent to f by weighted quadrature of the kernel.

    Returns u on the solver grid with u' filled from the exact
    variation-of-parameters identity u' = -(chi' A + phi' B)/Omega, where A
    and B are the running weighted integrals of phi f and chi f.
    """
    P.require_valid()
    phi, chi, om = _solution_pair(P, lam)
    _guard_off_spectrum(lam, om)
    h = P.step
    wl, wr = P.weight_left, P.weight_right

    fl, fr = _f_node_values(P, f)
    cum_a_left = cumulative_quadrature(wl * phi.left_y * fl, h)
    cum_a_right = cumulative_quadrature(wr * phi.right_y * fr, h)
    cum_b_left = cumulative_quadrature(wl * chi.left_y * fl, h)
    cum_b_right = cumulative_quadrature(wr * chi.right_y * fr, h)

    # A(x): integral of w phi f over xi <= x;  B(x): over xi >= x
    a_left = cum_a_left
    a_right = cum_a_left[-1] + cum_a_right
    b_right = cum_b_right[-1] - cum_b_right
    b_left = (cum_b_left[-1] - cum_b_left) + b_right[0]

    ul = -(chi.left_y * a_left + phi.left_y * b_left) / om
    dul = -(chi.left_dy * a_left + phi.left_dy * b_left) / om
    ur = -(chi.right_y * a_right + phi.right_y * b_right) / om
    dur = -(chi.right_dy * a_right + phi.right_dy * b_right) / om
    return FullTrace(P.nodes("left"), ul, dul, P.nodes("right"), ur, dur)


def green_series(P: TwoIntervalProblem, spectrum, N: int, x: float, xi: float,
                 x_side: str | None = None, xi_side: str | None = None) -> float:
    """N-term truncation of the bilinear series -sum phi_n(x) phi_n(xi)/lambda_n.

    Converges to G(x, xi; 0); requires a spectrum computed without a shift
    (otherwise lambda=0 sits on the spectrum and the series is undefined).
    """
    if spectrum.shift != 0.0:
        raise SLTError("bilinear series needs shift=0 (lambda=0 off the spectrum)")
    if N > len(spectrum):
        raise ValueError(f"N={N} exceeds the {len(spectrum)} available eigenpairs")
    x, x_side, _ = _resolve_point(x, x_side, "x")
    xi, xi_side, _ = _resolve_point(xi, xi_side, "xi")
    total = 0.0
    for e in spectrum.eigenpairs[:N]:
        total -= (e.eigenfunction.value_at(x, x_side)
                  * e.eigenfunction.value_at(xi, xi_side)) / e.lambda_n
    return total


def resolvent_series(P: TwoIntervalProblem, spectrum, f, lam: float, N: int) -> FullTrace:
    """Spectral form of the resolvent: sum c_n(f) phi_n / (lambda_n - lambda).

    The sign of the denominator matches the quadrature resolvent's contract
    -p u'' + (q - lambda) u = f.
    """
    from .expansion import fourier_coefficients

    if N > len(spectrum):
        raise ValueError(f"N={N} exceeds the {len(spectrum)} available eigenpairs")
    lam = float(lam)
    for e in spectrum.eigenpairs[:N]:
        if abs(lam - e.lambda_n) <= EIGEN_GUARD_RTOL * max(1.0, abs(lam)):
            raise NearEigenvalueError(
                f"lambda={lam!r} is within tolerance of eigenvalue n={e.n}")
    coeffs = fourier_coefficients(P, spectrum, f, N).values
    ul = np.zeros_like(P.nodes("left"))
    dul = np.zeros_like(ul)
    ur = np.zeros_like(P.nodes("right"))
    dur = np.zeros_like(ur)
    for e, c in zip(spectrum.eigenpairs[:N], coeffs):
        factor = c / (e.lambda_n - lam)
        tr = e.eigenfunction
        ul += factor * tr.left_y
        dul += factor * tr.left_dy
        ur += factor * tr.right_y
        dur += factor * tr.right_dy
    return FullTrace(P.nodes("left"), ul, dul, P.nodes("right"), ur, dur)
