"""Eigenfunction expansions: coefficients, partial sums, completeness checks.

The coefficient of f against the n-th normalized eigenfunction is the
weighted inner product c_n = (Delta34/p1) int_left f phi_n
+ (Delta12/p2) int_right f phi_n.  All integrals run through the same
composite Simpson rule on the solver grid, so coefficients, norms and the
Parseval gap share their quadrature error and the gap stays a clean
Bessel-type quantity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import green
from .expr import as_expression
from .model import (FullTrace, TwoIntervalProblem, btc_residuals, inner_product,
                    sample_expression)


@dataclass(frozen=True)
class CoefficientList:
    """Fourier coefficients of one function in the eigenbasis."""

    values: np.ndarray
    description: str
    grid_steps: int
    rule: str = "composite-simpson"

    def __len__(self):
        return self.values.shape[0]

    def __getitem__(self, i):
        return float(self.values[i])


def _coefficients_of_trace(P, spectrum, trace: FullTrace, N: int) -> np.ndarray:
    if N > len(spectrum):
        raise ValueError(f"N={N} exceeds the {len(spectrum)} available eigenpairs")
    return np.array([inner_product(P, trace, spectrum[n].eigenfunction)
                     for n in range(N)])


def _as_trace(P, f) -> tuple[FullTrace, str]:
    """Accept either an expression (string/Expression) or an already sampled trace."""
    if isinstance(f, FullTrace):
        return f, "<trace>"
    f = as_expression(f)
    return sample_expression(P, f), f.text


def fourier_coefficient(P: TwoIntervalProblem, spectrum, f, n: int) -> float:
    """c_n(f): weighted inner product of f with the n-th eigenfunction."""
    trace, _ = _as_trace(P, f)
    return float(_coefficients_of_trace(P, spectrum, trace, n + 1)[n])


def fourier_coefficients(P: TwoIntervalProblem, spectrum, f, N: int) -> CoefficientList:
    """c_0 .. c_{N-1} of f (f sampled once)."""
    trace, text = _as_trace(P, f)
    values = _coefficients_of_trace(P, spectrum, trace, N)
    return CoefficientList(values=values, description=text, grid_steps=P.grid_steps)


def partial_expansion(P: TwoIntervalProblem, spectrum, f, N: int) -> FullTrace:
    """The partial sum S_N = sum_{n<N} c_n(f) phi_n on the solver grid."""
    coeffs = fourier_coefficients(P, spectrum, f, N).values
    ul = np.zeros_like(P.nodes("left"))
    dul = np.zeros_like(ul)
    ur = np.zeros_like(P.nodes("right"))
    dur = np.zeros_like(ur)
    for c, e in zip(coeffs, spectrum.eigenpairs[:N]):
        tr = e.eigenfunction
        ul += c * tr.left_y
        dul += c * tr.left_dy
        ur += c * tr.right_y
        dur += c * tr.right_dy
    return FullTrace(P.nodes("left"), ul, dul, P.nodes("right"), ur, dur)


def parseval_gap(P: TwoIntervalProblem, spectrum, f, N: int) -> float:
    """<f, f>_w - sum_{n<N} c_n^2.

    Nonnegative up to quadrature tolerance (Bessel), nonincreasing in N,
    and tending to zero for admissible f (the completeness relation).
    """
    trace, _ = _as_trace(P, f)
    norm2 = inner_product(P, trace, trace)
    coeffs = _coefficients_of_trace(P, spectrum, trace, N)
    return float(norm2 - np.sum(coeffs * coeffs))


def mean_square_error(P: TwoIntervalProblem, spectrum, f, N: int) -> float:
    """<f - S_N, f - S_N>_w; agrees with parseval_gap up to quadrature error."""
    trace, _ = _as_trace(P, f)
    sn = partial_expansion(P, spectrum, f, N)
    diff = FullTrace(trace.left_x, trace.left_y - sn.left_y,
                     trace.left_dy - sn.left_dy,
                     trace.right_x, trace.right_y - sn.right_y,
                     trace.right_dy - sn.right_dy)
    return inner_product(P, diff, diff)


def coefficient_identity_check(P: TwoIntervalProblem, spectrum, f, lam: float,
                               N: int) -> float:
    """max_n |c_n(f) - (lambda_n - lambda) c_n(u)| / max(1, |c_n(f)|).

    u is the quadrature resolvent of f at lambda; the identity holds because
    u satisfies -p u'' + (q - lambda) u = f and each eigenfunction is an
    eigenvector of the same operator.
    """
    trace, _ = _as_trace(P, f)
    u = green.resolvent_quadrature(P, lam, trace)
    cf = _coefficients_of_trace(P, spectrum, trace, N)
    cu = _coefficients_of_trace(P, spectrum, u, N)
    lams = np.array([e.lambda_n for e in spectrum.eigenpairs[:N]])
    err = np.abs(cf - (lams - lam) * cu) / np.maximum(1.0, np.abs(cf))
    return float(np.max(err)) if err.shape[0] else 0.0


def check_btc(P: TwoIntervalProblem, f: FullTrace) -> tuple[float, float, float, float]:
    """Residuals of both boundary conditions and both interface conditions.

    Derivative data comes from the trace itself (finite differences for
    traces sampled from expressions, exact values for integrated ones).
    """
    return btc_residuals(P, f)
