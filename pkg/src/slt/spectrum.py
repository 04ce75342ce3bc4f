"""Eigenvalue search: bracketing scans, bisection, normalization, zero shift.

Eigenvalues are the real zeros of the characteristic function Omega.  The
scan grid is uniform in s = sqrt(lambda) above zero (the asymptotic gap
between consecutive s values is 1/2, so a spacing of 1/8 oversamples it
fourfold) and uniform in lambda below zero, where only finitely many
eigenvalues can exist for bounded q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import shoot
from .errors import ScanExhaustedError, SLTError
from .expr import shifted_by
from .model import (FullTrace, TwoIntervalProblem, btc_residuals, inner_product,
                    ode_residual)

S_SCAN_SPACING = 0.125
NEGATIVE_SCAN_STEP = 0.25
REFINE_TOL = 1e-10
TRIVIAL_NORM = 1e-12
ZERO_EIGENVALUE_RTOL = 1e-8
TANGENTIAL_RTOL = 1e-6


@dataclass(frozen=True)
class ResidualSummary:
    """Residual diagnostics of a normalized eigenfunction."""

    omega: float
    boundary_left: float
    boundary_right: float
    interface_1: float
    interface_2: float
    ode: float

    @property
    def btc_max(self) -> float:
        return max(abs(self.boundary_left), abs(self.boundary_right),
                   abs(self.interface_1), abs(self.interface_2))


@dataclass(frozen=True, eq=False)
class Eigenpair:
    n: int
    lambda_n: float
    s_n: float | None
    eigenfunction: FullTrace
    norm_constant: float
    residuals: ResidualSummary


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ordered eigenpairs plus the spectral shift used to solve them.

    When ``shift`` is nonzero the internal root search ran on the problem
    with potential ``q - shift`` (whose spectrum avoids zero); the reported
    ``lambda_n`` are already translated back to the original problem.
    """

    eigenpairs: list
    shift: float = 0.0
    lambda_lo: float = 0.0
    lambda_hi: float = 0.0
    brackets_found: int = 0
    warnings: list = field(default_factory=list)

    def __len__(self):
        return len(self.eigenpairs)

    def __iter__(self):
        return iter(self.eigenpairs)

    def __getitem__(self, i) -> Eigenpair:
        return self.eigenpairs[i]

    def eigenvalues(self) -> np.ndarray:
        return np.array([e.lambda_n for e in self.eigenpairs])

    def to_json_dict(self) -> dict:
        return {
            "shift": self.shift,
            "eigenvalues": [
                {
                    "n": e.n,
                    "lambda": e.lambda_n,
                    "s": e.s_n,
                    "norm_constant": e.norm_constant,
                    "omega_residual": e.residuals.omega,
                    "btc_residual": e.residuals.btc_max,
                }
                for e in self.eigenpairs
            ],
        }

    def to_csv_rows(self) -> list:
        rows = ["n,lambda,s,norm_constant"]
        for e in self.eigenpairs:
            s = repr(e.s_n) if e.s_n is not None else ""
            rows.append(f"{e.n},{e.lambda_n!r},{s},{e.norm_constant!r}")
        return rows


def asymptotic_s(P: TwoIntervalProblem, n: int) -> float:
    """Leading term of s_n = sqrt(lambda_n) for the n-th eigenvalue (n >= 1).

    (n-1)/2 when neither boundary condition is of Dirichlet type
    (sin alpha != 0 and sin beta != 0), n/2 in the other three cases.
    """
    if n < 1:
        raise ValueError("asymptotic index starts at 1")
    if abs(math.sin(P.alpha)) > 1e-14 and abs(math.sin(P.beta)) > 1e-14:
        return (n - 1) / 2.0
    return n / 2.0


@dataclass(frozen=True)
class ScanResult:
    """Sign-change brackets plus suspected tangential zeros from one scan."""

    brackets: list
    suspects: list


def scan_brackets(P: TwoIntervalProblem, lambda_lo: float, lambda_hi: float,
                  points: int = 2) -> ScanResult:
    """Evaluate Omega on a scan grid and collect sign-change brackets.

    ``points`` is a lower bound on the positive-side grid size; the spacing
    rules (1/8 in s above zero, 1/4 in lambda below) always apply.  Interior
    near-zero local minima of |Omega| without a sign change are flagged as
    suspected tangential zeros.
    """
    P.require_valid()
    if not lambda_lo < lambda_hi:
        raise ValueError("need lambda_lo < lambda_hi")
    if points < 2:
        raise ValueError("need points >= 2")
    lams = _scan_grid(lambda_lo, lambda_hi, points)
    om = shoot.omega_batch(P, lams)

    brackets = []
    prod = om[:-1] * om[1:]
    for i in np.nonzero(prod < 0.0)[0]:
        brackets.append((float(lams[i]), float(lams[i + 1])))
    for i in np.nonzero(om == 0.0)[0]:
        a = float(lams[i - 1]) if i > 0 else float(lams[i])
        b = float(lams[i + 1]) if i + 1 < lams.shape[0] else float(lams[i])
        brackets.append((a, b))
    brackets.sort()

    suspects = []
    absom = np.abs(om)
    for i in range(1, lams.shape[0] - 1):
        if prod[i - 1] < 0.0 or prod[i] < 0.0 or om[i] == 0.0:
            continue
        if absom[i] < absom[i - 1] and absom[i] < absom[i + 1]:
            local = max(absom[i - 1], absom[i + 1])
            if absom[i] <= TANGENTIAL_RTOL * local:
                suspects.append((float(lams[i]), float(om[i])))
    return ScanResult(brackets=brackets, suspects=suspects)


def _scan_grid(lambda_lo: float, lambda_hi: float, points: int) -> np.ndarray:
    parts = []
    if lambda_lo < 0.0:
        span = min(lambda_hi, 0.0) - lambda_lo
        m = max(2, int(math.ceil(span / NEGATIVE_SCAN_STEP)))
        if lambda_hi <= 0.0:
            parts.append(np.linspace(lambda_lo, lambda_hi, m + 1))
        else:
            parts.append(np.linspace(lambda_lo, 0.0, m, endpoint=False))
    if lambda_hi > 0.0:
        s_lo = math.sqrt(max(lambda_lo, 0.0))
        s_hi = math.sqrt(lambda_hi)
        ns = max(points, int(math.ceil((s_hi - s_lo) / S_SCAN_SPACING)) + 1)
        parts.append(np.linspace(s_lo, s_hi, ns) ** 2)
    return np.concatenate(parts)


def refine_eigenvalue(P: TwoIntervalProblem, bracket, tol: float = REFINE_TOL) -> float:
    """Bisect one sign-change bracket down to width tol * max(1, |lambda|)."""
    return float(refine_brackets(P, [bracket], tol)[0])


def refine_brackets(P: TwoIntervalProblem, brackets, tol: float = REFINE_TOL) -> np.ndarray:
    """Vectorised bisection over many brackets at once."""
    P.require_valid()
    a = np.array([br[0] for br in brackets], dtype=float)
    b = np.array([br[1] for br in brackets], dtype=float)
    if a.shape[0] == 0:
        return np.empty(0)
    fa = shoot.omega_batch(P, a)
    fb = shoot.omega_batch(P, b)
    done = np.zeros(a.shape[0], dtype=bool)
    root = np.empty_like(a)
    exact_a = fa == 0.0
    root[exact_a] = a[exact_a]
    done |= exact_a
    exact_b = fb == 0.0
    root[exact_b] = b[exact_b]
    done |= exact_b
    bad = ~done & (fa * fb > 0.0)
    if bad.any():
        i = int(np.nonzero(bad)[0][0])
        raise ValueError(f"Omega does not change sign on bracket ({a[i]!r}, {b[i]!r})")

    for _ in range(200):
        active = ~done
        if not active.any():
            break
        mid = 0.5 * (a + b)
        fm = np.zeros_like(a)
        fm[active] = shoot.omega_batch(P, mid[active])
        go_left = active & (fa * fm <= 0.0)
        go_right = active & ~go_left
        b[go_left] = mid[go_left]
        a[go_right] = mid[go_right]
        fa[go_right] = fm[go_right]
        width_ok = active & ((b - a) <= tol * np.maximum(1.0, np.abs(mid)))
        root[width_ok] = 0.5 * (a[width_ok] + b[width_ok])
        done |= width_ok
    if not done.all():
        raise SLTError("bisection failed to converge")
    return root


# ---------------------------------------------------------------------------
# Normalization

def _eigenpairs_from_roots(P: TwoIntervalProblem, work: TwoIntervalProblem,
                           mus: np.ndarray, shift: float, start_index: int = 0):
    """Normalized eigenpairs for internal roots ``mus`` of ``work``.

    ``P`` is the original problem (used for reporting and residuals); the
    eigenfunction traces are identical for both since the equations agree.
    """
    pairs = []
    chunk = shoot.BATCH_CHUNK
    d34 = work.tmatrix.delta34
    for s0 in range(0, mus.shape[0], chunk):
        part = mus[s0:s0 + chunk]
        batch = shoot.solve_batch(work, part)
        ply, pld = batch.phi_left
        cly, cld = batch.chi_left
        w1 = np.median(ply * cld - pld * cly, axis=0)
        for col in range(part.shape[0]):
            mu = float(part[col])
            lam = mu + shift
            trace = shoot._trace_from_batch(work, *batch.phi_left, *batch.phi_right, col)
            norm2 = inner_product(P, trace, trace)
            if norm2 < TRIVIAL_NORM ** 2 or not norm2 > 0:
                raise SLTError(
                    f"trivial eigenfunction at lambda={lam!r}: spurious root")
            norm = math.sqrt(norm2)
            normalized = trace.scaled(1.0 / norm)
            btc = btc_residuals(P, normalized)
            res = ResidualSummary(
                omega=abs(float(d34 * w1[col])),
                boundary_left=btc[0], boundary_right=btc[1],
                interface_1=btc[2], interface_2=btc[3],
                ode=ode_residual(P, normalized, lam),
            )
            s_n = math.sqrt(lam) if lam >= 0.0 else None
            pairs.append(Eigenpair(
                n=start_index + s0 + col, lambda_n=lam, s_n=s_n,
                eigenfunction=normalized, norm_constant=norm, residuals=res))
    return pairs


def normalize_eigenfunction(P: TwoIntervalProblem, lambda_n: float,
                            index: int = 0) -> Eigenpair:
    """Normalize phi(. , lambda_n) to unit weighted norm.

    ``lambda_n`` must actually be (numerically) an eigenvalue: |Omega| is
    checked against a loose multiple of the refinement tolerance.
    """
    P.require_valid()
    om = abs(shoot.omega(P, lambda_n))
    if om > 1e-5 * max(1.0, abs(lambda_n)):
        raise SLTError(
            f"lambda={lambda_n!r} is not an eigenvalue (|Omega|={om:.3e})")
    return _eigenpairs_from_roots(P, P, np.array([float(lambda_n)]), 0.0, index)[0]


# ---------------------------------------------------------------------------
# Full spectrum

def compute_spectrum(P: TwoIntervalProblem, count: int) -> Spectrum:
    """Locate, refine and normalize the lowest ``count`` eigenvalues.

    If lambda=0 sits on the spectrum the search runs on the problem with
    potential shifted by half the distance to the nearest other root, and
    the reported eigenvalues are translated back.
    """
    P.require_valid()
    if count < 1:
        raise ValueError("count must be >= 1")

    shift = _required_shift(P, count)
    if shift != 0.0:
        work = _shifted_problem(P, shift)
    else:
        work = P

    lam_lo = -work.max_abs_q() - 10.0
    s_hi = asymptotic_s(P, count) + 2.0 + abs(shift)
    warnings = []
    roots = None
    n_brackets = 0
    for _ in range(9):
        scan = scan_brackets(work, lam_lo, s_hi * s_hi, points=2)
        if len(scan.brackets) >= count:
            refined = refine_brackets(work, scan.brackets[:count + 2])
            roots = _dedupe(np.sort(refined))
            if roots.shape[0] >= count:
                roots = roots[:count]
                n_brackets = len(scan.brackets)
                warnings.extend(
                    f"suspected tangential zero near lambda={lam + shift!r} "
                    f"(|Omega|={abs(om):.3e})"
                    for lam, om in scan.suspects)
                break
            roots = None
        s_hi *= 1.6
    if roots is None:
        raise ScanExhaustedError(
            f"found fewer than {count} eigenvalues up to lambda={s_hi * s_hi!r}")

    if shift != 0.0 and np.any(np.abs(roots) <= ZERO_EIGENVALUE_RTOL):
        raise SLTError("shifted problem still has an eigenvalue at zero")

    pairs = _eigenpairs_from_roots(P, work, roots, shift)
    return Spectrum(eigenpairs=pairs, shift=shift, lambda_lo=lam_lo,
                    lambda_hi=s_hi * s_hi, brackets_found=n_brackets,
                    warnings=warnings)


def _dedupe(roots: np.ndarray) -> np.ndarray:
    if roots.shape[0] < 2:
        return roots
    keep = [roots[0]]
    for r in roots[1:]:
        if r - keep[-1] > 1e-9 * max(1.0, abs(r)):
            keep.append(r)
    return np.array(keep)


def _required_shift(P: TwoIntervalProblem, count: int) -> float:
    probe = shoot.omega_batch(P, np.array([-0.5, 0.0, 0.5]))
    scale = max(1.0, abs(probe[0]), abs(probe[2]))
    if abs(probe[1]) >= ZERO_EIGENVALUE_RTOL * scale:
        return 0.0
    lam_lo = -P.max_abs_q() - 10.0
    hi = max(9.0, (asymptotic_s(P, min(count, 4)) + 2.0) ** 2)
    for _ in range(4):
        scan = scan_brackets(P, lam_lo, hi, points=2)
        if scan.brackets:
            roots = refine_brackets(P, scan.brackets, tol=1e-8)
            nonzero = roots[np.abs(roots) > 1e-6]
            if nonzero.shape[0]:
                nearest = float(nonzero[np.argmin(np.abs(nonzero))])
                return abs(nearest) / 2.0
        hi *= 4.0
    raise ScanExhaustedError("could not locate a neighbouring root to size the shift")


def _shifted_problem(P: TwoIntervalProblem, shift: float) -> TwoIntervalProblem:
    return TwoIntervalProblem(
        p1=P.p1, p2=P.p2, alpha=P.alpha, beta=P.beta,
        q_left=shifted_by(P.q_left, shift), q_right=shifted_by(P.q_right, shift),
        tmatrix=P.tmatrix, grid_steps=P.grid_steps)
