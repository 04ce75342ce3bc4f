"""Property suite behind ``slt verify``: one pass/fail line per invariant.

Each check returns (name, passed, detail); the CLI prints them and maps
"all passed" to exit code 0.  Checks are deterministic (fixed seeds, fixed
summation orders), so repeated runs produce byte-identical reports.
"""

from __future__ import annotations

import numpy as np

from . import expansion, green, shoot
from .fixtures import by_name
from .model import inner_product, ode_residual, sample_expression
from .spectrum import asymptotic_s, compute_spectrum

WRONSKIAN_ID_TOL = 1e-8
WRONSKIAN_X_TOL = 1e-7
CONSTRUCTION_BTC_TOL = 1e-12
GRAM_TOL = 1e-6
EIGEN_ODE_RTOL = 1e-5
EIGEN_BTC_TOL = 1e-8
RESOLVENT_ODE_RTOL = 1e-4
RESOLVENT_BTC_TOL = 1e-6
BESSEL_SLACK = 1e-8
IDEMPOTENCE_TOL = 1e-6
COEFF_IDENTITY_TOL = 1e-4


def midgap_lambdas(spec, count: int = 5):
    """lambda values centred between consecutive eigenvalues (off-spectrum)."""
    lams = spec.eigenvalues()
    mids = 0.5 * (lams[:-1] + lams[1:])
    return [float(v) for v in mids[:count]]


def _check_wronskian_identity(P):
    grid = np.linspace(-5.0, 25.0, 50)
    batch = shoot.characteristic_batch(P, grid)
    worst = float(np.max(batch.consistency_residual))
    return worst <= WRONSKIAN_ID_TOL, f"max consistency residual {worst:.3e}"


def _check_wronskian_x_independence(P):
    rng = np.random.default_rng(7)
    worst = 0.0
    for lam in (0.7, 3.3, 17.1):
        phi = shoot.left_solution(P, lam)
        chi = shoot.right_solution(P, lam)
        for side in ("left", "right"):
            xs, py, pd = phi.side_arrays(side)
            _, cy, cd = chi.side_arrays(side)
            w = py * cd - pd * cy
            med = float(np.median(w))
            nodes = rng.integers(0, xs.shape[0], size=20)
            dev = float(np.max(np.abs(w[nodes] - med))) / max(1.0, abs(med))
            worst = max(worst, dev)
    return worst <= WRONSKIAN_X_TOL, f"max deviation from median {worst:.3e}"


def _check_construction_residuals(P):
    from .model import btc_residuals

    worst = 0.0
    for lam in (0.7, 3.3, 17.1):
        phi = shoot.left_solution(P, lam)
        chi = shoot.right_solution(P, lam)
        scale = max(1.0, phi.max_abs())
        r = btc_residuals(P, phi)
        worst = max(worst, abs(r[0]) / scale, abs(r[2]) / scale, abs(r[3]) / scale)
        scale = max(1.0, chi.max_abs())
        r = btc_residuals(P, chi)
        worst = max(worst, abs(r[1]) / scale, abs(r[2]) / scale, abs(r[3]) / scale)
    return worst <= CONSTRUCTION_BTC_TOL, f"max construction residual {worst:.3e}"


def _check_orthonormality(P, spec):
    n = min(8, len(spec))
    gram = np.array([[inner_product(P, spec[i].eigenfunction, spec[j].eigenfunction)
                      for j in range(n)] for i in range(n)])
    worst = float(np.max(np.abs(gram - np.eye(n))))
    return worst <= GRAM_TOL, f"max Gram deviation {worst:.3e}"


def _check_eigen_residuals(P, spec):
    worst_ode, worst_btc = 0.0, 0.0
    for e in spec.eigenpairs[:8]:
        worst_ode = max(worst_ode, e.residuals.ode / e.eigenfunction.max_abs())
        worst_btc = max(worst_btc, e.residuals.btc_max)
    ok = worst_ode <= EIGEN_ODE_RTOL and worst_btc <= EIGEN_BTC_TOL
    return ok, f"ode {worst_ode:.3e}, btc {worst_btc:.3e}"


def _check_resolvent_contract(P, spec):
    f = "1"
    f_trace = sample_expression(P, f)
    f_sup = f_trace.max_abs()
    worst_ode, worst_btc = 0.0, 0.0
    for lam in midgap_lambdas(spec, 5):
        u = green.resolvent_quadrature(P, lam, f)
        worst_ode = max(worst_ode, ode_residual(P, u, lam, f_trace))
        worst_btc = max(worst_btc, max(abs(r) for r in expansion.check_btc(P, u)))
    ok = worst_ode <= RESOLVENT_ODE_RTOL * f_sup and worst_btc <= RESOLVENT_BTC_TOL
    return ok, f"ode {worst_ode:.3e}, btc {worst_btc:.3e}"


def _check_parseval_monotone(P, spec):
    details = []
    ok = True
    for f in ("pi^2-x^2", "sign(x)"):
        trace = sample_expression(P, f)
        norm2 = inner_product(P, trace, trace)
        gaps = [expansion.parseval_gap(P, spec, trace, N) for N in (2, 4, 6, 8)]
        monotone = all(g2 <= g1 + 1e-12 for g1, g2 in zip(gaps, gaps[1:]))
        nonneg = all(g >= -BESSEL_SLACK * norm2 for g in gaps)
        ok = ok and monotone and nonneg
        details.append(f"{f}: gap(8)={gaps[-1]:.3e}")
    return ok, "; ".join(details)


def _check_idempotence(P, spec):
    target = spec[2].eigenfunction
    sn = expansion.partial_expansion(P, spec, target, 8)
    err = max(float(np.max(np.abs(sn.left_y - target.left_y))),
              float(np.max(np.abs(sn.right_y - target.right_y))))
    return err <= IDEMPOTENCE_TOL, f"sup error {err:.3e}"


def _check_coefficient_identity(P, spec):
    lam = midgap_lambdas(spec, 2)[-1]
    err = expansion.coefficient_identity_check(P, spec, "pi^2-x^2", lam, 8)
    return err <= COEFF_IDENTITY_TOL, f"max relative error {err:.3e}"


def _check_asymptotic_law(P, spec):
    worst = 0.0
    for k, e in enumerate(spec.eigenpairs, start=1):
        if e.s_n is None:
            continue
        worst = max(worst, k * abs(e.s_n - asymptotic_s(P, k)))
    return worst <= 1.0, f"max n*|s_n - predicted| = {worst:.3e}"


def _check_count_consistency(P, spec):
    lams = spec.eigenvalues()
    ok = True
    details = []
    for S in (2.0, 5.0, 10.0):
        found = int(np.sum((lams >= 0.0) & (lams <= S * S)))
        predicted = int(2 * S)
        ok = ok and abs(found - predicted) <= 1
        details.append(f"S={S:g}: {found} vs {predicted}")
    return ok, "; ".join(details)


def run_fixture_suite(name: str, grid_steps: int = 2048):
    """Run every property check on one fixture; returns (name, ok, detail) rows."""
    P = by_name(name, grid_steps)
    deep = 20 if name == "c0" else 8
    spec = compute_spectrum(P, deep)
    checks = [
        ("wronskian-identity", _check_wronskian_identity, (P,)),
        ("wronskian-x-independence", _check_wronskian_x_independence, (P,)),
        ("construction-btc-residuals", _check_construction_residuals, (P,)),
        ("orthonormality", _check_orthonormality, (P, spec)),
        ("eigenfunction-residuals", _check_eigen_residuals, (P, spec)),
        ("resolvent-contract", _check_resolvent_contract, (P, spec)),
        ("parseval-gap-monotone", _check_parseval_monotone, (P, spec)),
        ("expansion-idempotence", _check_idempotence, (P, spec)),
        ("coefficient-identity", _check_coefficient_identity, (P, spec)),
    ]
    if name == "c0":
        checks.append(("asymptotic-law", _check_asymptotic_law, (P, spec)))
        checks.append(("count-consistency", _check_count_consistency, (P, spec)))
    results = []
    for label, fn, args in checks:
        try:
            ok, detail = fn(*args)
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append((f"{name}.{label}", ok, detail))
    return results
