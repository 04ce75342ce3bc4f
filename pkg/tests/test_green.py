import math

import numpy as np
import pytest

from slt.errors import NearEigenvalueError, SLTError
from slt.green import (evaluate_kernel, green_eval, green_series,
                       resolvent_quadrature, resolvent_series)
from slt.model import (btc_residuals, ode_residual, problem,
                       sample_expression)
from slt.spectrum import compute_spectrum
from slt.verify import midgap_lambdas

HALF_PI = math.pi / 2


def classical_kernel(x, xi):
    # phi = -(x+pi), chi = x-pi, Omega = -2 pi at lambda = 0
    lo, hi = min(x, xi), max(x, xi)
    return (-(lo + math.pi)) * (hi - math.pi) / (-2.0 * math.pi)


class TestKernel:
    def test_value_at_interface(self, c0_problem):
        g = green_eval(c0_problem, 0.0, 0.0, 0.0, x_side="left", xi_side="left")
        assert g == pytest.approx(-HALF_PI, abs=1e-6)

    def test_vanishes_on_dirichlet_boundary(self, c0_problem):
        for xi in (-2.0, -0.3, 1.1, 3.0):
            assert green_eval(c0_problem, 0.0, -math.pi, xi) == pytest.approx(0.0, abs=1e-12)

    def test_symmetry_is_exact(self, c0_problem):
        for x, xi in [(-1.0, 2.0), (-2.5, -0.5), (0.7, 2.9)]:
            assert green_eval(c0_problem, 0.0, x, xi) == green_eval(c0_problem, 0.0, xi, x)

    def test_matches_closed_form_off_grid(self, c0_problem):
        rng = np.random.default_rng(3)
        pts = rng.uniform(-math.pi, math.pi, size=(25, 2))
        for x, xi in pts:
            if x == 0.0 or xi == 0.0:
                continue
            got = green_eval(c0_problem, 0.0, float(x), float(xi))
            assert got == pytest.approx(classical_kernel(x, xi), abs=1e-8)

    def test_branch_reported(self, c0_problem):
        ev = evaluate_kernel(c0_problem, 0.0, -1.0, 2.0)
        assert ev.branch == "phi(x)*chi(xi)"
        ev = evaluate_kernel(c0_problem, 0.0, 2.0, -1.0)
        assert ev.branch == "phi(xi)*chi(x)"

    def test_interface_needs_side(self, c0_problem):
        with pytest.raises(ValueError, match="two-sided"):
            green_eval(c0_problem, 0.0, 0.0, 1.0)
        with pytest.raises(ValueError, match="two-sided"):
            green_eval(c0_problem, 0.0, 1.0, 0.0)

    def test_side_consistency_enforced(self, c0_problem):
        with pytest.raises(ValueError, match="subinterval"):
            green_eval(c0_problem, 0.0, -1.0, 1.0, x_side="right")

    def test_near_eigenvalue_rejected(self, c0_problem):
        with pytest.raises(NearEigenvalueError, match="within tolerance of an eigenvalue"):
            green_eval(c0_problem, 0.25, -1.0, 1.0)

    def test_zero_minus_below_zero_plus(self, c1_problem):
        # on the jump fixture the two interface samples differ
        left = green_eval(c1_problem, 0.0, 0.0, 2.0, x_side="left")
        right = green_eval(c1_problem, 0.0, 0.0, 2.0, x_side="right")
        assert right == pytest.approx(2.0 * left, rel=1e-9)


class TestResolventQuadrature:
    def test_classical_closed_form(self, c0_problem):
        u = resolvent_quadrature(c0_problem, 0.0, "1")
        exact_l = (math.pi ** 2 - u.left_x ** 2) / 2.0
        exact_r = (math.pi ** 2 - u.right_x ** 2) / 2.0
        assert np.max(np.abs(u.left_y - exact_l)) < 1e-5
        assert np.max(np.abs(u.right_y - exact_r)) < 1e-5

    def test_boundary_values(self, c0_problem):
        u = resolvent_quadrature(c0_problem, 0.0, "1")
        assert abs(u.left_y[0]) < 1e-9
        assert abs(u.right_y[-1]) < 1e-9

    def test_diagonal_action(self, c0_problem):
        u = resolvent_quadrature(c0_problem, 10.3, "sin(x+pi)")
        expect_l = np.sin(u.left_x + math.pi) / (1.0 - 10.3)
        expect_r = np.sin(u.right_x + math.pi) / (1.0 - 10.3)
        assert np.max(np.abs(u.left_y - expect_l)) < 1e-5
        assert np.max(np.abs(u.right_y - expect_r)) < 1e-5

    def test_diagonal_action_on_eigentrace(self, c2_problem, c2_spec8):
        e = c2_spec8[3]
        lam = midgap_lambdas(c2_spec8, 5)[4]
        u = resolvent_quadrature(c2_problem, lam, e.eigenfunction)
        factor = 1.0 / (e.lambda_n - lam)
        assert np.max(np.abs(u.left_y - factor * e.eigenfunction.left_y)) < 1e-5 * abs(factor)
        assert np.max(np.abs(u.right_y - factor * e.eigenfunction.right_y)) < 1e-5 * abs(factor)

    @pytest.mark.parametrize("fixture", ["c0", "c1", "c2"])
    def test_ode_and_btc_residuals(self, fixture, request):
        P = request.getfixturevalue(f"{fixture}_problem")
        spec = request.getfixturevalue(f"{fixture}_spec8")
        f_trace = sample_expression(P, "1")
        for lam in midgap_lambdas(spec, 5):
            u = resolvent_quadrature(P, lam, "1")
            assert ode_residual(P, u, lam, f_trace) <= 1e-4
            assert max(abs(r) for r in btc_residuals(P, u)) <= 1e-6

    def test_near_eigenvalue_rejected(self, c0_problem):
        with pytest.raises(NearEigenvalueError):
            resolvent_quadrature(c0_problem, 1.0, "1")


class TestGreenSeries:
    def test_single_term(self, c0_problem, c0_spec8):
        got = green_series(c0_problem, c0_spec8, 1, 0.0, 0.0, "left", "left")
        assert got == pytest.approx(-4.0 / math.pi, abs=1e-5)

    def test_vanishes_at_dirichlet_end(self, c0_problem, c0_spec8):
        for xi in (-1.0, 2.0):
            assert abs(green_series(c0_problem, c0_spec8, 8, -math.pi, xi)) < 1e-10

    def test_truncation_error_nonincreasing(self, c0_problem, c0_spec_big):
        sample = [(-2.2, -1.1), (-1.3, 0.4), (0.9, 2.8), (0.0, 0.0)]
        sides = [(None, None), (None, None), (None, None), ("left", "left")]
        sups = []
        for N in (25, 50, 100, 200, 400):
            worst = 0.0
            for (x, xi), (sx, sxi) in zip(sample, sides):
                truth = green_eval(c0_problem, 0.0, x, xi, sx, sxi)
                approx = green_series(c0_problem, c0_spec_big, N, x, xi, sx, sxi)
                worst = max(worst, abs(truth - approx))
            sups.append(worst)
        assert all(b <= a + 1e-12 for a, b in zip(sups, sups[1:]))

    def test_requires_unshifted_spectrum(self):
        P = problem(q_left="0-0.25", q_right="0-0.25")
        spec = compute_spectrum(P, 2)
        assert spec.shift != 0.0
        with pytest.raises(SLTError, match="shift"):
            green_series(P, spec, 1, 0.0, 0.0, "left", "left")

    def test_term_count_checked(self, c0_problem, c0_spec8):
        with pytest.raises(ValueError, match="exceeds"):
            green_series(c0_problem, c0_spec8, 9, -1.0, 1.0)


class TestResolventSeries:
    def test_diagonal_action(self, c0_problem, c0_spec8):
        u = resolvent_series(c0_problem, c0_spec8, "sin(x+pi)", 10.3, 8)
        expect_l = np.sin(u.left_x + math.pi) / (1.0 - 10.3)
        assert np.max(np.abs(u.left_y - expect_l)) < 1e-5

    def test_matches_quadrature(self, c0_problem, c0_spec_big):
        uq = resolvent_quadrature(c0_problem, 10.3, "pi^2-x^2")
        us = resolvent_series(c0_problem, c0_spec_big, "pi^2-x^2", 10.3, 200)
        sup = max(np.max(np.abs(uq.left_y)), np.max(np.abs(uq.right_y)))
        dev = max(np.max(np.abs(uq.left_y - us.left_y)),
                  np.max(np.abs(uq.right_y - us.right_y)))
        assert dev <= 1e-3 * sup

    def test_lambda_zero_reconstruction(self, c0_problem, c0_spec_big):
        u = resolvent_series(c0_problem, c0_spec_big, "1", 0.0, 200)
        exact = (math.pi ** 2 - u.left_x ** 2) / 2.0
        assert np.max(np.abs(u.left_y - exact)) <= 1e-3

    def test_zero_input(self, c0_problem, c0_spec8):
        u = resolvent_series(c0_problem, c0_spec8, "0", 10.3, 8)
        assert np.all(u.left_y == 0.0) and np.all(u.right_y == 0.0)
        uq = resolvent_quadrature(c0_problem, 10.3, "0")
        assert np.max(np.abs(uq.left_y)) < 1e-15

    def test_near_eigenvalue_rejected(self, c0_problem, c0_spec8):
        with pytest.raises(NearEigenvalueError):
            resolvent_series(c0_problem, c0_spec8, "1", float(c0_spec8[2].lambda_n), 8)
