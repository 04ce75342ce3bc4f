import math

import numpy as np
import pytest

from slt.errors import GridMismatchError
from slt.model import (FullTrace, TransmissionMatrix, btc_residuals,
                       cumulative_quadrature, hermite_derivative, hermite_value,
                       inner_product, minor, problem, sample_expression,
                       simpson, validate_problem)

T0 = TransmissionMatrix.continuity()


class TestMinors:
    def test_continuity_values(self):
        assert minor(T0, 1, 2) == 1.0
        assert minor(T0, 3, 4) == 1.0
        assert minor(T0, 1, 4) == -1.0
        assert minor(T0, 2, 3) == 1.0
        assert minor(T0, 1, 3) == 0.0
        assert minor(T0, 2, 4) == 0.0

    def test_definition(self):
        t = TransmissionMatrix([[1.5, -2.0, 0.5, 3.0], [0.25, 1.0, -1.0, 2.0]])
        for i in range(1, 5):
            for j in range(i + 1, 5):
                a, b = t.entries
                assert t.minor(i, j) == a[i - 1] * b[j - 1] - a[j - 1] * b[i - 1]

    def test_index_errors(self):
        for bad in [(0, 1), (2, 2), (3, 1), (1, 5)]:
            with pytest.raises(IndexError):
                T0.minor(*bad)

    def test_column_swap_antisymmetry(self):
        t = TransmissionMatrix([[1.5, -2.0, 0.5, 3.0], [0.25, 1.0, -1.0, 2.0]])
        rows = [list(r) for r in t.entries]
        for i, j in [(1, 2), (1, 3), (2, 4), (3, 4)]:
            swapped = [r.copy() for r in rows]
            for r in swapped:
                r[i - 1], r[j - 1] = r[j - 1], r[i - 1]
            ts = TransmissionMatrix(swapped)
            assert ts.minor(i, j) == -t.minor(i, j)

    def test_plucker_identity(self):
        # underlies the Wronskian identity between the two subintervals
        t = TransmissionMatrix([[1.5, -2.0, 0.5, 3.0], [0.25, 1.0, -1.0, 2.0]])
        d = t.minor
        assert abs(d(1, 2) * d(3, 4) - d(1, 3) * d(2, 4) + d(1, 4) * d(2, 3)) < 1e-12


class TestValidation:
    def test_classical_problem_passes(self):
        assert validate_problem(problem()) == []

    def test_rank_deficient_matrix(self):
        P = problem(tmatrix=[[1.0, 2.0, 3.0, 4.0], [1.0, 2.0, 3.0, 4.0]])
        assert validate_problem(P) == ["Delta12 = 0", "Delta34 = 0"]

    def test_negative_p1(self):
        assert validate_problem(problem(p1=-1.0)) == ["p1 not positive"]

    def test_negative_weight(self):
        P = problem(tmatrix=[[1.0, 0.0, 1.0, 0.0], [0.0, 1.0, 0.0, -1.0]])
        assert validate_problem(P) == ["left weight Delta34/p1 not positive"]

    def test_odd_grid(self):
        assert "grid_steps must be an even integer >= 4" in validate_problem(
            problem(grid_steps=101))

    def test_unevaluable_potential(self):
        violations = validate_problem(problem(q_left="1/x"))
        assert len(violations) == 1 and violations[0].startswith("q_left not evaluable")


class TestInnerProduct:
    def test_half_sine_norm(self, c0_problem):
        f = sample_expression(c0_problem, "sin((x+pi)/2)")
        assert inner_product(c0_problem, f, f) == pytest.approx(math.pi, abs=1e-10)

    def test_zero_trace(self, c1_problem):
        z = FullTrace.zeros(c1_problem)
        f = sample_expression(c1_problem, "sin(x)+x")
        assert inner_product(c1_problem, z, f) == 0.0
        assert inner_product(c1_problem, z, z) == 0.0

    def test_weighted_lengths(self, c1_problem):
        # weights are 2 on the left and 1 on the right
        one = sample_expression(c1_problem, "1")
        assert inner_product(c1_problem, one, one) == pytest.approx(3 * math.pi, abs=1e-10)

    def test_symmetry_and_bilinearity(self, c0_problem):
        f = sample_expression(c0_problem, "sin(x)*exp(x/5)")
        g = sample_expression(c0_problem, "cos(2*x)")
        h = sample_expression(c0_problem, "x")
        assert inner_product(c0_problem, f, g) == inner_product(c0_problem, g, f)
        lhs = inner_product(
            c0_problem,
            FullTrace(f.left_x, 2.0 * f.left_y + h.left_y, 2.0 * f.left_dy + h.left_dy,
                      f.right_x, 2.0 * f.right_y + h.right_y, 2.0 * f.right_dy + h.right_dy),
            g)
        rhs = 2.0 * inner_product(c0_problem, f, g) + inner_product(c0_problem, h, g)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)

    def test_positive_definite(self, c0_problem):
        f = sample_expression(c0_problem, "x*x-1")
        assert inner_product(c0_problem, f, f) > 0.0

    def test_grid_mismatch(self, c0_problem):
        other = problem(grid_steps=512)
        f = sample_expression(other, "x")
        g = sample_expression(c0_problem, "x")
        with pytest.raises(GridMismatchError):
            inner_product(c0_problem, f, g)


class TestQuadrature:
    def test_simpson_exact_for_cubics(self):
        x = np.linspace(-1.0, 2.0, 9)
        h = x[1] - x[0]
        vals = x ** 3 - 2 * x ** 2 + 4
        exact = (2.0 ** 4 / 4 - 2 * 2.0 ** 3 / 3 + 4 * 2.0) - ((-1.0) ** 4 / 4 - 2 * (-1.0) ** 3 / 3 + 4 * (-1.0))
        assert simpson(vals, h) == pytest.approx(exact, rel=1e-14)

    def test_simpson_needs_odd_node_count(self):
        with pytest.raises(ValueError):
            simpson(np.ones(4), 0.1)

    def test_simpson_sine(self):
        x = np.linspace(0.0, math.pi, 2049)
        assert simpson(np.sin(x), x[1] - x[0]) == pytest.approx(2.0, abs=1e-12)

    def test_cumulative_exact_for_cubics(self):
        x = np.linspace(0.0, 1.0, 21)
        vals = 4.0 * x ** 3
        prefix = cumulative_quadrature(vals, x[1] - x[0])
        assert np.max(np.abs(prefix - x ** 4)) < 1e-14

    def test_cumulative_fourth_order(self):
        errs = []
        for n in (64, 128):
            x = np.linspace(0.0, math.pi, n + 1)
            prefix = cumulative_quadrature(np.sin(x), x[1] - x[0])
            errs.append(np.max(np.abs(prefix - (1.0 - np.cos(x)))))
        assert errs[0] / errs[1] > 12.0


class TestTraces:
    def test_interface_samples(self, c0_problem):
        f = sample_expression(c0_problem, "sign(x)*x+1")
        assert f.value_minus == f.left_y[-1]
        assert f.value_plus == f.right_y[0]
        assert f.left_x[-1] == 0.0 and f.right_x[0] == 0.0

    def test_rejects_non_finite(self, c0_problem):
        xl = c0_problem.nodes("left")
        xr = c0_problem.nodes("right")
        bad = np.zeros_like(xl)
        bad[3] = np.inf
        with pytest.raises(ValueError, match="non-finite"):
            FullTrace(xl, bad, np.zeros_like(xl), xr, np.zeros_like(xr), np.zeros_like(xr))

    def test_side_resolution(self, c0_problem):
        f = sample_expression(c0_problem, "x")
        assert f.value_at(-1.0) == pytest.approx(-1.0, abs=1e-12)
        assert f.value_at(1.0) == pytest.approx(1.0, abs=1e-12)
        with pytest.raises(ValueError, match="two-sided"):
            f.value_at(0.0)
        assert f.value_at(0.0, "left") == f.value_minus

    def test_sampled_derivatives(self, c0_problem):
        f = sample_expression(c0_problem, "sin(2*x)")
        xs = np.concatenate([f.left_x, f.right_x])
        ds = np.concatenate([f.left_dy, f.right_dy])
        assert np.max(np.abs(ds - 2.0 * np.cos(2.0 * xs))) < 1e-5

    def test_hermite_interpolation_accuracy(self, c0_problem):
        f = sample_expression(c0_problem, "sin(2*x)")
        x = np.linspace(-3.0, -0.01, 57)
        vals = hermite_value(f.left_x, f.left_y, f.left_dy, x)
        assert np.max(np.abs(vals - np.sin(2.0 * x))) < 1e-9
        ders = hermite_derivative(f.left_x, f.left_y, f.left_dy, x)
        assert np.max(np.abs(ders - 2.0 * np.cos(2.0 * x))) < 1e-5

    def test_hermite_out_of_range(self, c0_problem):
        f = sample_expression(c0_problem, "x")
        with pytest.raises(ValueError, match="outside"):
            f.value_at(-4.0, "left")


class TestBtcResiduals:
    def test_constant_on_continuity(self, c0_problem):
        one = sample_expression(c0_problem, "1")
        r = btc_residuals(c0_problem, one)
        assert r[0] == pytest.approx(1.0, abs=1e-12)  # cos(0)*1
        assert r[1] == pytest.approx(1.0, abs=1e-12)
        assert abs(r[2]) < 1e-12 and abs(r[3]) < 1e-12

    def test_constant_on_jump(self, c1_problem):
        one = sample_expression(c1_problem, "1")
        r = btc_residuals(c1_problem, one)
        assert abs(r[2]) == pytest.approx(1.0, abs=1e-12)  # |1 - 2|
        assert abs(r[3]) < 1e-12
