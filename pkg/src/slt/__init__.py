"""Spectral solver for two-interval Sturm-Liouville problems with
interior transmission conditions.

Eigenvalues are located by shooting against the characteristic function,
eigenfunctions are normalized in the problem's weighted inner product, and
the Green kernel, resolvent and eigenfunction expansions are evaluated and
cross-validated on the same solver grid.
"""

from .errors import (ConfigError, DivergenceError, EvaluationError,
                     ExpressionSyntaxError, GridMismatchError,
                     NearEigenvalueError, ProblemValidationError,
                     ScanExhaustedError, SLTError)
from .expr import Expression, eval_expression, parse_expression
from .model import (FullTrace, TransmissionMatrix, TwoIntervalProblem,
                    inner_product, minor, problem, sample_expression,
                    validate_problem)
from .integrate import HalfTrace, integrate_subinterval
from .shoot import (CharacteristicValue, characteristic, left_solution,
                    right_solution, wronskian)
from .spectrum import (Eigenpair, Spectrum, asymptotic_s, compute_spectrum,
                       normalize_eigenfunction, refine_eigenvalue,
                       scan_brackets)
from .green import (KernelEvaluation, green_eval, green_series,
                    resolvent_quadrature, resolvent_series)
from .expansion import (CoefficientList, check_btc, coefficient_identity_check,
                        fourier_coefficient, fourier_coefficients,
                        mean_square_error, parseval_gap, partial_expansion)

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "DivergenceError", "EvaluationError",
    "ExpressionSyntaxError", "GridMismatchError", "NearEigenvalueError",
    "ProblemValidationError", "ScanExhaustedError", "SLTError",
    "Expression", "eval_expression", "parse_expression",
    "FullTrace", "TransmissionMatrix", "TwoIntervalProblem", "inner_product",
    "minor", "problem", "sample_expression", "validate_problem",
    "HalfTrace", "integrate_subinterval",
    "CharacteristicValue", "characteristic", "left_solution",
    "right_solution", "wronskian",
    "Eigenpair", "Spectrum", "asymptotic_s", "compute_spectrum",
    "normalize_eigenfunction", "refine_eigenvalue", "scan_brackets",
    "KernelEvaluation", "green_eval", "green_series",
    "resolvent_quadrature", "resolvent_series",
    "CoefficientList", "check_btc", "coefficient_identity_check",
    "fourier_coefficient", "fourier_coefficients", "mean_square_error",
    "parseval_gap", "partial_expansion",
    "__version__",
]
