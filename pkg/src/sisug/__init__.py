"""Sparse continuous-time system identification from unevenly sampled data.

Derivatives are estimated with not-a-knot cubic splines, candidate
monomial subsets are scored by their closed-form leave-one-out error, and
the subset size grows until the error stops improving.
"""

from .basis import (
    BasisFunction,
    BasisLibrary,
    DesignMatrix,
    build_design_matrix,
    evaluate_basis,
    monomial_library,
)
from .errors import (
    ConfigError,
    DataError,
    GrowthError,
    SimulationError,
    SisugError,
    SplineError,
)
from .growth import GrowthRecord, GrowthTrace, SparseModel, grow_one_variable, identify
from .regress import LeastSquaresFit, fit_subset, loocv_error, pseudoinverse_solve
from .simulate import (
    PolynomialSystem,
    SamplingScheme,
    integrate,
    ring6,
    sample_times,
    vanderpol,
)
from .spline import CubicSpline, DerivativeEstimate, estimate_derivatives, fit_spline
from .timeseries import TimeSeries

__version__ = "0.1.0"

__all__ = [
    "BasisFunction",
    "BasisLibrary",
    "ConfigError",
    "CubicSpline",
    "DataError",
    "DerivativeEstimate",
    "DesignMatrix",
    "GrowthError",
    "GrowthRecord",
    "GrowthTrace",
    "LeastSquaresFit",
    "PolynomialSystem",
    "SamplingScheme",
    "SimulationError",
    "SisugError",
    "SparseModel",
    "SplineError",
    "TimeSeries",
    "build_design_matrix",
    "estimate_derivatives",
    "evaluate_basis",
    "fit_spline",
    "fit_subset",
    "grow_one_variable",
    "identify",
    "integrate",
    "loocv_error",
    "monomial_library",
    "pseudoinverse_solve",
    "ring6",
    "sample_times",
    "vanderpol",
]
