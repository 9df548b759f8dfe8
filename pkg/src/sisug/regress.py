"""Least squares on a column subset with closed-form leave-one-out error.

The pseudoinverse is taken through a thin SVD, so rank-deficient subsets are
handled and the hat-matrix diagonal comes from the left singular vectors
without ever forming the ``m x m`` hat matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .basis import DesignMatrix
from .errors import DataError

LEVERAGE_TOLERANCE = 1e-8


def default_cutoff(m: int, k: int) -> float:
    return max(m, k) * np.finfo(float).eps


def pseudoinverse_solve(theta_sub, y, rel_cutoff: float | None = None):
    """Minimum-norm least-squares solution of ``theta_sub @ coef ~= y``.

    Singular values below ``rel_cutoff * sigma_max`` are treated as zero
    (default ``max(m, k) * eps``).

    Returns
    -------
    coefficients : ndarray, shape (k,)
    fitted : ndarray, shape (m,)
    leverage : ndarray, shape (m,)
        Diagonal of the hat matrix.
    """
    theta_sub = np.asarray(theta_sub, dtype=float)
    y = np.asarray(y, dtype=float)
    if theta_sub.ndim == 1:
        theta_sub = theta_sub[:, None]
    m, k = theta_sub.shape
    if m < 1 or k < 1:
        raise DataError("empty design matrix")
    if y.shape != (m,):
        raise DataError(f"y has shape {y.shape}, expected ({m},)")
    if not (np.all(np.isfinite(theta_sub)) and np.all(np.isfinite(y))):
        raise DataError("non-finite values in least-squares inputs")
    if rel_cutoff is None:
        rel_cutoff = default_cutoff(m, k)

    u, s, vt = np.linalg.svd(theta_sub, full_matrices=False)
    keep = s > rel_cutoff * s[0] if s[0] > 0 else np.zeros_like(s, dtype=bool)
    u, s, vt = u[:, keep], s[keep], vt[keep]
    uty = u.T @ y
    coefficients = vt.T @ (uty / s)
    fitted = u @ uty
    leverage = np.einsum("ij,ij->i", u, u)
    return coefficients, fitted, leverage


def loocv_error(fitted, y, leverage, leverage_tolerance: float = LEVERAGE_TOLERANCE) -> float:
    """Mean squared leave-one-out prediction error from a single fit.

    Returns ``inf`` when any sample has leverage within ``leverage_tolerance``
    of one, i.e. the fit interpolates it and cannot be validated on it.
    """
    fitted = np.asarray(fitted, dtype=float)
    y = np.asarray(y, dtype=float)
    leverage = np.asarray(leverage, dtype=float)
    if not (fitted.shape == y.shape == leverage.shape) or y.ndim != 1:
        raise DataError("fitted, y and leverage must be 1-D arrays of equal length")
    slack = 1.0 - leverage
    if np.any(slack < leverage_tolerance):
        return float("inf")
    return float(np.mean(((y - fitted) / slack) ** 2))


@dataclass(frozen=True)
class LeastSquaresFit:
    subset: tuple[int, ...]
    coefficients: np.ndarray
    fitted: np.ndarray
    leverage: np.ndarray
    loocv_error: float

    @property
    def k(self) -> int:
        return len(self.subset)

    @property
    def rank(self) -> int:
        return int(round(float(np.sum(self.leverage))))


def fit_subset(
    design: DesignMatrix,
    subset: Sequence[int],
    y,
    rel_cutoff: float | None = None,
    leverage_tolerance: float = LEVERAGE_TOLERANCE,
) -> LeastSquaresFit:
    subset = tuple(int(i) for i in subset)
    if not subset:
        raise DataError("subset is empty")
    if len(set(subset)) != len(subset):
        raise DataError(f"subset {subset} has repeated indices")
    if min(subset) < 0 or max(subset) >= design.p:
        raise DataError(f"subset {subset} out of range for {design.p} columns")
    coef, fitted, leverage = pseudoinverse_solve(
        design.values[:, subset], y, rel_cutoff
    )
    eps = loocv_error(fitted, y, leverage, leverage_tolerance)
    return LeastSquaresFit(subset, coef, fitted, leverage, eps)
