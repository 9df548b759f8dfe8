"""Not-a-knot cubic spline interpolation and derivative estimation at the knots."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SplineError
from .timeseries import TimeSeries

MIN_KNOTS = 4


def _thomas(lower, diag, upper, rhs):
    """Solve a tridiagonal system without pivoting.

    ``lower[i]`` multiplies ``x[i-1]`` in row ``i`` and ``upper[i]`` multiplies
    ``x[i+1]``; ``lower[0]`` and ``upper[-1]`` are ignored.
    """
    n = diag.shape[0]
    c = np.empty(n)
    d = np.empty(n)
    c[0] = upper[0] / diag[0]
    d[0] = rhs[0] / diag[0]
    for i in range(1, n):
        denom = diag[i] - lower[i] * c[i - 1]
        c[i] = upper[i] / denom if i < n - 1 else 0.0
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom
    x = np.empty(n)
    x[-1] = d[-1]
    for i in range(n - 2, -1, -1):
        x[i] = d[i] - c[i] * x[i + 1]
    return x


def _dense(lower, diag, upper, rhs):
    n = diag.shape[0]
    a = np.diag(diag)
    a[np.arange(1, n), np.arange(n - 1)] = lower[1:]
    a[np.arange(n - 1), np.arange(1, n)] = upper[:-1]
    return np.linalg.solve(a, rhs)


def _knot_slopes(h, delta):
    """Spline first derivatives at the knots under not-a-knot end conditions."""
    n = h.shape[0] + 1
    lower = np.zeros(n)
    diag = np.zeros(n)
    upper = np.zeros(n)
    rhs = np.zeros(n)

    # interior rows: C2 continuity written in terms of the knot slopes
    lower[1:-1] = h[1:]
    diag[1:-1] = 2.0 * (h[:-1] + h[1:])
    upper[1:-1] = h[:-1]
    rhs[1:-1] = 3.0 * (h[1:] * delta[:-1] + h[:-1] * delta[1:])

    # third derivative continuous across the second knot
    diag[0] = h[1]
    upper[0] = h[0] + h[1]
    rhs[0] = ((h[0] + 2.0 * upper[0]) * h[1] * delta[0] + h[0] ** 2 * delta[1]) / upper[0]

    # ... and across the second-to-last knot
    diag[-1] = h[-2]
    lower[-1] = h[-1] + h[-2]
    rhs[-1] = (
        h[-1] ** 2 * delta[-2] + (2.0 * lower[-1] + h[-1]) * h[-2] * delta[-1]
    ) / lower[-1]

    with np.errstate(all="ignore"):
        slopes = _thomas(lower, diag, upper, rhs)
    residual = diag * slopes - rhs
    residual[1:] += lower[1:] * slopes[:-1]
    residual[:-1] += upper[:-1] * slopes[1:]
    scale = np.max(np.abs(rhs)) + np.max(np.abs(diag)) * np.max(np.abs(slopes))
    if not np.all(np.isfinite(slopes)) or np.max(np.abs(residual)) > 1e-10 * scale:
        slopes = _dense(lower, diag, upper, rhs)
    return slopes


@dataclass(frozen=True)
class CubicSpline:
    """Piecewise cubic ``a*tau**3 + b*tau**2 + c*tau + d`` with ``tau = t - knots[i]``.

    ``coefficients`` has shape ``(m - 1, 4)`` with columns ``(a, b, c, d)``.
    """

    knots: np.ndarray
    coefficients: np.ndarray

    @property
    def m(self) -> int:
        return self.knots.shape[0]

    def _locate(self, t):
        idx = np.searchsorted(self.knots, t, side="right") - 1
        return np.clip(idx, 0, self.m - 2)

    def __call__(self, t, nu: int = 0):
        """Evaluate the ``nu``-th derivative (0 to 3). Extrapolates with the end pieces."""
        t = np.asarray(t, dtype=float)
        idx = self._locate(t)
        tau = t - self.knots[idx]
        a, b, c, d = (self.coefficients[idx, col] for col in range(4))
        if nu == 0:
            return ((a * tau + b) * tau + c) * tau + d
        if nu == 1:
            return (3.0 * a * tau + 2.0 * b) * tau + c
        if nu == 2:
            return 6.0 * a * tau + 2.0 * b
        if nu == 3:
            return 6.0 * a
        raise ValueError("nu must be 0, 1, 2 or 3")

    def interval_derivatives(self):
        """Derivative at both ends of every interval, shape ``(m - 1, 2)``."""
        a, b, c, _ = self.coefficients.T
        h = np.diff(self.knots)
        return np.column_stack([c, (3.0 * a * h + 2.0 * b) * h + c])


def fit_spline(times, values) -> CubicSpline:
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.ndim != 1 or values.shape != times.shape:
        raise SplineError("times and values must be 1-D arrays of equal length")
    if times.shape[0] < MIN_KNOTS:
        raise SplineError(
            f"not-a-knot spline needs at least {MIN_KNOTS} samples, got {times.shape[0]}"
        )
    if not (np.all(np.isfinite(times)) and np.all(np.isfinite(values))):
        raise SplineError("non-finite sample")
    if np.any(np.diff(times) <= 0):
        raise SplineError("times must be strictly increasing")

    h = np.diff(times)
    delta = np.diff(values) / h
    s = _knot_slopes(h, delta)

    coeffs = np.empty((h.shape[0], 4))
    coeffs[:, 0] = (s[:-1] + s[1:] - 2.0 * delta) / h**2
    coeffs[:, 1] = (3.0 * delta - 2.0 * s[:-1] - s[1:]) / h
    coeffs[:, 2] = s[:-1]
    coeffs[:, 3] = values[:-1]
    times = times.copy()
    times.setflags(write=False)
    coeffs.setflags(write=False)
    return CubicSpline(times, coeffs)


def spline_derivative_at_knots(s: CubicSpline) -> np.ndarray:
    """``s'(t_j)`` for every knot.

    Uses the interval to the right of each knot, except for the last knot
    which is evaluated at the right end of the final interval.
    """
    ends = s.interval_derivatives()
    return np.concatenate([ends[:, 0], ends[-1:, 1]])


@dataclass(frozen=True)
class DerivativeEstimate:
    times: np.ndarray
    values: np.ndarray  # m x n

    def column(self, i: int) -> np.ndarray:
        return self.values[:, i]


def estimate_derivatives(samples: TimeSeries) -> DerivativeEstimate:
    cols = [
        spline_derivative_at_knots(fit_spline(samples.times, samples.states[:, i]))
        for i in range(samples.dimension)
    ]
    values = np.column_stack(cols)
    values.setflags(write=False)
    return DerivativeEstimate(samples.times, values)
