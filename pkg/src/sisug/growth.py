"""Subset growth: exhaustive search over basis subsets of increasing size.

For each state variable, every ``k``-subset of the library is scored by its
leave-one-out error. Growth stops at the first ``k`` whose best error fails
to improve on the previous best by more than ``stop_factor`` of it, and the
previous size's best subset is kept.
"""

from __future__ import annotations

import itertools
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .basis import BasisLibrary, DesignMatrix, build_design_matrix
from .errors import GrowthError, SisugError
from .regress import LEVERAGE_TOLERANCE, LeastSquaresFit, fit_subset
from .spline import estimate_derivatives
from .timeseries import TimeSeries

DEFAULT_STOP_FACTOR = 0.1
DEFAULT_FIT_BUDGET = 10**6
# errors below ZERO_ERROR_FACTOR * mean(y**2) are roundoff, i.e. an exact fit
ZERO_ERROR_FACTOR = (1e3 * np.finfo(float).eps) ** 2


@dataclass(frozen=True)
class GrowthRecord:
    k: int
    subset: tuple[int, ...]
    epsilon: float


@dataclass
class GrowthTrace:
    """Everything one growth run evaluated, for a single state variable."""

    variable: int
    records: list[GrowthRecord] = field(default_factory=list)
    minima: list[GrowthRecord] = field(default_factory=list)
    stop_k: int = 0
    criterion_fired: bool = False
    selected: GrowthRecord | None = None

    def records_at(self, k: int) -> list[GrowthRecord]:
        return [r for r in self.records if r.k == k]

    @property
    def epsilon_by_k(self) -> dict[int, float]:
        return {r.k: r.epsilon for r in self.minima}


@dataclass(frozen=True)
class SparseModel:
    """Recovered coefficient matrix; off-support entries are exactly zero."""

    library: BasisLibrary
    coefficients: np.ndarray  # n x p
    supports: tuple[tuple[tuple[int, ...], ...], ...]
    epsilons: tuple[float, ...] = ()

    @property
    def ks(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.supports)

    @property
    def dimension(self) -> int:
        return self.coefficients.shape[0]

    def support_indices(self, i: int) -> tuple[int, ...]:
        return tuple(self.library.index(e) for e in self.supports[i])

    def equation(self, i: int, precision: int = 4) -> str:
        terms = [
            f"{self.coefficients[i, j]:+.{precision}f} {self.library[j].name}"
            for j in self.support_indices(i)
        ]
        return f"dx{i + 1}/dt = " + " ".join(terms)


def _budget_check(p: int, k_max: int, budget: int):
    total = sum(math.comb(p, k) for k in range(1, k_max + 1))
    if total > budget:
        warnings.warn(
            f"exhaustive growth may evaluate up to {total} subsets "
            f"(budget {budget}); consider lowering k_max",
            RuntimeWarning,
            stacklevel=3,
        )


def grow_one_variable(
    design: DesignMatrix,
    y,
    stop_factor: float = DEFAULT_STOP_FACTOR,
    k_max: int | None = None,
    *,
    rel_cutoff: float | None = None,
    leverage_tolerance: float = LEVERAGE_TOLERANCE,
    fit_budget: int = DEFAULT_FIT_BUDGET,
    variable: int = 0,
) -> tuple[LeastSquaresFit, GrowthTrace]:
    """Run subset growth for one regression target ``y``.

    Returns the least-squares fit on the selected subset and the full trace.
    Ties in error go to the lexicographically smallest subset.
    """
    y = np.asarray(y, dtype=float)
    p = design.p
    if not 0.0 < stop_factor < 1.0:
        raise ValueError("stop_factor must lie in (0, 1)")
    k_max = p if k_max is None else int(k_max)
    if not 1 <= k_max <= p:
        raise ValueError(f"k_max must be in [1, {p}], got {k_max}")
    _budget_check(p, k_max, fit_budget)

    zero_floor = ZERO_ERROR_FACTOR * float(np.mean(y**2))
    trace = GrowthTrace(variable=variable)
    best_fits: list[LeastSquaresFit] = []
    for k in range(1, k_max + 1):
        best = None
        for subset in itertools.combinations(range(p), k):
            fit = fit_subset(design, subset, y, rel_cutoff, leverage_tolerance)
            trace.records.append(GrowthRecord(k, subset, fit.loocv_error))
            # strict < keeps the first (lexicographically smallest) among ties
            if best is None or fit.loocv_error < best.loocv_error:
                best = fit
        trace.minima.append(GrowthRecord(k, best.subset, best.loocv_error))
        best_fits.append(best)

        if k == 1:
            if math.isinf(best.loocv_error):
                raise GrowthError(
                    f"every single-function fit interpolates the data "
                    f"(m={design.m}); cannot cross-validate"
                )
            continue
        prev = best_fits[-2].loocv_error
        if prev <= zero_floor or prev - best.loocv_error <= stop_factor * prev:
            trace.stop_k = k
            trace.criterion_fired = True
            chosen = best_fits[-2]
            break
    else:
        trace.stop_k = k_max
        chosen = best_fits[-1]
    trace.selected = GrowthRecord(chosen.k, chosen.subset, chosen.loocv_error)
    return chosen, trace


def _scatter(library: BasisLibrary, fits, epsilons) -> SparseModel:
    n = len(fits)
    coefficients = np.zeros((n, len(library)))
    supports = []
    for i, fit in enumerate(fits):
        coefficients[i, list(fit.subset)] = fit.coefficients
        supports.append(tuple(library[j].exponents for j in fit.subset))
    coefficients.setflags(write=False)
    return SparseModel(library, coefficients, tuple(supports), tuple(epsilons))


def identify_from_derivatives(
    samples: TimeSeries,
    derivatives,
    library: BasisLibrary,
    stop_factor: float = DEFAULT_STOP_FACTOR,
    k_max: int | None = None,
    threads: int = 1,
    **growth_options,
) -> tuple[SparseModel, list[GrowthTrace]]:
    """Identify with user-supplied derivative targets (``m x n``)."""
    derivatives = np.asarray(derivatives, dtype=float)
    if derivatives.ndim == 1:
        derivatives = derivatives[:, None]
    if derivatives.shape != samples.states.shape:
        raise GrowthError(
            f"derivatives have shape {derivatives.shape}, samples "
            f"{samples.states.shape}"
        )
    design = build_design_matrix(library, samples)

    def one(i):
        try:
            return grow_one_variable(
                design,
                derivatives[:, i],
                stop_factor,
                k_max,
                variable=i,
                **growth_options,
            )
        except SisugError as exc:
            raise type(exc)(f"variable x{i + 1}: {exc}") from exc

    variables = range(samples.dimension)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, variables))
    else:
        results = [one(i) for i in variables]
    fits = [r[0] for r in results]
    traces = [r[1] for r in results]
    model = _scatter(library, fits, [f.loocv_error for f in fits])
    return model, traces


def identify(
    samples: TimeSeries,
    library: BasisLibrary,
    stop_factor: float = DEFAULT_STOP_FACTOR,
    k_max: int | None = None,
    threads: int = 1,
    **growth_options,
) -> tuple[SparseModel, list[GrowthTrace]]:
    """Spline derivatives, design matrix, subset growth per variable."""
    derivatives = estimate_derivatives(samples)
    return identify_from_derivatives(
        samples,
        derivatives.values,
        library,
        stop_factor,
        k_max,
        threads,
        **growth_options,
    )
