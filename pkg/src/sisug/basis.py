"""Monomial basis functions and the design matrix built from them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError
from .timeseries import TimeSeries


@dataclass(frozen=True)
class BasisFunction:
    """Monomial ``prod_i x_i ** exponents[i]``."""

    exponents: tuple[int, ...]

    def __post_init__(self):
        exps = tuple(int(e) for e in self.exponents)
        if not exps:
            raise ValueError("a basis function needs at least one exponent")
        if any(e < 0 for e in exps):
            raise ValueError(f"exponents must be non-negative, got {exps}")
        object.__setattr__(self, "exponents", exps)

    @property
    def dimension(self) -> int:
        return len(self.exponents)

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    @property
    def is_constant(self) -> bool:
        return self.degree == 0

    @property
    def name(self) -> str:
        if self.is_constant:
            return "1"
        parts = []
        for i, e in enumerate(self.exponents, start=1):
            if e == 1:
                parts.append(f"x{i}")
            elif e > 1:
                parts.append(f"x{i}^{e}")
        return "*".join(parts)

    def __call__(self, state) -> float:
        return evaluate_basis(self, state)

    def __str__(self):
        return self.name


def evaluate_basis(f: BasisFunction, state) -> float:
    state = np.asarray(state, dtype=float)
    if state.shape != (f.dimension,):
        raise DataError(
            f"state has shape {state.shape}, expected ({f.dimension},)"
        )
    return float(np.prod(state ** np.asarray(f.exponents)))


@dataclass(frozen=True)
class BasisLibrary:
    """Ordered, duplicate-free list of monomials over ``dimension`` variables.

    Column ``j`` of every design matrix built from this library corresponds
    to ``functions[j]``.
    """

    functions: tuple[BasisFunction, ...]
    dimension: int

    def __post_init__(self):
        funcs = tuple(
            f if isinstance(f, BasisFunction) else BasisFunction(tuple(f))
            for f in self.functions
        )
        if not funcs:
            raise ValueError("library is empty")
        for f in funcs:
            if f.dimension != self.dimension:
                raise ValueError(
                    f"{f.exponents} has length {f.dimension}, library dimension "
                    f"is {self.dimension}"
                )
        if len(set(funcs)) != len(funcs):
            raise ValueError("library contains duplicate basis functions")
        object.__setattr__(self, "functions", funcs)

    @classmethod
    def from_exponents(
        cls, exponents: Iterable[Sequence[int]], allow_constant: bool = False
    ) -> "BasisLibrary":
        funcs = tuple(BasisFunction(tuple(e)) for e in exponents)
        if not funcs:
            raise ValueError("library is empty")
        if not allow_constant and any(f.is_constant for f in funcs):
            raise ValueError("constant term given but allow_constant is False")
        return cls(funcs, funcs[0].dimension)

    def __len__(self):
        return len(self.functions)

    def __iter__(self):
        return iter(self.functions)

    def __getitem__(self, idx):
        return self.functions[idx]

    @property
    def exponents(self) -> np.ndarray:
        """``p x n`` integer matrix of exponents."""
        return np.array([f.exponents for f in self.functions], dtype=int)

    @property
    def names(self) -> list[str]:
        return [f.name for f in self.functions]

    def index(self, exponents: Sequence[int]) -> int:
        return self.functions.index(BasisFunction(tuple(exponents)))

    def evaluate(self, states) -> np.ndarray:
        """Evaluate every function at each row of ``states`` (``m x n`` -> ``m x p``)."""
        states = np.asarray(states, dtype=float)
        if states.ndim == 1:
            states = states[None, :]
        if states.shape[1] != self.dimension:
            raise DataError(
                f"states have {states.shape[1]} variables, library expects "
                f"{self.dimension}"
            )
        # explicit power loop keeps 0**0 == 1 and avoids log-domain tricks
        out = np.ones((states.shape[0], len(self)))
        for col, f in enumerate(self.functions):
            for var, e in enumerate(f.exponents):
                if e:
                    out[:, col] *= states[:, var] ** e
        return out


def monomial_library(
    dimension: int, max_total_degree: int, include_constant: bool = False
) -> BasisLibrary:
    """All monomials of total degree ``1..max_total_degree``.

    Ordered by total degree, then lexicographically on the exponent vector
    with ``x1`` most significant (so ``x1^2`` precedes ``x1*x2``). With
    ``include_constant`` the constant monomial is prepended.
    """
    if dimension < 1 or max_total_degree < 1:
        raise ValueError("dimension and max_total_degree must be positive")
    funcs = []
    if include_constant:
        funcs.append(BasisFunction((0,) * dimension))
    for degree in range(1, max_total_degree + 1):
        exps = [
            e
            for e in itertools.product(range(degree, -1, -1), repeat=dimension)
            if sum(e) == degree
        ]
        funcs.extend(BasisFunction(e) for e in exps)
    return BasisLibrary(tuple(funcs), dimension)


def read_library_file(path, dimension: int | None = None) -> BasisLibrary:
    """Read one monomial per line as space-separated exponents; ``#`` starts a comment."""
    rows = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            exps = tuple(int(tok) for tok in line.split())
        except ValueError:
            raise DataError(f"{path}:{lineno}: exponents must be integers") from None
        if dimension is not None and len(exps) != dimension:
            raise DataError(
                f"{path}:{lineno}: expected {dimension} exponents, got {len(exps)}"
            )
        rows.append(exps)
    if not rows:
        raise DataError(f"{path}: no basis functions found")
    try:
        return BasisLibrary.from_exponents(rows, allow_constant=True)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None


@dataclass(frozen=True)
class DesignMatrix:
    values: np.ndarray
    library: BasisLibrary
    times: np.ndarray

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


def build_design_matrix(library: BasisLibrary, samples: TimeSeries) -> DesignMatrix:
    if samples.dimension != library.dimension:
        raise DataError(
            f"samples have {samples.dimension} variables, library expects "
            f"{library.dimension}"
        )
    values = library.evaluate(samples.states)
    values.setflags(write=False)
    return DesignMatrix(values, library, samples.times)
