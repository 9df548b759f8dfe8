"""Benchmark systems, jittered sampling and fixed-step RK4 integration."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import BasisLibrary, monomial_library
from .errors import ConfigError, SimulationError
from .timeseries import TimeSeries

DEFAULT_HORIZON = 6.0
DEFAULT_JITTER = 0.25


@dataclass(frozen=True)
class PolynomialSystem:
    """``dx/dt = Z @ theta(x)`` with ``theta`` given by ``library``."""

    name: str
    library: BasisLibrary
    Z: np.ndarray
    initial_state: np.ndarray
    t0: float = 0.0

    def __post_init__(self):
        Z = np.array(self.Z, dtype=float)
        x0 = np.array(self.initial_state, dtype=float)
        if Z.ndim != 2 or Z.shape != (self.library.dimension, len(self.library)):
            raise ConfigError(
                f"Z must have shape ({self.library.dimension}, {len(self.library)}), "
                f"got {Z.shape}"
            )
        if x0.shape != (self.library.dimension,):
            raise ConfigError(
                f"initial state must have length {self.library.dimension}"
            )
        Z.setflags(write=False)
        x0.setflags(write=False)
        object.__setattr__(self, "Z", Z)
        object.__setattr__(self, "initial_state", x0)

    @property
    def dimension(self) -> int:
        return self.library.dimension

    def rhs(self, x) -> np.ndarray:
        return self.Z @ self.library.evaluate(x)[0]

    def support(self, i: int) -> frozenset:
        return frozenset(
            self.library[j].exponents for j in np.flatnonzero(self.Z[i])
        )

    def coefficients_in(self, library: BasisLibrary) -> np.ndarray:
        """Re-express ``Z`` over another library, matching columns by exponents."""
        out = np.zeros((self.dimension, len(library)))
        for j, f in enumerate(self.library):
            col = self.Z[:, j]
            if not np.any(col):
                continue
            try:
                target = library.index(f.exponents)
            except ValueError:
                raise ConfigError(
                    f"true term {f.name} of {self.name} is missing from the "
                    "identification library"
                ) from None
            out[:, target] = col
        return out


def ring6() -> PolynomialSystem:
    """Six-node feedback ring, linear in the states."""
    Z = [
        [-1, 0, 0, 0, 0, -1],
        [1, -1, 0, 0, 0, 0],
        [0, -1, -1, 0, 0, 0],
        [0, 0, -1, -1, 0, 0],
        [0, 0, 0, 1, -1, 0],
        [0, 0, 0, 0, 1, -1],
    ]
    return PolynomialSystem("ring6", monomial_library(6, 1), Z, [1, 0, 0, 0, 0, 0])


def vanderpol() -> PolynomialSystem:
    """Van der Pol oscillator with unit damping over all monomials up to degree 3."""
    library = monomial_library(2, 3)
    Z = np.zeros((2, len(library)))
    Z[0, library.index((0, 1))] = 1.0
    Z[1, library.index((1, 0))] = -1.0
    Z[1, library.index((0, 1))] = 1.0
    Z[1, library.index((2, 1))] = -1.0
    return PolynomialSystem("vdp", library, Z, [-1.0, 1.0])


BUILTIN_SYSTEMS = {
    "ring6": ring6,
    "ring": ring6,
    "vdp": vanderpol,
    "vanderpol": vanderpol,
}


def builtin_system(name: str) -> PolynomialSystem:
    try:
        return BUILTIN_SYSTEMS[name.lower()]()
    except KeyError:
        raise ConfigError(
            f"unknown system {name!r}; choose from {sorted(BUILTIN_SYSTEMS)}"
        ) from None


@dataclass(frozen=True)
class SamplingScheme:
    """``m`` samples: ``t0`` plus ``m - 1`` jittered points ``t0 + d*T + dt_d``.

    ``T = horizon / (m - 1)`` and each ``dt_d`` is drawn independently from
    ``U(-jitter_fraction*T, jitter_fraction*T)``.
    """

    m: int
    horizon: float = DEFAULT_HORIZON
    jitter_fraction: float = DEFAULT_JITTER
    seed: int | None = None
    t0: float = 0.0

    def __post_init__(self):
        if self.m < 2:
            raise ConfigError(f"need at least 2 samples, got m={self.m}")
        if not 0.0 <= self.jitter_fraction < 0.5:
            raise ConfigError(
                f"jitter_fraction must lie in [0, 0.5), got {self.jitter_fraction}"
            )
        if not self.horizon > 0:
            raise ConfigError("horizon must be positive")

    @property
    def period(self) -> float:
        return self.horizon / (self.m - 1)


def sample_times(scheme: SamplingScheme) -> np.ndarray:
    T = scheme.period
    rng = np.random.default_rng(scheme.seed)
    half_width = scheme.jitter_fraction * T
    jitter = rng.uniform(-half_width, half_width, size=scheme.m - 1)
    d = np.arange(1, scheme.m)
    times = np.concatenate([[scheme.t0], scheme.t0 + d * T + jitter])
    return times


def _rk4_step(f, x, h):
    k1 = f(x)
    k2 = f(x + 0.5 * h * k1)
    k3 = f(x + 0.5 * h * k2)
    k4 = f(x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(
    system: PolynomialSystem,
    times,
    h_max: float | None = None,
    substeps: int = 1,
) -> TimeSeries:
    """Classical RK4 from ``system.initial_state`` at ``times[0]``.

    The internal step is ``min(min_gap, h_max) / substeps`` (``h_max``
    defaults to ``1e-3`` of the time span); each gap between requested
    times is split into equal steps so every requested time is hit exactly.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.shape[0] < 1:
        raise SimulationError("times must be a non-empty 1-D array")
    gaps = np.diff(times)
    if np.any(gaps <= 0):
        raise SimulationError("times must be strictly increasing")
    if times[0] != system.t0:
        raise SimulationError(
            f"times[0]={times[0]} does not match the initial time {system.t0}"
        )
    if substeps < 1:
        raise SimulationError("substeps must be >= 1")
    span = times[-1] - times[0]
    if h_max is None:
        h_max = 1e-3 * span if span > 0 else 1.0
    states = np.empty((times.shape[0], system.dimension))
    x = system.initial_state.astype(float)
    states[0] = x
    if gaps.size:
        h = min(float(gaps.min()), h_max) / substeps
        # exponents and Z hoisted out of the hot loop
        exps = system.library.exponents.astype(float)
        Z = system.Z

        def f(x):
            return Z @ np.prod(x**exps, axis=1)

        for j, gap in enumerate(gaps):
            n_steps = max(1, math.ceil(gap / h - 1e-9))
            step = gap / n_steps
            with np.errstate(over="ignore", invalid="ignore"):
                for _ in range(n_steps):
                    x = _rk4_step(f, x, step)
            if not np.all(np.isfinite(x)):
                raise SimulationError(
                    f"{system.name}: state became non-finite before t={times[j + 1]}"
                )
            states[j + 1] = x
    return TimeSeries(times, states)


def simulate(system: PolynomialSystem, scheme: SamplingScheme) -> TimeSeries:
    return integrate(system, sample_times(scheme))
