"""Scoring recovered models and running randomized sweeps over sample counts."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .basis import BasisLibrary, monomial_library
from .errors import ConfigError, SisugError
from .growth import DEFAULT_STOP_FACTOR, SparseModel, identify
from .simulate import (
    DEFAULT_HORIZON,
    DEFAULT_JITTER,
    PolynomialSystem,
    SamplingScheme,
    builtin_system,
    integrate,
    sample_times,
)


def rmse(Z_true, Z_hat) -> float:
    """Root mean squared entrywise error over all ``n*p`` coefficients."""
    Z_true = np.asarray(Z_true, dtype=float)
    Z_hat = np.asarray(Z_hat, dtype=float)
    if Z_true.shape != Z_hat.shape:
        raise ValueError(f"shape mismatch: {Z_true.shape} vs {Z_hat.shape}")
    return float(np.sqrt(np.mean((Z_true - Z_hat) ** 2)))


def support_match(model: SparseModel, truth: PolynomialSystem) -> bool:
    """True iff every recovered support equals the true nonzero monomials."""
    if model.dimension != truth.dimension:
        return False
    return all(
        frozenset(model.supports[i]) == truth.support(i)
        for i in range(truth.dimension)
    )


def run_seed(base_seed: int, m: int, repetition: int) -> np.random.SeedSequence:
    """Per-run seed: ``SeedSequence([base_seed, m, repetition])``."""
    return np.random.SeedSequence([int(base_seed), int(m), int(repetition)])


@dataclass(frozen=True)
class ExperimentConfig:
    system: str
    m_values: tuple[int, ...]
    repetitions: int = 200
    jitter_fraction: float = DEFAULT_JITTER
    base_seed: int = 0
    degree: int | None = None  # None -> the system's own library
    stop_factor: float = DEFAULT_STOP_FACTOR
    k_max: int | None = None
    horizon: float = DEFAULT_HORIZON

    def __post_init__(self):
        if not self.m_values:
            raise ConfigError("m_values is empty")
        if any(int(m) < 5 for m in self.m_values):
            raise ConfigError("every m must be at least 5")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if not 0.0 <= self.jitter_fraction < 0.5:
            raise ConfigError("jitter_fraction must lie in [0, 0.5)")
        object.__setattr__(self, "m_values", tuple(int(m) for m in self.m_values))


@dataclass(frozen=True)
class RunResult:
    m: int
    repetition: int
    rmse: float = math.nan
    support_match: bool = False
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass(frozen=True)
class ReportRow:
    system: str
    m: int
    repetitions: int
    mean_rmse: float
    std_rmse: float
    support_rate: float
    failures: int


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    rows: list[ReportRow] = field(default_factory=list)
    runs: list[RunResult] = field(default_factory=list)

    def row(self, m: int) -> ReportRow:
        for r in self.rows:
            if r.m == m:
                return r
        raise KeyError(m)


def run_single(
    system: PolynomialSystem,
    library: BasisLibrary,
    m: int,
    seed,
    jitter_fraction: float = DEFAULT_JITTER,
    stop_factor: float = DEFAULT_STOP_FACTOR,
    k_max: int | None = None,
    horizon: float = DEFAULT_HORIZON,
) -> tuple[float, bool, SparseModel]:
    scheme = SamplingScheme(m, horizon, jitter_fraction, seed, system.t0)
    samples = integrate(system, sample_times(scheme))
    model, _ = identify(samples, library, stop_factor, k_max)
    Z_true = system.coefficients_in(library)
    return rmse(Z_true, model.coefficients), support_match(model, system), model


def run_experiment(config: ExperimentConfig, threads: int = 1) -> ExperimentReport:
    system = builtin_system(config.system)
    library = (
        system.library
        if config.degree is None
        else monomial_library(system.dimension, config.degree)
    )
    system.coefficients_in(library)  # fail fast if the library cannot express it

    jobs = [(m, r) for m in config.m_values for r in range(config.repetitions)]

    def one(job):
        m, r = job
        try:
            err, ok, _ = run_single(
                system,
                library,
                m,
                run_seed(config.base_seed, m, r),
                config.jitter_fraction,
                config.stop_factor,
                config.k_max,
                config.horizon,
            )
        except SisugError as exc:
            return RunResult(m, r, error=f"{exc.category}: {exc}")
        return RunResult(m, r, err, ok)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            runs = list(pool.map(one, jobs))
    else:
        runs = [one(job) for job in jobs]

    report = ExperimentReport(config, runs=runs)
    for m in config.m_values:
        done = [r for r in runs if r.m == m and not r.failed]
        failures = sum(1 for r in runs if r.m == m and r.failed)
        errs = np.array([r.rmse for r in done])
        report.rows.append(
            ReportRow(
                system=system.name,
                m=m,
                repetitions=config.repetitions,
                mean_rmse=float(errs.mean()) if done else math.nan,
                std_rmse=float(errs.std()) if done else math.nan,
                support_rate=(
                    sum(r.support_match for r in done) / len(done) if done else math.nan
                ),
                failures=failures,
            )
        )
    return report
