"""Run configuration loaded from JSON. Unknown keys are rejected.

Precedence: built-in defaults < config file < command-line flags.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .basis import BasisLibrary, monomial_library, read_library_file
from .errors import ConfigError
from .simulate import DEFAULT_HORIZON, DEFAULT_JITTER, PolynomialSystem, builtin_system


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SystemConfig(_Section):
    name: str = "ring6"
    # custom systems: all three of library, Z, initial_state
    library: Optional[List[List[int]]] = None
    Z: Optional[List[List[float]]] = None
    initial_state: Optional[List[float]] = None

    @model_validator(mode="after")
    def _custom_complete(self):
        given = [v is not None for v in (self.library, self.Z, self.initial_state)]
        if any(given) and not all(given):
            raise ValueError("custom system needs library, Z and initial_state together")
        return self

    @property
    def is_custom(self) -> bool:
        return self.library is not None

    def build(self) -> PolynomialSystem:
        if not self.is_custom:
            return builtin_system(self.name)
        try:
            library = BasisLibrary.from_exponents(self.library, allow_constant=True)
        except ValueError as exc:
            raise ConfigError(f"system.library: {exc}") from None
        return PolynomialSystem(self.name, library, self.Z, self.initial_state)


class SamplingConfig(_Section):
    m: int = Field(13, ge=2)
    horizon: float = Field(DEFAULT_HORIZON, gt=0)
    jitter_fraction: float = Field(DEFAULT_JITTER, ge=0, lt=0.5)
    seed: Optional[int] = Field(None, ge=0)


class IdentificationConfig(_Section):
    degree: Optional[int] = Field(None, ge=1)
    library_file: Optional[str] = None
    include_constant: bool = False
    stop_factor: float = Field(0.1, gt=0, lt=1)
    k_max: Optional[int] = Field(None, ge=1)

    def library(self, dimension: int, fallback: BasisLibrary | None) -> BasisLibrary:
        """``degree`` wins over ``library_file``, then the system's library.

        Without any of those the library is cubic for up to three variables and
        linear beyond that, which keeps the exhaustive search tractable.
        """
        if self.degree is not None:
            return monomial_library(dimension, self.degree, self.include_constant)
        if self.library_file is not None:
            lib = read_library_file(self.library_file, dimension)
            if self.include_constant and not any(f.is_constant for f in lib):
                lib = BasisLibrary.from_exponents(
                    [(0,) * dimension] + [f.exponents for f in lib], allow_constant=True
                )
            return lib
        if fallback is not None and not self.include_constant:
            return fallback
        degree = 3 if dimension <= 3 else 1
        return monomial_library(dimension, degree, self.include_constant)


class ExperimentSection(_Section):
    m_values: List[int] = Field(default_factory=lambda: [13, 25, 49])
    repetitions: int = Field(200, ge=1)


class OutputConfig(_Section):
    timeseries: Optional[str] = None
    model: Optional[str] = None
    trace: Optional[str] = None
    report: Optional[str] = None


class RunConfig(_Section):
    system: SystemConfig = Field(default_factory=SystemConfig)
    sampling: SamplingConfig = Field(default_factory=SamplingConfig)
    identification: IdentificationConfig = Field(default_factory=IdentificationConfig)
    experiment: ExperimentSection = Field(default_factory=ExperimentSection)
    output: OutputConfig = Field(default_factory=OutputConfig)
    threads: int = Field(1, ge=1)


def _format_validation(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        parts.append(f"{loc}: {err['msg']}")
    return "; ".join(parts)


def load_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Load a JSON config and apply dotted-key overrides such as ``{"sampling.m": 25}``."""
    data: dict = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be an object")
    for dotted, value in (overrides or {}).items():
        if value is None:
            continue
        node = data
        *parents, leaf = dotted.split(".")
        for key in parents:
            node = node.setdefault(key, {})
            if not isinstance(node, dict):
                raise ConfigError(f"config key {key!r} must be an object")
        node[leaf] = value
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(_format_validation(exc)) from None
