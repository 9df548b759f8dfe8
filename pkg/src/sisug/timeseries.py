from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class TimeSeries:
    """Sampled trajectory: ``states[j]`` is the state at ``times[j]``."""

    times: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states, dtype=float)
        if states.ndim == 1:
            states = states[:, None]
        if times.ndim != 1 or states.ndim != 2:
            raise DataError("times must be 1-D and states 2-D")
        if states.shape[0] != times.shape[0]:
            raise DataError(
                f"{times.shape[0]} time stamps but {states.shape[0]} state rows"
            )
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(states))):
            raise DataError("time series contains non-finite values")
        bad = np.flatnonzero(np.diff(times) <= 0)
        if bad.size:
            raise DataError(
                f"times must be strictly increasing (sample {bad[0] + 1} at "
                f"t={times[bad[0] + 1]!r} does not follow t={times[bad[0]]!r})"
            )
        times.setflags(write=False)
        states.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)

    @property
    def m(self) -> int:
        return self.times.shape[0]

    @property
    def dimension(self) -> int:
        return self.states.shape[1]

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return np.array_equal(self.times, other.times) and np.array_equal(
            self.states, other.states
        )

    __hash__ = None
