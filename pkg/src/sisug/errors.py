"""Exception hierarchy. ``category`` is what the CLI reports on failure."""


class SisugError(Exception):
    category = "error"
    exit_code = 1


class ConfigError(SisugError, ValueError):
    category = "config"
    exit_code = 2


class DataError(SisugError, ValueError):
    category = "input"
    exit_code = 3


class SplineError(DataError):
    category = "spline"
    exit_code = 4


class GrowthError(SisugError, RuntimeError):
    category = "identification"
    exit_code = 5


class SimulationError(SisugError, RuntimeError):
    category = "simulation"
    exit_code = 6
