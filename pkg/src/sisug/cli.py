"""Command-line interface: ``simulate``, ``identify`` and ``experiment``.

Status lines go to stderr; data goes to ``--out`` or stdout. On failure the
last stderr line reads ``sisug: error[<category>]: <message>`` and the exit
status is nonzero (2 config, 3 input, 4 spline, 5 identification,
6 simulation, 1 other).
"""

from __future__ import annotations

import argparse
import secrets
import sys
from pathlib import Path

from . import io as sio
from .bench import ExperimentConfig, run_experiment
from .config import RunConfig, load_config
from .errors import ConfigError, DataError, SisugError
from .growth import identify
from .simulate import SamplingScheme, integrate, sample_times
from .spline import MIN_KNOTS


def _status(msg: str):
    print(msg, file=sys.stderr)


def _emit(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from None


def _resolve_seed(seed: int | None) -> int:
    if seed is None:
        seed = secrets.randbits(32)
        _status(f"seed: {seed} (generated)")
    else:
        _status(f"seed: {seed}")
    return seed


def _simulate_samples(cfg: RunConfig, seed: int):
    system = cfg.system.build()
    if cfg.sampling.m < MIN_KNOTS:
        raise ConfigError(
            f"m={cfg.sampling.m}: the spline needs at least {MIN_KNOTS} samples"
        )
    scheme = SamplingScheme(
        cfg.sampling.m, cfg.sampling.horizon, cfg.sampling.jitter_fraction, seed, system.t0
    )
    return system, integrate(system, sample_times(scheme))


def cmd_simulate(args) -> int:
    cfg = _load(args)
    seed = _resolve_seed(cfg.sampling.seed)
    system, samples = _simulate_samples(cfg, seed)
    comments = [f"system={system.name} m={samples.m} seed={seed}"]
    _emit(sio.timeseries_to_csv(samples, comments), cfg.output.timeseries)
    _status(f"{system.name}: {samples.m} samples over [{samples.times[0]:g}, {samples.times[-1]:g}]")
    return 0


def cmd_identify(args) -> int:
    cfg = _load(args)
    meta = {"stop_factor": cfg.identification.stop_factor}
    if args.input is not None:
        samples = sio.read_timeseries(args.input)
        fallback = None
        if cfg.system.is_custom or args.system is not None:
            fallback = cfg.system.build().library
        meta.update(source=str(args.input), seed=None)
    else:
        seed = _resolve_seed(cfg.sampling.seed)
        system, samples = _simulate_samples(cfg, seed)
        fallback = system.library
        meta.update(
            source=f"simulated:{system.name}",
            seed=seed,
            m=cfg.sampling.m,
            jitter_fraction=cfg.sampling.jitter_fraction,
        )
    if samples.m < MIN_KNOTS:
        raise DataError(f"need at least {MIN_KNOTS} samples, got {samples.m}")
    library = cfg.identification.library(samples.dimension, fallback)
    model, traces = identify(
        samples,
        library,
        cfg.identification.stop_factor,
        cfg.identification.k_max,
        threads=cfg.threads,
    )
    _emit(sio.model_to_json(model, traces, **meta), cfg.output.model)
    if cfg.output.trace is not None:
        _emit(sio.trace_to_csv(traces), cfg.output.trace)
    for i in range(model.dimension):
        _status(f"k={model.ks[i]}  {model.equation(i)}")
    return 0


def cmd_experiment(args) -> int:
    cfg = _load(args)
    if cfg.system.is_custom:
        raise ConfigError("experiment supports builtin systems only")
    seed = _resolve_seed(cfg.sampling.seed)
    exp = ExperimentConfig(
        system=cfg.system.name,
        m_values=tuple(cfg.experiment.m_values),
        repetitions=cfg.experiment.repetitions,
        jitter_fraction=cfg.sampling.jitter_fraction,
        base_seed=seed,
        degree=cfg.identification.degree,
        stop_factor=cfg.identification.stop_factor,
        k_max=cfg.identification.k_max,
        horizon=cfg.sampling.horizon,
    )
    report = run_experiment(exp, threads=cfg.threads)
    comments = [
        f"system={cfg.system.name} seed={seed} jitter_fraction={exp.jitter_fraction}"
    ]
    _emit(sio.report_to_csv(report, comments), cfg.output.report)
    _status(f"{'m':>5} {'mean_rmse':>12} {'std_rmse':>12} {'support':>8} {'fail':>5}")
    for row in report.rows:
        _status(
            f"{row.m:>5} {row.mean_rmse:>12.4e} {row.std_rmse:>12.4e} "
            f"{row.support_rate:>8.3f} {row.failures:>5}"
        )
    return 0


def _load(args) -> RunConfig:
    m = getattr(args, "m", None)
    overrides = {
        "system.name": args.system,
        "sampling.jitter_fraction": args.jitter,
        "sampling.seed": args.seed,
        "sampling.horizon": args.horizon,
        "identification.degree": args.degree,
        "identification.stop_factor": args.stop_factor,
        "identification.k_max": args.k_max,
        "threads": args.threads,
    }
    if args.command == "experiment":
        overrides["experiment.m_values"] = m
        overrides["experiment.repetitions"] = args.repetitions
        overrides["output.report"] = args.out
    else:
        overrides["sampling.m"] = m
    if args.command == "simulate":
        overrides["output.timeseries"] = args.out
    if args.command == "identify":
        overrides["output.model"] = args.out
        overrides["output.trace"] = args.trace
        overrides["identification.library_file"] = args.library
    return load_config(args.config, overrides)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sisug",
        description="Sparse continuous-time system identification by subset growth.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--system", help="builtin system: ring6 or vdp")
    common.add_argument("--jitter", type=float, help="jitter as a fraction of the period")
    common.add_argument("--seed", type=int)
    common.add_argument("--horizon", type=float, help="time span of the samples")
    common.add_argument("--degree", type=int, help="monomial library max degree")
    common.add_argument("--stop-factor", type=float)
    common.add_argument("--k-max", type=int)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--threads", type=int)

    p = sub.add_parser("simulate", parents=[common], help="write a sampled trajectory CSV")
    p.add_argument("--m", type=int, help="number of samples including t0")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("identify", parents=[common], help="recover a sparse model")
    p.add_argument("--m", type=int, help="number of samples when simulating")
    p.add_argument("--input", help="time-series CSV (t,x1,...,xn); simulates if absent")
    p.add_argument("--library", help="custom library file, one exponent vector per line")
    p.add_argument("--trace", help="growth trace CSV path")
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("experiment", parents=[common], help="RMSE sweep over m")
    p.add_argument("--m", type=int, nargs="+", help="sample counts to sweep")
    p.add_argument("--repetitions", type=int)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SisugError as exc:
        _status(f"sisug: error[{exc.category}]: {exc}")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
