"""File formats: time-series CSV, growth-trace CSV, report CSV and model JSON.

Floats are written with 17 significant digits so every file round-trips
losslessly. Lines starting with ``#`` in CSV inputs are comments.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Sequence

import numpy as np

from .bench import ExperimentReport
from .errors import DataError
from .growth import GrowthTrace, SparseModel
from .timeseries import TimeSeries

REPORT_COLUMNS = (
    "system",
    "m",
    "repetitions",
    "mean_rmse",
    "std_rmse",
    "support_rate",
    "failures",
)
TRACE_COLUMNS = ("variable", "k", "subset", "epsilon", "is_k_minimum", "is_selected")


def fmt(x: float) -> str:
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return f"{x:.17g}"


def _comments(comments: Sequence[str]) -> str:
    return "".join(f"# {c}\n" for c in comments)


def timeseries_to_csv(ts: TimeSeries, comments: Sequence[str] = ()) -> str:
    lines = [",".join(["t"] + [f"x{i + 1}" for i in range(ts.dimension)])]
    for t, row in zip(ts.times, ts.states):
        lines.append(",".join([fmt(t)] + [fmt(v) for v in row]))
    return _comments(comments) + "\n".join(lines) + "\n"


def timeseries_from_csv(text: str, source: str = "<csv>") -> TimeSeries:
    """Parse ``t,x1,...,xn``; errors name the offending line."""
    rows = []
    header = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cells = [c.strip() for c in line.split(",")]
        if header is None:
            header = cells
            if not header or header[0] != "t" or len(header) < 2:
                raise DataError(f"{source}:{lineno}: header must be t,x1,...,xn")
            continue
        if len(cells) != len(header):
            raise DataError(
                f"{source}:{lineno}: expected {len(header)} fields, got {len(cells)}"
            )
        try:
            values = [float(c) for c in cells]
        except ValueError:
            raise DataError(f"{source}:{lineno}: non-numeric field") from None
        if not all(math.isfinite(v) for v in values):
            raise DataError(f"{source}:{lineno}: non-finite value")
        if rows and values[0] <= rows[-1][1][0]:
            raise DataError(
                f"{source}:{lineno}: t={cells[0]} is not greater than the "
                f"previous time stamp (times must be strictly increasing)"
            )
        rows.append((lineno, values))
    if header is None:
        raise DataError(f"{source}: no header found")
    if not rows:
        raise DataError(f"{source}: no data rows")
    data = np.array([v for _, v in rows])
    return TimeSeries(data[:, 0], data[:, 1:])


def write_timeseries(path, ts: TimeSeries, comments: Sequence[str] = ()):
    Path(path).write_text(timeseries_to_csv(ts, comments))


def read_timeseries(path) -> TimeSeries:
    return timeseries_from_csv(Path(path).read_text(), str(path))


def trace_to_csv(traces: Sequence[GrowthTrace]) -> str:
    """One row per evaluated subset; ``subset`` holds ``;``-joined 0-based column indices."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    for trace in traces:
        minima = {(r.k, r.subset) for r in trace.minima}
        for rec in trace.records:
            writer.writerow(
                [
                    f"x{trace.variable + 1}",
                    rec.k,
                    ";".join(str(i) for i in rec.subset),
                    fmt(rec.epsilon),
                    str((rec.k, rec.subset) in minima).lower(),
                    str(rec == trace.selected).lower(),
                ]
            )
    return buf.getvalue()


def report_to_csv(report: ExperimentReport, comments: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for row in report.rows:
        writer.writerow(
            [
                row.system,
                row.m,
                row.repetitions,
                fmt(row.mean_rmse),
                fmt(row.std_rmse),
                fmt(row.support_rate),
                row.failures,
            ]
        )
    return _comments(comments) + buf.getvalue()


def _json_float(x: float):
    return None if not math.isfinite(x) else float(x)


def model_to_dict(
    model: SparseModel,
    traces: Sequence[GrowthTrace] = (),
    **metadata,
) -> dict:
    """JSON-ready model. Terms are keyed by exponent vectors, not column indices."""
    lib = model.library
    variables = []
    for i in range(model.dimension):
        idx = model.support_indices(i)
        entry = {
            "variable": f"x{i + 1}",
            "k": len(idx),
            "support": [list(lib[j].exponents) for j in idx],
            "terms": [
                {
                    "exponents": list(lib[j].exponents),
                    "name": lib[j].name,
                    "coefficient": float(model.coefficients[i, j]),
                }
                for j in idx
            ],
            "epsilon": _json_float(model.epsilons[i]) if model.epsilons else None,
        }
        if i < len(traces):
            tr = traces[i]
            entry["criterion_fired"] = tr.criterion_fired
            entry["stop_k"] = tr.stop_k
            entry["epsilon_by_k"] = [
                {
                    "k": r.k,
                    "subset": list(r.subset),
                    "epsilon": _json_float(r.epsilon),
                }
                for r in tr.minima
            ]
        variables.append(entry)
    return {
        **metadata,
        "library": [list(f.exponents) for f in lib],
        "library_names": lib.names,
        "Z": [[float(v) for v in row] for row in model.coefficients],
        "variables": variables,
    }


def model_to_json(model: SparseModel, traces: Sequence[GrowthTrace] = (), **metadata) -> str:
    return json.dumps(model_to_dict(model, traces, **metadata), indent=2, allow_nan=False) + "\n"
