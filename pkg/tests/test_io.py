import csv
import io
import json
import math

import numpy as np
import pytest

from sisug import DataError, TimeSeries, identify
from sisug import io as sio
from sisug.bench import ExperimentConfig, run_experiment


def test_timeseries_round_trip_is_lossless():
    rng = np.random.default_rng(0)
    ts = TimeSeries(np.cumsum(rng.uniform(0.1, 1, 9)), rng.normal(size=(9, 3)) * 1e-3)
    text = sio.timeseries_to_csv(ts, comments=["seed=1"])
    assert text.splitlines()[1] == "t,x1,x2,x3"
    assert sio.timeseries_from_csv(text) == ts


@pytest.mark.parametrize(
    "text,match",
    [
        ("t,x1\n0,1\n1,2\n0.5,3\n", ":4:"),
        ("t,x1\n0,1\n1,abc\n", ":3: non-numeric"),
        ("t,x1\n0,1\n1\n", ":3: expected 2 fields"),
        ("time,x1\n0,1\n", "header"),
        ("t,x1\n", "no data"),
    ],
)
def test_timeseries_parse_errors(text, match):
    with pytest.raises(DataError, match=match):
        sio.timeseries_from_csv(text, "f.csv")


def test_trace_csv(ring_even):
    system, samples = ring_even
    _, traces = identify(samples, system.library)
    rows = list(csv.DictReader(io.StringIO(sio.trace_to_csv(traces))))
    assert list(rows[0]) == list(sio.TRACE_COLUMNS)
    x1 = [r for r in rows if r["variable"] == "x1"]
    # k = 1, 2, 3 evaluated before stopping
    assert len(x1) == 6 + 15 + 20
    selected = [r for r in x1 if r["is_selected"] == "true"]
    assert len(selected) == 1 and selected[0]["subset"] == "0;5"
    assert sum(r["is_k_minimum"] == "true" for r in x1) == 3


def test_report_csv():
    report = run_experiment(ExperimentConfig("vdp", (13,), repetitions=1, jitter_fraction=0.0))
    text = sio.report_to_csv(report, comments=["seed=0"])
    lines = text.splitlines()
    assert lines[0] == "# seed=0"
    assert lines[1] == ",".join(sio.REPORT_COLUMNS)
    assert lines[2].startswith("vdp,13,1,")


def test_model_json(vdp_even):
    system, samples = vdp_even
    model, traces = identify(samples, system.library)
    doc = json.loads(sio.model_to_json(model, traces, seed=3))
    assert doc["seed"] == 3
    assert doc["library"][6] == [2, 1]
    v2 = doc["variables"][1]
    assert v2["k"] == 3
    assert sorted(map(tuple, v2["support"])) == [(0, 1), (1, 0), (2, 1)]
    assert v2["criterion_fired"] and v2["stop_k"] == 4
    assert len(v2["epsilon_by_k"]) == 4
    assert np.array_equal(np.array(doc["Z"]), model.coefficients)


def test_fmt():
    assert sio.fmt(0.1) == "0.10000000000000001"
    assert sio.fmt(math.inf) == "inf"
    assert float(sio.fmt(1 / 3)) == 1 / 3
