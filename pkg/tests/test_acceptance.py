"""Exit criteria. Run with ``pytest tests/test_acceptance.py``; one line per criterion is printed."""

import numpy as np
import pytest
from scipy.linalg import expm

from conftest import explicit_loo
from sisug import (
    SamplingScheme,
    TimeSeries,
    build_design_matrix,
    fit_spline,
    identify,
    integrate,
    pseudoinverse_solve,
    loocv_error,
    ring6,
    sample_times,
    vanderpol,
)
from sisug.bench import ExperimentConfig, rmse, run_experiment, support_match
from sisug.cli import main
from sisug.growth import identify_from_derivatives
from sisug.spline import spline_derivative_at_knots

LOO_RTOL = 1e-9
RING_RMSE_MAX = 0.02
VDP_RMSE_MAX = 0.1
SPLINE_RTOL = 1e-9
RING_EXPM_TOL = 1e-7
VDP_HALVING_TOL = 1e-6
EXACT_Z_TOL = 1e-8


def _even(system):
    return integrate(system, sample_times(SamplingScheme(13, jitter_fraction=0.0)))


def test_1_loocv_trick_equivalence(criterion):
    rng = np.random.default_rng(20240601)
    worst, n = 0.0, 0
    while n < 200:
        k = int(rng.integers(1, 6))
        m = int(rng.integers(k + 2, 21))
        theta = rng.normal(size=(m, k)) * rng.uniform(0.1, 10, size=k)
        y = rng.normal(size=m)
        _, fitted, lev = pseudoinverse_solve(theta, y)
        if lev.max() >= 0.99:
            continue
        closed = loocv_error(fitted, y, lev)
        explicit = explicit_loo(theta, y)
        worst = max(worst, abs(closed - explicit) / explicit)
        n += 1
    criterion(1, "LOOCV closed form vs explicit refits", worst <= LOO_RTOL,
              f"{n} instances, worst rel diff {worst:.2e} (tol {LOO_RTOL:g})")


def test_2_ring_recovery(criterion):
    system = ring6()
    model, _ = identify(_even(system), system.library)
    err = rmse(system.Z, model.coefficients)
    zeros_exact = bool(np.all(model.coefficients[system.Z == 0] == 0.0))
    ok = support_match(model, system) and model.ks == (2,) * 6 and zeros_exact and err <= RING_RMSE_MAX
    criterion(2, "ring recovery m-1=12", ok,
              f"k={model.ks}, exact zeros={zeros_exact}, RMSE={err:.4f} (max {RING_RMSE_MAX})")


def test_3_vdp_recovery(criterion):
    system = vanderpol()
    model, _ = identify(_even(system), system.library)
    err = rmse(system.Z, model.coefficients)
    supports = [set(s) for s in model.supports]
    ok = (
        supports == [{(0, 1)}, {(1, 0), (0, 1), (2, 1)}]
        and model.ks == (1, 3)
        and err <= VDP_RMSE_MAX
    )
    criterion(3, "Van der Pol recovery m-1=12", ok,
              f"k={model.ks}, RMSE={err:.4f} (max {VDP_RMSE_MAX})")


@pytest.mark.parametrize("system", ["ring6", "vdp"])
def test_4_rmse_trend(system, criterion):
    cfg = ExperimentConfig(system, (13, 25, 49), repetitions=50, jitter_fraction=0.25, base_seed=2024)
    report = run_experiment(cfg)
    means = [r.mean_rmse for r in report.rows]
    rates = [r.support_rate for r in report.rows]
    ok = all(a > b for a, b in zip(means, means[1:])) and rates[-1] >= rates[0]
    criterion(4, f"RMSE trend over m ({system})", ok,
              "mean RMSE " + " > ".join(f"{v:.2e}" for v in means)
              + f"; support rate {rates[0]:.2f} -> {rates[-1]:.2f}")


def test_5_spline_exactness(criterion):
    rng = np.random.default_rng(5)
    worst = 0.0
    for trial in range(50):
        m = int(rng.integers(4, 16))
        t = np.concatenate([[0.0], np.cumsum(rng.uniform(0.05, 1.5, m - 1))])
        poly = np.polynomial.Polynomial(rng.uniform(-3, 3, 4))
        s = fit_spline(t, poly(t))
        grid = np.linspace(t[0], t[-1], 101)
        val_scale = np.max(np.abs(poly(grid)))
        der_scale = np.max(np.abs(poly.deriv()(t)))
        worst = max(
            worst,
            np.max(np.abs(s(grid) - poly(grid))) / val_scale,
            np.max(np.abs(spline_derivative_at_knots(s) - poly.deriv()(t))) / der_scale,
        )
    criterion(5, "spline exact on cubics", worst <= SPLINE_RTOL,
              f"worst relative error {worst:.2e} (tol {SPLINE_RTOL:g})")


def test_6_integrator_oracles(criterion):
    ring = ring6()
    t = np.linspace(0, 6, 61)
    exact = np.array([expm(ring.Z * tj) @ ring.initial_state for tj in t])
    ring_err = np.max(np.abs(integrate(ring, t).states - exact))
    vdp = vanderpol()
    a = integrate(vdp, t).states
    b = integrate(vdp, t, substeps=2).states
    vdp_err = np.max(np.abs(a - b))
    ok = ring_err <= RING_EXPM_TOL and vdp_err <= VDP_HALVING_TOL
    criterion(6, "integrator oracles", ok,
              f"ring vs expm {ring_err:.1e} (tol {RING_EXPM_TOL:g}); "
              f"vdp step halving {vdp_err:.1e} (tol {VDP_HALVING_TOL:g})")


def test_7_exact_derivative_recovery(criterion):
    details, ok = [], True
    for system in (ring6(), vanderpol()):
        samples = _even(system)
        dx = build_design_matrix(system.library, samples).values @ system.Z.T
        model, _ = identify_from_derivatives(samples, dx, system.library)
        err = np.max(np.abs(model.coefficients - system.Z))
        ok &= err <= EXACT_Z_TOL and support_match(model, system)
        details.append(f"{system.name} max|dZ|={err:.1e}")
    criterion(7, "exact-derivative recovery", ok, ", ".join(details) + f" (tol {EXACT_Z_TOL:g})")


def test_8_determinism(tmp_path, criterion, capsys):
    commands = {
        "simulate": ["simulate", "--system", "vdp", "--m", "25", "--seed", "7"],
        "identify": ["identify", "--system", "ring6", "--m", "25", "--seed", "11"],
        "experiment": ["experiment", "--system", "ring6", "--repetitions", "50", "--seed", "3"],
    }
    mismatched = []
    for name, args in commands.items():
        outputs = []
        for run, threads in enumerate(["1", "1", "8"]):
            out = tmp_path / f"{name}-{run}.out"
            extra = ["--trace", str(tmp_path / f"{name}-{run}.trace")] if name == "identify" else []
            code = main(args + ["--threads", threads, "--out", str(out)] + extra)
            assert code == 0
            files = [out] + ([tmp_path / f"{name}-{run}.trace"] if extra else [])
            outputs.append(b"".join(f.read_bytes() for f in files))
        if not outputs[0] == outputs[1] == outputs[2]:
            mismatched.append(name)
    capsys.readouterr()
    criterion(8, "byte-identical outputs (reruns, threads 1 vs 8)", not mismatched,
              "simulate, identify, experiment identical" if not mismatched else f"differs: {mismatched}")
