import numpy as np
import pytest

from sisug import SamplingScheme, integrate, ring6, sample_times, vanderpol


def explicit_loo(theta, y):
    """Mean squared held-out error from m separate least-squares refits."""
    m = theta.shape[0]
    errs = np.empty(m)
    for j in range(m):
        keep = np.arange(m) != j
        coef = np.linalg.lstsq(theta[keep], y[keep], rcond=None)[0]
        errs[j] = y[j] - theta[j] @ coef
    return float(np.mean(errs**2))


@pytest.fixture(scope="session")
def ring_even():
    system = ring6()
    times = sample_times(SamplingScheme(13, jitter_fraction=0.0))
    return system, integrate(system, times)


@pytest.fixture(scope="session")
def vdp_even():
    system = vanderpol()
    times = sample_times(SamplingScheme(13, jitter_fraction=0.0))
    return system, integrate(system, times)


ACCEPTANCE_RESULTS = []


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion."""

    def record(number, name, ok, detail=""):
        ACCEPTANCE_RESULTS.append((number, name, bool(ok), detail))
        assert ok, f"criterion {number} ({name}) failed: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, ok, detail in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] {number}. {name}: {detail}")
