import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from sisug import (
    BasisLibrary,
    ConfigError,
    PolynomialSystem,
    SamplingScheme,
    SimulationError,
    integrate,
    ring6,
    sample_times,
    vanderpol,
)


def test_ring_matrix_entries():
    Z = ring6().Z
    assert Z[1, 0] == 1 and Z[1, 1] == -1 and Z[2, 1] == -1
    assert np.count_nonzero(Z) == 12
    assert set(np.unique(Z)) <= {-1.0, 0.0, 1.0}


def test_vdp_second_row():
    s = vanderpol()
    idx = np.flatnonzero(s.Z[1])
    assert {s.library[j].exponents for j in idx} == {(1, 0), (0, 1), (2, 1)}
    coeffs = {s.library[j].exponents: s.Z[1, j] for j in idx}
    assert coeffs == {(1, 0): -1.0, (0, 1): 1.0, (2, 1): -1.0}


def test_vdp_rhs_at_initial_state():
    s = vanderpol()
    np.testing.assert_allclose(s.rhs(s.initial_state), [1.0, 1.0])


def test_even_times():
    t = sample_times(SamplingScheme(13, jitter_fraction=0.0))
    np.testing.assert_allclose(t, np.arange(13) * 0.5, atol=1e-15)


@settings(max_examples=50, deadline=None)
@given(
    m=st.integers(2, 80),
    jitter=st.floats(0.0, 0.499),
    seed=st.integers(0, 2**32 - 1),
)
def test_jittered_times_bounded_and_increasing(m, jitter, seed):
    scheme = SamplingScheme(m, jitter_fraction=jitter, seed=seed)
    t = sample_times(scheme)
    T = scheme.period
    d = np.arange(m)
    assert t[0] == 0.0
    assert np.all(np.abs(t - d * T) <= jitter * T + 1e-12)
    assert np.all(np.diff(t) >= T * (1 - 2 * jitter) - 1e-12)
    assert np.all(np.diff(t) > 0)


def test_seed_reproducible():
    a = sample_times(SamplingScheme(13, seed=42))
    b = sample_times(SamplingScheme(13, seed=42))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, sample_times(SamplingScheme(13, seed=43)))


def test_bad_jitter():
    with pytest.raises(ConfigError):
        SamplingScheme(13, jitter_fraction=0.5)


def _decay():
    return PolynomialSystem("decay", BasisLibrary.from_exponents([(1,)]), [[-1.0]], [1.0])


def test_decay_analytic():
    ts = integrate(_decay(), [0.0, 1.0])
    assert ts.states[1, 0] == pytest.approx(np.exp(-1.0), abs=1e-8)


def test_ring_matches_matrix_exponential():
    s = ring6()
    t = np.arange(13) * 0.5
    ts = integrate(s, t)
    exact = np.array([expm(s.Z * tj) @ s.initial_state for tj in t])
    assert np.max(np.abs(ts.states - exact)) <= 1e-7


def test_random_linear_system_matches_matrix_exponential():
    rng = np.random.default_rng(8)
    A = rng.normal(size=(3, 3)) - 2 * np.eye(3)
    s = PolynomialSystem("lin", BasisLibrary.from_exponents(np.eye(3, dtype=int)), A, [1, -1, 0.5])
    t = np.sort(np.concatenate([[0.0], rng.uniform(0, 6, 10)]))
    ts = integrate(s, t)
    exact = np.array([expm(A * tj) @ s.initial_state for tj in t])
    assert np.max(np.abs(ts.states - exact)) <= 1e-7


def test_vdp_step_halving():
    s = vanderpol()
    t = np.arange(13) * 0.5
    a = integrate(s, t).states
    b = integrate(s, t, substeps=2).states
    assert np.max(np.abs(a - b)) <= 1e-6


def test_fourth_order_convergence():
    s = vanderpol()
    t = np.linspace(0, 6, 7)
    x = [integrate(s, t, h_max=0.2, substeps=q).states for q in (1, 2, 4)]
    ratio = np.max(np.abs(x[0] - x[1])) / np.max(np.abs(x[1] - x[2]))
    assert 12 <= ratio <= 20


def test_blow_up_detected():
    s = PolynomialSystem("blow", BasisLibrary.from_exponents([(2,)]), [[1.0]], [1.0])
    with pytest.raises(SimulationError):
        integrate(s, [0.0, 2.0])


def test_initial_time_must_match():
    with pytest.raises(SimulationError):
        integrate(_decay(), [0.5, 1.0])
