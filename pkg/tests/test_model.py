import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from randnet.errors import ConfigurationError
from randnet.model import (ModelParams, TimeGrid, builtin_drift, builtin_kernel,
                           check_time_horizon, sample_disorder, sample_initial, sample_noise)


def params(**kw):
    base = dict(j_bar=1.0, sigma=1.0, lam=1.0, horizon=0.4, n_steps=10)
    base.update(kw)
    return ModelParams(**base)


KUR = builtin_kernel("kuramoto")


def test_horizon_admissible():
    report = check_time_horizon(params(), KUR)
    assert report.value == pytest.approx(0.8, rel=1e-15)
    assert report.admissible


def test_horizon_zero_variance():
    report = check_time_horizon(params(sigma=0.0, horizon=1e6), KUR)
    assert report.value == 0.0 and report.admissible


def test_horizon_strict_inequality():
    report = check_time_horizon(params(horizon=0.5), KUR)
    assert report.value == 1.0
    assert not report.admissible


@settings(max_examples=200)
@given(st.floats(0.01, 3), st.floats(0.01, 3), st.floats(0.1, 3), st.floats(0.01, 3),
       st.floats(1.01, 2))
def test_horizon_monotone(sigma, T, lam, bound, factor):
    k = builtin_kernel("kuramoto")
    k2 = type(k)(k.name, k.eval, bound * factor, 1, 1)
    k1 = type(k)(k.name, k.eval, bound, 1, 1)
    base = check_time_horizon(params(sigma=sigma, horizon=T, lam=lam), k1).value
    assert check_time_horizon(params(sigma=sigma * factor, horizon=T, lam=lam), k1).value > base
    assert check_time_horizon(params(sigma=sigma, horizon=T * factor, lam=lam), k1).value > base
    assert check_time_horizon(params(sigma=sigma, horizon=T, lam=lam), k2).value > base
    assert check_time_horizon(params(sigma=sigma, horizon=T, lam=lam * factor), k1).value < base


@pytest.mark.parametrize("field,value", [("lam", -1.0), ("horizon", 0.0), ("sigma", -0.1),
                                         ("n_steps", 0), ("n_steps", 2.5)])
def test_params_validation(field, value):
    with pytest.raises(ConfigurationError):
        params(**{field: value})


def test_kernel_values():
    assert KUR(0.0, np.pi / 2) == 1.0
    assert KUR(1.234, 1.234) == 0.0
    sig = builtin_kernel("sigmoid_gain", 1.0)
    for x in (-3.0, 0.0, 5.0):
        assert sig(x, 2.0) == pytest.approx(0.96403, abs=1e-5)
        assert sig(x, 2.0) == np.tanh(2.0)
    assert builtin_kernel("bump")(0.3, 0.3) == 1.0


def test_unknown_kernel():
    with pytest.raises(ConfigurationError):
        builtin_kernel("coulomb")
    with pytest.raises(ConfigurationError):
        builtin_drift("nope")


@pytest.mark.parametrize("name,gain", [("kuramoto", 1.0), ("sigmoid_gain", 2.5), ("bump", 1.0)])
def test_kernel_declared_constants(name, gain):
    k = builtin_kernel(name, gain)
    rng = np.random.default_rng(0)
    x, y = rng.uniform(-10, 10, (2, 10 ** 5))
    dx, dy = rng.uniform(-1, 1, (2, 10 ** 5))
    assert np.all(np.abs(k(x, y)) <= k.sup_bound)
    assert np.all(np.abs(k(x + dx, y) - k(x, y)) <= k.lip_x * np.abs(dx) + 1e-12)
    assert np.all(np.abs(k(x, y + dy) - k(x, y)) <= k.lip_y * np.abs(dy) + 1e-12)


@pytest.mark.parametrize("name", ["zero", "decay", "frequency"])
def test_drift_lipschitz(name):
    f = builtin_drift(name, 1.7)
    rng = np.random.default_rng(1)
    r = rng.random((1000, 2))
    x, dx = rng.normal(size=(2, 1000))
    assert np.all(np.abs(f(r, 0.3, x + dx) - f(r, 0.3, x)) <= f.lip * np.abs(dx) + 1e-12)


def test_time_grid():
    g = TimeGrid(0.7, 13)
    assert np.all(np.diff(g.nodes) > 0)
    assert g.dt * g.n_steps == pytest.approx(0.7, abs=4 * np.finfo(float).eps)
    assert g.nodes[0] == 0.0


def test_initial_constant():
    x0, pos = sample_initial(params(init_center=2.5), 7, 3)
    assert np.all(x0 == 2.5)
    assert pos.shape == (7, 0)


def test_initial_law_of_large_numbers():
    p = params(init_spread=1.0, init_center=0.5, init_slope=1.0, position_dim=2)
    x0, pos = sample_initial(p, 10 ** 5, 11)
    # E[x0_bar(r)] = 0.5 + 1.0 * (0.5 + 0.5)
    assert abs(x0.mean() - 1.5) < 3 * np.sqrt((1.0 + 2 / 12) / 10 ** 5)
    assert pos.min() >= 0 and pos.max() < 1


def test_initial_prefix_consistent():
    a, pa = sample_initial(params(init_spread=1.0, position_dim=1), 5, 9)
    b, pb = sample_initial(params(init_spread=1.0, position_dim=1), 50, 9)
    np.testing.assert_array_equal(a, b[:5])
    np.testing.assert_array_equal(pa, pb[:5])


def test_noise_reproducible_and_scaled():
    a = sample_noise(100, 200, 0.01, 5)
    np.testing.assert_array_equal(a, sample_noise(100, 200, 0.01, 5))
    assert a.var() == pytest.approx(0.01, rel=0.05)


def test_disorder_deterministic_when_sigma_zero():
    J = sample_disorder(6, params(sigma=0.0, j_bar=1.3), 2)
    assert np.all(J.entries == 1.3 / 6)


def test_disorder_single_entry():
    vals = np.array([sample_disorder(1, params(j_bar=0.5, sigma=2.0), s).entries[0, 0]
                     for s in range(4000)])
    assert abs(vals.mean() - 0.5) < 3 * 2 / np.sqrt(4000)
    assert vals.var() == pytest.approx(4.0, rel=0.1)


def test_disorder_statistics():
    p = params(j_bar=1.0, sigma=1.0)
    vals = np.array([sample_disorder(100, p, s).entries[0, 0] for s in range(10 ** 4)])
    assert abs(vals.mean() - 0.01) < 3 * 0.1 / 100
    assert vals.var(ddof=1) == pytest.approx(0.01, rel=0.05)


def test_disorder_reproducible():
    p = params()
    np.testing.assert_array_equal(sample_disorder(30, p, 8).entries,
                                  sample_disorder(30, p, 8).entries)
