import mpmath
import numpy as np
import pytest
from numpy.testing import assert_allclose

from svarkit.errors import ConfigError, DegenerateError, LengthError, ParseError
from svarkit.hac import (
    KernelSpec,
    autocovariances,
    kernel_weight,
    long_run_variance,
    nw_auto_bandwidth,
)

KINDS = ("quadratic_spectral", "bartlett", "truncated")


def _ar1(phi, n, rng, burn=200):
    e = rng.standard_normal(n + burn)
    y = np.empty_like(e)
    y[0] = e[0]
    for t in range(1, e.size):
        y[t] = phi * y[t - 1] + e[t]
    return y[burn:]


def _qs_mp(x):
    mpmath.mp.dps = 50
    x = mpmath.mpf(x)
    z = 6 * mpmath.pi * x / 5
    return 25 / (12 * mpmath.pi**2 * x**2) * (mpmath.sin(z) / z - mpmath.cos(z))


def test_kernel_point_values():
    assert kernel_weight("quadratic_spectral", 0.0) == 1.0
    assert kernel_weight("bartlett", 0.5) == 0.5
    assert kernel_weight("truncated", 1.0) == 1.0
    assert kernel_weight("truncated", 1.0001) == 0.0


@pytest.mark.parametrize("x", [0.5, 1e-4, 0.83, 2.0, 7.3])
def test_qs_kernel_against_high_precision(x):
    assert kernel_weight("quadratic_spectral", x) == pytest.approx(float(_qs_mp(x)), rel=1e-9, abs=1e-15)


@pytest.mark.parametrize("kind", KINDS)
def test_kernel_properties(kind):
    x = np.linspace(-10, 10, 2001)
    k = kernel_weight(kind, x)
    assert kernel_weight(kind, 0.0) == 1.0
    assert_allclose(k, kernel_weight(kind, -x))
    assert np.all(np.abs(k) <= 1.0 + 1e-12)


def test_kernel_spec_validation():
    with pytest.raises(ConfigError):
        KernelSpec("parzen")
    with pytest.raises(ConfigError):
        KernelSpec("bartlett", -1.0)
    with pytest.raises(ConfigError):
        KernelSpec("bartlett", "fast")
    assert KernelSpec("quadratic_spectral", 4.6).bandwidth == 4.6


def test_autocovariances_fft_matches_direct():
    rng = np.random.default_rng(0)
    e = rng.standard_normal((300, 2))
    direct = np.stack([e[j:].T @ e[: 300 - j] for j in range(120)]) / 300
    assert_allclose(autocovariances(e, 119), direct, atol=1e-12)


def test_zero_bandwidth_is_sample_covariance():
    rng = np.random.default_rng(1)
    u = rng.standard_normal((400, 3))
    est = long_run_variance(u, KernelSpec("bartlett", 0.0), center=True)
    assert_allclose(est.value, np.cov(u, rowvar=False, bias=True), atol=1e-12)


def test_ar1_long_run_variance_is_four():
    rng = np.random.default_rng(2)
    y = _ar1(0.5, 20000, rng)
    est = long_run_variance(y, KernelSpec(), center=True)
    assert est.scalar == pytest.approx(4.0, rel=0.05)
    pw = long_run_variance(y, KernelSpec(), prewhiten=1, center=True)
    assert pw.scalar == pytest.approx(4.0, rel=0.05)


def test_overdifferenced_series_has_near_zero_lrv():
    rng = np.random.default_rng(3)
    w = np.diff(rng.standard_normal(20001))
    est = long_run_variance(w, KernelSpec(), center=True)
    assert est.scalar <= 0.05 * np.var(w)


def test_bartlett_lags_reproduce_kpss_weights():
    rng = np.random.default_rng(4)
    e = rng.standard_normal(200)
    for l in range(5):
        est = long_run_variance(e, KernelSpec.lags(l))
        g = [e[j:] @ e[: e.size - j] / e.size for j in range(l + 1)]
        manual = g[0] + 2 * sum((1 - j / (l + 1)) * g[j] for j in range(1, l + 1))
        assert est.scalar == pytest.approx(manual, rel=1e-12)
        assert est.kernel.lag_truncation == l


def test_lrv_increases_with_bandwidth_on_positive_autocorrelation():
    rng = np.random.default_rng(5)
    y = _ar1(0.7, 500, rng)
    vals = [long_run_variance(y, KernelSpec.lags(l), center=True).scalar for l in range(12)]
    assert np.all(np.diff(vals) >= -1e-12)


def test_white_noise_auto_bandwidth_is_small():
    bws = [nw_auto_bandwidth(np.random.default_rng(s).standard_normal(500)) for s in range(200)]
    assert np.median(bws) < 3.0


def test_persistent_residuals_get_larger_bandwidth():
    for s in range(20):
        e = np.random.default_rng(s).standard_normal(700)
        hi, lo = np.empty(700), np.empty(700)
        hi[0] = lo[0] = e[0]
        for t in range(1, 700):
            hi[t] = 0.9 * hi[t - 1] + e[t]
            lo[t] = 0.1 * lo[t - 1] + e[t]
        assert nw_auto_bandwidth(hi[200:]) > nw_auto_bandwidth(lo[200:])


def test_alternating_pattern_gives_finite_bandwidth():
    u = np.tile([1.0, -1.0], 100)
    for kind in KINDS:
        bw = nw_auto_bandwidth(u, kind)
        assert np.isfinite(bw) and bw >= 0
        assert np.isfinite(long_run_variance(u, KernelSpec(kind)).scalar)


def test_degenerate_bandwidth_input():
    with pytest.raises(DegenerateError):
        nw_auto_bandwidth(np.zeros(50))


def test_non_finite_input():
    with pytest.raises(ParseError):
        long_run_variance(np.array([1.0, np.nan, 2.0, 3.0]))


def test_short_input():
    with pytest.raises(LengthError):
        long_run_variance(np.ones((3, 3)))


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("prewhiten", [0, 1, 2])
def test_matrix_estimate_identity_and_psd(kind, prewhiten):
    rng = np.random.default_rng(6)
    e = rng.standard_normal((300, 3))
    u = e.copy()
    u[1:] += 0.5 * e[:-1] @ np.array([[0.5, 0.2, 0.0], [0.0, 0.3, 0.1], [0.1, 0.0, 0.4]])
    est = long_run_variance(u, KernelSpec(kind), prewhiten=prewhiten, center=True, dof=2)
    assert_allclose(est.value, est.value.T, atol=1e-14)
    assert np.linalg.eigvalsh(est.value).min() >= -1e-12
    assert_allclose(est.value, est.one_sided + est.one_sided.T - est.sigma, atol=1e-12)
    assert est.prewhitened == bool(prewhiten)


def test_prewhitening_shrinks_near_unit_roots():
    rng = np.random.default_rng(7)
    y = np.cumsum(rng.standard_normal(400))
    est = long_run_variance(y, KernelSpec(), prewhiten=1)
    assert est.prewhiten_shrunk
    assert abs(est.prewhiten_coefs[0][0][0]) <= 0.97 + 1e-12
    assert np.isfinite(est.scalar)


def test_dof_scaling():
    rng = np.random.default_rng(8)
    u = rng.standard_normal(100)
    a = long_run_variance(u, KernelSpec("bartlett", 3.0))
    b = long_run_variance(u, KernelSpec("bartlett", 3.0), dof=4)
    assert b.scalar == pytest.approx(a.scalar * 100 / 96, rel=1e-12)


def test_deterministic_output():
    u = np.random.default_rng(9).standard_normal((250, 2))
    a = long_run_variance(u, prewhiten=1, center=True)
    b = long_run_variance(u, prewhiten=1, center=True)
    assert np.array_equal(a.value, b.value)
    assert a.to_dict()["bandwidth_used"] == b.bandwidth_used
