import numpy as np
import pytest
from numpy.testing import assert_allclose

from svarkit.errors import ConfigError, DegenerateError, DomainError, LengthError
from svarkit.hac import KernelSpec
from svarkit.tscore import TimeSeries
from svarkit.unitroot import (
    KPSS_CRITICAL_VALUES,
    NOT_REJECTED,
    REJECT,
    arima_equivalence,
    classify_integration,
    default_kpss_kernel,
    fit_ma1_theta,
    kpss_decision,
    kpss_difference_protocol,
    kpss_statistics,
    kpss_test,
    lambda_from_theta,
)


def _ts(v):
    v = np.asarray(v, dtype=float)
    return TimeSeries("s", np.arange(v.size), v)


def test_hand_oracle():
    res = kpss_test(_ts([1, 2, 3, 4, 5]), "level", KernelSpec.lags(0))
    assert abs(res.statistic - 0.52) <= 1e-12
    assert res.lrv.scalar == pytest.approx(2.0)


def test_exact_trend_is_degenerate():
    with pytest.raises(DegenerateError):
        kpss_test(_ts(3.0 + 0.5 * np.arange(30)), "trend")


def test_short_series():
    with pytest.raises(LengthError):
        kpss_test(_ts([1.0, 2.0, 0.5, 3.0, 1.0]), "level")


def test_critical_value_tables():
    assert list(KPSS_CRITICAL_VALUES["level"].values()) == [0.347, 0.463, 0.574, 0.739]
    assert list(KPSS_CRITICAL_VALUES["trend"].values()) == [0.119, 0.146, 0.176, 0.216]


def test_decisions():
    assert kpss_decision(0.50, "level", 0.05) == REJECT
    assert kpss_decision(0.5639, "level", 0.05) == REJECT
    assert kpss_decision(0.146, "trend", 0.05) == NOT_REJECTED
    # strict inequality: 0.1979 exceeds the 5% trend value 0.146
    assert kpss_decision(0.1979, "trend", 0.05) == REJECT
    assert kpss_decision(0.1979, "trend", 0.01) == NOT_REJECTED


def test_decision_bad_alpha():
    with pytest.raises(ConfigError):
        kpss_decision(0.3, "level", 0.07)
    with pytest.raises(ConfigError):
        kpss_decision(0.3, "drift", 0.05)


def test_result_decision_is_consistent_with_table():
    rng = np.random.default_rng(0)
    for s in range(20):
        r = kpss_test(_ts(np.cumsum(rng.standard_normal(60))), "trend")
        assert r.statistic >= 0
        assert r.decision_5pct == (REJECT if r.statistic > 0.146 else NOT_REJECTED)
        assert r.decision(0.10) == kpss_decision(r.statistic, "trend", 0.10)


def test_table_cell_layout():
    r = kpss_test(_ts(np.random.default_rng(1).standard_normal(42)), "trend", KernelSpec.lags(3))
    assert r.table_cell().endswith("(C, T, 3)")
    r2 = kpss_test(_ts(np.random.default_rng(1).standard_normal(42)), "level", KernelSpec("bartlett", 4.6))
    assert r2.table_cell().endswith("(C, 4.6)")


def test_lambda_from_theta():
    assert lambda_from_theta(-1.0) == 0.0
    assert lambda_from_theta(-0.5) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        lambda_from_theta(0.0)
    with pytest.raises(DomainError):
        lambda_from_theta(-1.2)


def test_classification_rule():
    assert classify_integration(REJECT, REJECT) == "inconclusive"
    assert classify_integration(REJECT, NOT_REJECTED) == "I1"
    assert classify_integration(NOT_REJECTED, REJECT) == "I0"


def test_random_walk_classified_i1():
    hits = 0
    for s in range(100):
        y = np.cumsum(np.random.default_rng(s).standard_normal(200))
        hits += kpss_difference_protocol(_ts(y), "level")[2] == "I1"
    assert hits >= 90


def test_iid_noise_classified_i0():
    hits = 0
    for s in range(100):
        y = np.random.default_rng(1000 + s).standard_normal(200)
        hits += kpss_difference_protocol(_ts(y), "level")[2] == "I0"
    assert hits >= 90


def test_affine_invariance():
    rng = np.random.default_rng(2)
    y = np.cumsum(rng.standard_normal(80)) + rng.standard_normal(80)
    for spec in ("level", "trend"):
        for kern in (KernelSpec.lags(3), KernelSpec()):
            a = kpss_test(_ts(y), spec, kern).statistic
            b = kpss_test(_ts(-4.0 + 2.5 * y), spec, kern).statistic
            assert b == pytest.approx(a, rel=1e-9)


def test_statistic_decreases_with_bandwidth():
    rng = np.random.default_rng(3)
    e = rng.standard_normal(300)
    y = np.empty(300)
    y[0] = e[0]
    for t in range(1, 300):
        y[t] = 0.8 * y[t - 1] + e[t]
    stats_ = [kpss_test(_ts(y), "level", KernelSpec.lags(l)).statistic for l in range(12)]
    assert np.all(np.diff(stats_) <= 1e-12)


def test_vectorized_matches_scalar():
    rng = np.random.default_rng(4)
    Y = rng.standard_normal((120, 5)).cumsum(axis=0)
    for spec in ("level", "trend"):
        v = kpss_statistics(Y, spec, lags=4)
        for j in range(5):
            assert v[j] == pytest.approx(kpss_test(_ts(Y[:, j]), spec, KernelSpec.lags(4)).statistic, rel=1e-10)


def test_size_simulation_reproduces_level_critical_value():
    rng = np.random.default_rng(5)
    T = 1000
    l4 = default_kpss_kernel(T).lag_truncation
    stats_ = np.concatenate([kpss_statistics(rng.standard_normal((T, 500)), "level", l4) for _ in range(4)])
    q95 = np.quantile(stats_, 0.95)
    assert abs(q95 / 0.463 - 1.0) <= 0.15


def test_ma1_theta_and_equivalence():
    rng = np.random.default_rng(6)
    e = rng.standard_normal(2001)
    assert fit_ma1_theta(np.diff(e)) < -0.9
    eq = arima_equivalence(_ts(e))
    assert eq.lam < 0.02
    # random walk plus noise with lambda = 1 has theta = (sqrt(5) - 3) / 2
    u = rng.standard_normal(4000)
    eps = rng.standard_normal(4000)
    y = np.cumsum(u) + eps
    theta = fit_ma1_theta(np.diff(y))
    assert theta == pytest.approx((np.sqrt(5) - 3) / 2, abs=0.05)
    assert_allclose(lambda_from_theta(theta), 1.0, atol=0.25)
