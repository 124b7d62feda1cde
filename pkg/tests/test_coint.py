import numpy as np
import pytest
from numpy.testing import assert_allclose

from svarkit import _hansen_table, reference
from svarkit.coint import (
    CcrSpec,
    ccr_fit,
    ccr_transform,
    chi2_pvalue,
    cointegration_battery,
    engle_granger_test,
    hansen_lc_test,
    hansen_pvalue,
    park_variable_addition_test,
    phillips_ouliaris_test,
    validate_long_run_matrices,
)
from statsmodels.tsa.adfvalues import mackinnonp

from svarkit.errors import ConfigError, LengthError, SingularError
from svarkit.tscore import Dataset


def endogenous_dgp(seed, T=400, rho=0.5, beta=0.5):
    """y = 1 + beta x + u, u AR(rho) with innovations correlated with dx."""
    r = np.random.default_rng(seed)
    e = r.standard_normal((T + 1, 2))
    v = e[:, 1]
    w = 0.6 * v + 0.8 * e[:, 0]
    u = np.empty(T + 1)
    u[0] = w[0]
    for t in range(1, T + 1):
        u[t] = rho * u[t - 1] + w[t]
    x = np.cumsum(v)[1:]
    return Dataset.from_array(["y", "x"], np.column_stack([1.0 + beta * x + u[1:], x]))


def independent_walks(seed, T=400, m=1):
    r = np.random.default_rng(seed)
    Y = np.cumsum(r.standard_normal((T, m + 1)), axis=0)
    return Dataset.from_array(["y"] + [f"x{i}" for i in range(m)], Y)


SPEC = CcrSpec("y", ("x",))


def test_spec_validation():
    with pytest.raises(ConfigError):
        CcrSpec("y", ())
    with pytest.raises(ConfigError):
        CcrSpec("y", ("x",), deterministic="n")
    with pytest.raises(ConfigError):
        CcrSpec("y", ("y",))


def test_exact_linear_relation():
    x = np.cumsum(np.random.default_rng(0).standard_normal(200))
    d = Dataset.from_array(["y", "x"], np.column_stack([2.0 + 3.0 * x, x]))
    f = ccr_fit(d, SPEC)
    assert f.beta[0] == pytest.approx(3.0, abs=1e-9)
    assert f.gamma1[0] == pytest.approx(2.0, abs=1e-8)


def test_zero_correction_terms_leave_data_unchanged():
    rng = np.random.default_rng(1)
    T, m = 50, 2
    X = rng.standard_normal((T, m)).cumsum(axis=0)
    y = rng.standard_normal(T)
    u = rng.standard_normal((T, m + 1))
    sigma = np.eye(m + 1)
    omega = np.diag([2.0, 1.0, 1.5])
    ys, Xs = ccr_transform(y, X, u, sigma, np.zeros((m + 1, m)), omega, np.array([0.3, -1.0]))
    assert_allclose(Xs, X)
    assert_allclose(ys, y)


def test_exogenous_regressors_give_static_ols_asymptotically():
    rng = np.random.default_rng(2)
    T = 4000
    x = np.cumsum(rng.standard_normal(T))
    y = 1.0 + 0.5 * x + rng.standard_normal(T)
    f = ccr_fit(Dataset.from_array(["y", "x"], np.column_stack([y, x])), SPEC)
    assert f.beta[0] == pytest.approx(f.beta_ols[0], abs=2e-3)
    assert abs(f.lambda2[0, 0]) < 0.1 and abs(f.omega[0, 1]) < 0.1


def test_endogeneity_bias_reduction():
    ccr, ols = [], []
    for s in range(200):
        f = ccr_fit(endogenous_dgp(s), SPEC)
        ccr.append(f.beta[0])
        ols.append(f.beta_ols[0])
    assert abs(np.mean(ccr) - 0.5) <= 0.02
    assert abs(np.mean(ccr) - 0.5) < abs(np.mean(ols) - 0.5)


def test_long_run_identity_and_psd():
    for s in range(30):
        for det in ("c", "ct", "ctt"):
            f = ccr_fit(endogenous_dgp(s, T=150), CcrSpec("y", ("x",), deterministic=det))
            assert f.identity_error() <= 1e-8
            validate_long_run_matrices(f.sigma, f.omega)


def test_regressor_reordering_permutes_beta():
    rng = np.random.default_rng(3)
    T = 300
    X = np.cumsum(rng.standard_normal((T, 3)), axis=0)
    y = 0.4 + X @ np.array([1.0, -0.5, 2.0]) + rng.standard_normal(T)
    d = Dataset.from_array(["y", "a", "b", "c"], np.column_stack([y, X]))
    f1 = ccr_fit(d, CcrSpec("y", ("a", "b", "c")))
    f2 = ccr_fit(d, CcrSpec("y", ("c", "a", "b")))
    assert_allclose(f2.beta, f1.beta[[2, 0, 1]], atol=1e-10, rtol=0)


def test_singular_regressor_long_run_covariance():
    rng = np.random.default_rng(4)
    x = np.cumsum(rng.standard_normal(200))
    d = Dataset.from_array(["y", "a", "b"], np.column_stack([x + rng.standard_normal(200), x, 2.0 * x]))
    with pytest.raises(SingularError):
        ccr_fit(d, CcrSpec("y", ("a", "b")))


def test_short_sample():
    d = independent_walks(0, T=7)
    with pytest.raises(LengthError):
        ccr_fit(d, CcrSpec("y", ("x0",)))


def test_published_long_run_matrices_are_valid():
    validate_long_run_matrices(reference.CCR_SIGMA, reference.CCR_OMEGA)
    assert np.linalg.matrix_rank(reference.CCR_OMEGA) == 4
    bad = reference.CCR_OMEGA.copy()
    bad[0, 1] += 0.01
    with pytest.raises(ValueError):
        validate_long_run_matrices(reference.CCR_SIGMA, bad)


def test_fit_report_line():
    f = ccr_fit(endogenous_dgp(0), SPEC)
    line = f.to_dict()["equation"]
    assert line.startswith("y* = ") and "x*" in line and "\n(" in line


def test_hansen_table_endpoints():
    cv = _hansen_table.CRITICAL_VALUES[(3, "c")]
    for level, c in zip(_hansen_table.UPPER_TAIL, cv):
        p, clamped = hansen_pvalue(c, 3, "c")
        assert p == pytest.approx(level, abs=1e-12)
        assert not clamped
    assert hansen_pvalue(1e6, 3, "c") == (_hansen_table.UPPER_TAIL[0], True)
    with pytest.raises(ConfigError):
        hansen_pvalue(0.5, 9, "c")


def test_hansen_size_with_tiny_noise():
    kept = 0
    for s in range(100):
        r = np.random.default_rng(s)
        x = np.cumsum(r.standard_normal(400))
        y = 1.0 + 0.5 * x + 1e-3 * r.standard_normal(400)
        f = ccr_fit(Dataset.from_array(["y", "x"], np.column_stack([y, x])), SPEC)
        kept += hansen_lc_test(f).pvalue > 0.2
    assert kept >= 95


def test_hansen_power_on_independent_walks():
    rejected = 0
    for s in range(100):
        d = independent_walks(s)
        rejected += hansen_lc_test(ccr_fit(d, CcrSpec("y", ("x0",)))).pvalue < 0.05
    assert rejected >= 60


def test_hansen_power_without_prewhitening():
    # prewhitening an I(1) residual inflates omega_1.2 and deflates Lc
    rej = {0: 0, 1: 0}
    for s in range(100):
        d = independent_walks(s)
        for pw in rej:
            rej[pw] += hansen_lc_test(ccr_fit(d, CcrSpec("y", ("x0",), prewhiten=pw))).pvalue < 0.05
    assert rej[0] >= 60
    assert rej[0] > rej[1]


def test_park_chi2_anchor_and_empty():
    assert chi2_pvalue(8.04, 2) == pytest.approx(np.exp(-4.02), rel=1e-12)
    assert chi2_pvalue(8.04, 2) == pytest.approx(0.018, abs=0.001)
    res = park_variable_addition_test(endogenous_dgp(0), SPEC, ())
    assert (res.statistic, res.pvalue, res.df) == (0.0, 1.0, 0)


def test_park_rejects_already_present_term():
    with pytest.raises(ConfigError):
        park_variable_addition_test(endogenous_dgp(0), CcrSpec("y", ("x",), deterministic="ct"), ("trend",))


def test_park_size():
    rejected = 0
    for s in range(500):
        rejected += park_variable_addition_test(endogenous_dgp(s), SPEC).pvalue < 0.05
    assert 0.02 <= rejected / 500 <= 0.10


def test_residual_tests_size():
    eg = po = 0
    for s in range(100):
        d = independent_walks(s)
        sp = CcrSpec("y", ("x0",))
        eg += engle_granger_test(d, sp).pvalue > 0.10
        po += phillips_ouliaris_test(d, sp).pvalue > 0.10
    assert eg >= 90
    assert po >= 90


def test_residual_tests_power():
    eg = po = 0
    for s in range(100):
        d = endogenous_dgp(s, rho=0.3)
        eg += engle_granger_test(d, SPEC).pvalue < 0.05
        po += phillips_ouliaris_test(d, SPEC).pvalue < 0.05
    assert eg >= 90
    assert po >= 90


def test_mackinnon_pvalue_monotone_and_endpoint():
    taus = np.linspace(-6.0, -0.01, 200)
    p = [mackinnonp(t, regression="c", N=2) for t in taus]
    assert np.all(np.diff(p) >= 0)
    assert mackinnonp(0.0, regression="c", N=4) > 0.99


def test_null_labels_and_battery():
    res = cointegration_battery(endogenous_dgp(1), SPEC)
    assert res["hansen_lc"].null == "cointegration"
    assert res["park_chi2"].null == "cointegration"
    assert res["engle_granger"].null == "no_cointegration"
    assert res["phillips_ouliaris"].null == "no_cointegration"
    for k in ("hansen_lc", "park_chi2", "engle_granger", "phillips_ouliaris"):
        assert 0.0 <= res[k].pvalue <= 1.0
        assert res[k].test == k


def test_deterministic_given_data():
    a = ccr_fit(endogenous_dgp(9), SPEC)
    b = ccr_fit(endogenous_dgp(9), SPEC)
    assert np.array_equal(a.params, b.params)
