import builtins
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from scipy import stats

from svarkit.errors import DegenerateError, LengthError, ParseError, SeriesIndexError
from svarkit.tscore import (
    Dataset,
    TimeSeries,
    correlation_table,
    corr_pvalue,
    describe,
    difference,
    jarque_bera,
    load_csv,
    log_transform,
    pearson_corr_test,
    summaries_to_json,
)


def _ts(values, start=1974, name="x"):
    values = np.asarray(values, dtype=float)
    return TimeSeries(name, np.arange(start, start + values.size), values)


def test_load_csv_three_rows(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("year,x\n1974,1\n1975,2\n1976,3\n")
    d = load_csv(p, "year")
    assert d.T == 3
    assert d.names == ["x"]
    assert_array_equal(d["x"].values, [1, 2, 3])
    assert_array_equal(d.index, [1974, 1975, 1976])


def test_load_csv_unordered_years(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("year,x\n1976,1\n1975,2\n")
    with pytest.raises(SeriesIndexError):
        load_csv(p, "year")
    # also catchable as the builtin
    with pytest.raises(builtins.IndexError):
        load_csv(p, "year")


def test_load_csv_duplicate_years(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("year,x\n1975,1\n1975,2\n")
    with pytest.raises(SeriesIndexError):
        load_csv(p, "year")


def test_load_csv_ragged_row(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("year,x,y\n1974,1,2\n1975,3\n")
    with pytest.raises(ParseError, match=":3:"):
        load_csv(p, "year")


def test_load_csv_non_numeric_reports_row_and_column(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("year,x,y\n1974,1,2\n1975,3,abc\n")
    with pytest.raises(ParseError) as exc:
        load_csv(p, "year")
    assert ":3:" in str(exc.value) and "'y'" in str(exc.value)


def test_load_csv_43_years(tmp_path):
    years = np.arange(1974, 2017)
    p = tmp_path / "d.csv"
    p.write_text("year,a,b\n" + "".join(f"{y},{y * 0.5},{math.sin(y)}\n" for y in years))
    d = load_csv(p, "year")
    assert d.T == 43
    assert d.names == ["a", "b"]


def test_missing_markers_are_rejected_by_estimators(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("year,x\n1974,1\n1975,NA\n1976,3\n1977,.\n1978,5\n")
    d = load_csv(p, "year")
    assert d["x"].has_missing
    with pytest.raises(ParseError, match="1975"):
        describe(d["x"])


def test_csv_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    d = Dataset.from_array(["a", "b"], rng.standard_normal((10, 2)), index=np.arange(2000, 2010))
    d.to_csv(tmp_path / "o.csv")
    back = load_csv(tmp_path / "o.csv", "year")
    assert_array_equal(back.to_array(), d.to_array())


def test_infinite_values_rejected():
    with pytest.raises(ParseError):
        _ts([1.0, np.inf, 2.0])


def test_dataset_needs_common_index():
    with pytest.raises(SeriesIndexError):
        Dataset([_ts([1, 2, 3]), _ts([1, 2, 3], start=1980, name="y")])


def test_dataset_is_immutable():
    s = _ts([1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        s.values[0] = 5.0


def test_difference_examples():
    s = _ts([1, 2, 4, 7])
    assert_array_equal(difference(s, 1).values, [1, 2, 3])
    assert_array_equal(difference(s, 1).index, [1975, 1976, 1977])
    assert_array_equal(difference(s, 2).values, [1, 1])
    assert_array_equal(difference(_ts([3, 3, 3, 3]), 1).values, [0, 0, 0])


def test_difference_order_too_large():
    with pytest.raises(LengthError):
        difference(_ts([1, 2, 3]), 3)


def test_difference_inverts_cumsum():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(50)
    assert_allclose(difference(_ts(np.cumsum(x)), 1).values, x[1:], atol=1e-12)


def test_log_transform_rejects_nonpositive():
    with pytest.raises(DegenerateError):
        log_transform(_ts([1.0, 0.0, 2.0]))


def test_describe_matches_scipy_moments():
    rng = np.random.default_rng(2)
    x = rng.gamma(2.0, size=42)
    s = describe(_ts(x))
    assert_allclose(s.skewness, stats.skew(x, bias=True), rtol=1e-12)
    assert_allclose(s.kurtosis, stats.kurtosis(x, fisher=False, bias=True), rtol=1e-12)
    assert_allclose(s.stddev, np.std(x, ddof=1), rtol=1e-12)
    jb = stats.jarque_bera(x)
    assert_allclose(s.jarque_bera, jb.statistic, rtol=1e-10)
    assert_allclose(s.jb_pvalue, jb.pvalue, rtol=1e-10)


def test_describe_jb_is_exactly_its_own_formula():
    rng = np.random.default_rng(3)
    for _ in range(20):
        s = describe(_ts(rng.standard_t(4, size=30)))
        assert s.jarque_bera == s.T / 6.0 * (s.skewness**2 + (s.kurtosis - 3.0) ** 2 / 4.0)
        assert 0.0 <= s.jb_pvalue <= 1.0


def test_describe_symmetric_two_point():
    assert describe(_ts([-1, 1, -1, 1])).skewness == 0.0


def test_describe_zero_variance():
    with pytest.raises(DegenerateError):
        describe(_ts([2.0] * 10))


def test_describe_short_series():
    with pytest.raises(LengthError):
        describe(_ts([1.0, 2.0, 3.0]))


@pytest.mark.parametrize("S,K,jb", [(0.25236, 1.77051, 3.091), (-1.10866, 4.06558, 10.59)])
def test_jarque_bera_from_moments(S, K, jb):
    assert jarque_bera(S, K, 42)[0] == pytest.approx(jb, abs=0.005)


def test_corr_self_and_known_cells():
    x = _ts(np.random.default_rng(4).standard_normal(42))
    r, p = pearson_corr_test(x, x)
    assert r == pytest.approx(1.0) and p == pytest.approx(0.0, abs=1e-12)
    assert corr_pvalue(0.4848, 42) == pytest.approx(0.0011, abs=0.0002)
    assert corr_pvalue(0.2392, 42) == pytest.approx(0.127, abs=0.001)


def test_corr_matches_scipy_and_is_symmetric_and_affine_invariant():
    rng = np.random.default_rng(5)
    a, b = rng.standard_normal((2, 30))
    b = b + 0.4 * a
    x, y = _ts(a), _ts(b)
    r, p = pearson_corr_test(x, y)
    ref = stats.pearsonr(a, b)
    assert_allclose([r, p], [ref.statistic, ref.pvalue], rtol=1e-10)
    assert pearson_corr_test(y, x) == pytest.approx((r, p))
    assert pearson_corr_test(x.with_values(3.0 + 2.5 * a), y) == pytest.approx((r, p))


def test_corr_aligns_on_common_periods():
    x = _ts([1.0, 2.0, 3.0, 5.0, 4.0], start=2000)
    y = _ts([9.0, 1.0, 2.0, 3.0, 5.0, 4.0], start=1999)
    assert pearson_corr_test(x, y)[0] == pytest.approx(1.0)


def test_corr_constant_input():
    with pytest.raises(DegenerateError):
        pearson_corr_test(_ts([1.0, 1.0, 1.0, 1.0]), _ts([1.0, 2.0, 3.0, 4.0]))


def test_correlation_table_and_json():
    rng = np.random.default_rng(6)
    d = Dataset.from_array(["a", "b", "c"], rng.standard_normal((25, 3)))
    t = correlation_table(d)
    C = np.array(t["corr"])
    assert_allclose(C, C.T)
    assert_allclose(np.diag(C), 1.0)
    assert_allclose(C, np.corrcoef(d.to_array(), rowvar=False), atol=1e-12)
    text = summaries_to_json({n: describe(d[n]) for n in d.names})
    assert '"jarque_bera"' in text
