"""Time-series containers, CSV ingestion, transforms and descriptive statistics.

Series are indexed by plain integer periods (years).  Missing cells are kept
as NaN so that a file can be loaded and inspected, but every estimator calls
:meth:`TimeSeries.require_complete` and refuses them.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from .errors import DegenerateError, LengthError, ParseError, SeriesIndexError

MISSING_MARKERS = frozenset({"", "na", "nan", "."})


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TimeSeries:
    name: str
    index: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        index = _frozen(self.index, dtype=np.int64)
        values = _frozen(self.values)
        if index.ndim != 1 or values.ndim != 1:
            raise ParseError(f"{self.name}: index and values must be 1-d")
        if index.shape != values.shape:
            raise LengthError(
                f"{self.name}: index has {index.size} periods, values {values.size}"
            )
        if index.size > 1 and np.any(np.diff(index) <= 0):
            raise SeriesIndexError(f"{self.name}: index must be strictly increasing")
        if np.any(np.isinf(values)):
            raise ParseError(f"{self.name}: infinite values")
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    @property
    def has_missing(self) -> bool:
        return bool(np.isnan(self.values).any())

    def require_complete(self) -> np.ndarray:
        """Return the values, raising ``ParseError`` if any are missing."""
        if self.has_missing:
            bad = self.index[np.isnan(self.values)].tolist()
            raise ParseError(f"{self.name}: missing values at periods {bad}")
        return self.values

    def with_values(self, values, name: str | None = None) -> "TimeSeries":
        return TimeSeries(name or self.name, self.index, values)


class Dataset:
    """Ordered collection of series sharing one integer index."""

    def __init__(self, columns: Sequence[TimeSeries]):
        columns = tuple(columns)
        if not columns:
            raise LengthError("dataset needs at least one column")
        index = columns[0].index
        for col in columns[1:]:
            if not np.array_equal(col.index, index):
                raise SeriesIndexError(f"column {col.name!r} has a different index")
        if index.size < 2:
            raise LengthError("dataset needs T >= 2")
        names = [c.name for c in columns]
        if len(set(names)) != len(names):
            raise ParseError(f"duplicate column names: {names}")
        self._columns = columns
        self._by_name = {c.name: c for c in columns}

    @classmethod
    def from_array(cls, names: Sequence[str], values, index=None) -> "Dataset":
        values = np.asarray(values, dtype=float)
        if values.ndim != 2 or values.shape[1] != len(names):
            raise LengthError("values must be T x len(names)")
        if index is None:
            index = np.arange(values.shape[0])
        return cls([TimeSeries(n, index, values[:, i]) for i, n in enumerate(names)])

    @property
    def columns(self) -> tuple[TimeSeries, ...]:
        return self._columns

    @property
    def names(self) -> list[str]:
        return [c.name for c in self._columns]

    @property
    def index(self) -> np.ndarray:
        return self._columns[0].index

    @property
    def T(self) -> int:
        return int(self.index.size)

    def __getitem__(self, name: str) -> TimeSeries:
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"no column {name!r}; have {self.names}") from None

    def __contains__(self, name) -> bool:
        return name in self._by_name

    def __len__(self) -> int:
        return len(self._columns)

    def select(self, names: Iterable[str]) -> "Dataset":
        return Dataset([self[n] for n in names])

    def to_array(self, names: Sequence[str] | None = None) -> np.ndarray:
        """T x K float matrix of complete data (missing values rejected)."""
        cols = self._columns if names is None else [self[n] for n in names]
        return np.column_stack([c.require_complete() for c in cols])

    def to_csv(self, path, index_col: str = "year") -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([index_col, *self.names])
            for t, period in enumerate(self.index):
                w.writerow([int(period), *(repr(float(c.values[t])) for c in self._columns)])

    def __repr__(self) -> str:
        return f"Dataset(T={self.T}, columns={self.names})"


def load_csv(path, index_col: str) -> Dataset:
    """Read a header-first, comma separated UTF-8 file into a :class:`Dataset`.

    Every non-index column becomes a series, in file order.  Cells that are
    empty or one of ``NA``/``NaN``/``.`` are stored as missing.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if not rows:
        raise ParseError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if index_col not in header:
        raise ParseError(f"{path}: no index column {index_col!r} in header {header}")
    icol = header.index(index_col)
    names = [h for j, h in enumerate(header) if j != icol]
    periods = []
    data = [[] for _ in names]
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ParseError(
                f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}"
            )
        try:
            periods.append(int(row[icol].strip()))
        except ValueError:
            raise ParseError(
                f"{path}:{lineno}: index {row[icol]!r} is not an integer"
            ) from None
        k = 0
        for j, cell in enumerate(row):
            if j == icol:
                continue
            text = cell.strip()
            if text.lower() in MISSING_MARKERS:
                data[k].append(math.nan)
            else:
                try:
                    value = float(text)
                except ValueError:
                    raise ParseError(
                        f"{path}:{lineno}: column {header[j]!r} value {cell!r} is not numeric"
                    ) from None
                if not math.isfinite(value):
                    raise ParseError(f"{path}:{lineno}: column {header[j]!r} is not finite")
                data[k].append(value)
            k += 1
    index = np.asarray(periods, dtype=np.int64)
    if len(set(periods)) != len(periods):
        raise SeriesIndexError(f"{path}: duplicate periods in {index_col!r}")
    if np.any(np.diff(index) <= 0):
        raise SeriesIndexError(f"{path}: periods in {index_col!r} are not increasing")
    return Dataset([TimeSeries(n, index, v) for n, v in zip(names, data)])


def difference(s: TimeSeries, order: int = 1) -> TimeSeries:
    """``order``-th difference; the first ``order`` periods are dropped."""
    if order < 1:
        raise ValueError("order must be a positive integer")
    if order >= len(s):
        raise LengthError(f"cannot take order-{order} difference of {len(s)} values")
    return TimeSeries(s.name, s.index[order:], np.diff(s.values, n=order))


def log_transform(s: TimeSeries) -> TimeSeries:
    v = s.require_complete()
    if np.any(v <= 0):
        raise DegenerateError(f"{s.name}: log of non-positive values")
    return s.with_values(np.log(v))


@dataclass(frozen=True)
class StatsSummary:
    T: int
    mean: float
    median: float
    stddev: float
    skewness: float
    kurtosis: float
    jarque_bera: float
    jb_pvalue: float

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def jarque_bera(skewness: float, kurtosis: float, T: int) -> tuple[float, float]:
    """JB statistic and chi-square(2) upper tail from moment estimates."""
    jb = T / 6.0 * (skewness**2 + (kurtosis - 3.0) ** 2 / 4.0)
    return jb, float(stats.chi2.sf(jb, 2))


def describe(s: TimeSeries) -> StatsSummary:
    """Mean, median, sample std dev and moment-based shape statistics.

    Skewness and kurtosis use divide-by-T central moments; kurtosis is the
    raw (non-excess) value.  The standard deviation is the usual ``T - 1``
    version.
    """
    x = s.require_complete()
    T = x.size
    if T < 4:
        raise LengthError(f"{s.name}: describe needs at least 4 observations")
    dev = x - x.mean()
    m2 = np.mean(dev**2)
    if m2 <= 0 or not np.isfinite(m2) or m2 <= 1e-28 * max(1.0, np.mean(x**2)):
        raise DegenerateError(f"{s.name}: zero variance")
    skew = np.mean(dev**3) / m2**1.5
    kurt = np.mean(dev**4) / m2**2
    jb, p = jarque_bera(skew, kurt, T)
    return StatsSummary(
        T=T,
        mean=float(x.mean()),
        median=float(np.median(x)),
        stddev=float(x.std(ddof=1)),
        skewness=float(skew),
        kurtosis=float(kurt),
        jarque_bera=float(jb),
        jb_pvalue=p,
    )


def corr_pvalue(r: float, T: int) -> float:
    """Two-sided t-test p-value for a Pearson correlation with ``T - 2`` df."""
    if T < 3:
        raise LengthError("correlation test needs T >= 3")
    if abs(r) >= 1.0:
        return 0.0
    t = r * math.sqrt((T - 2) / (1.0 - r * r))
    return float(2.0 * stats.t.sf(abs(t), T - 2))


def pearson_corr_test(x: TimeSeries, y: TimeSeries) -> tuple[float, float]:
    """Sample correlation and its two-sided t-test p-value.

    The two series are aligned on their common periods.
    """
    common, ix, iy = np.intersect1d(x.index, y.index, return_indices=True)
    if common.size < 3:
        raise LengthError("need at least 3 common periods")
    a = x.require_complete()[ix]
    b = y.require_complete()[iy]
    da, db = a - a.mean(), b - b.mean()
    sa, sb = np.sqrt(np.sum(da * da)), np.sqrt(np.sum(db * db))
    if sa == 0 or sb == 0:
        raise DegenerateError("correlation undefined for a constant series")
    r = float(np.clip(np.sum(da * db) / (sa * sb), -1.0, 1.0))
    return r, corr_pvalue(r, common.size)


def correlation_table(data: Dataset, names: Sequence[str] | None = None) -> dict:
    """Lower-triangle correlations with p-values and upper-triangle covariances.

    Returns a dict with ``names``, ``corr``, ``pvalue`` and ``cov`` matrices
    (nested lists) so it serializes directly to JSON.
    """
    names = list(names or data.names)
    k = len(names)
    corr = np.eye(k)
    pval = np.zeros((k, k))
    X = data.to_array(names)
    cov = np.cov(X, rowvar=False, ddof=0).reshape(k, k)
    for i in range(k):
        for j in range(i):
            r, p = pearson_corr_test(data[names[i]], data[names[j]])
            corr[i, j] = corr[j, i] = r
            pval[i, j] = pval[j, i] = p
    return {"names": names, "corr": corr.tolist(), "pvalue": pval.tolist(), "cov": cov.tolist()}


def write_table_csv(path, row_names, col_names, matrix, corner: str = "") -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([corner, *col_names])
        for name, row in zip(row_names, matrix):
            w.writerow([name, *(_fmt(v) for v in row)])


def _fmt(v) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def summaries_to_json(summaries: dict[str, StatsSummary]) -> str:
    return json.dumps({k: v.to_dict() for k, v in summaries.items()}, indent=2, sort_keys=True)
