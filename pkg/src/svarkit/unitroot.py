"""KPSS stationarity tests and the random-walk / MA(1) equivalence diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import ConfigError, DegenerateError, DomainError, LengthError
from .hac import KernelSpec, LrvEstimate, long_run_variance
from .tscore import TimeSeries, difference

# upper-tail percentiles of the asymptotic KPSS distribution
KPSS_CRITICAL_VALUES = {
    "level": {0.10: 0.347, 0.05: 0.463, 0.025: 0.574, 0.01: 0.739},
    "trend": {0.10: 0.119, 0.05: 0.146, 0.025: 0.176, 0.01: 0.216},
}
REJECT = "reject_stationarity"
NOT_REJECTED = "not_rejected"


def default_kpss_kernel(T: int) -> KernelSpec:
    """Bartlett kernel with the ``l4 = [4 (T/100)^(1/4)]`` truncation lag."""
    return KernelSpec.lags(int(4.0 * (T / 100.0) ** 0.25), "bartlett")


@dataclass
class KpssResult:
    statistic: float
    spec: str
    bandwidth_used: float
    lrv: LrvEstimate
    decision_5pct: str
    nobs: int

    @property
    def critical_values(self) -> dict:
        return dict(KPSS_CRITICAL_VALUES[self.spec])

    def decision(self, alpha: float) -> str:
        return kpss_decision(self.statistic, self.spec, alpha)

    def table_cell(self) -> str:
        """Statistic with its regressors and bandwidth, e.g. ``0.1979 (C, T, 3)``."""
        terms = "C" if self.spec == "level" else "C, T"
        k = self.lrv.kernel
        bw = k.lag_truncation if k.lag_truncation is not None else round(self.bandwidth_used, 2)
        if isinstance(bw, float) and bw.is_integer():
            bw = int(bw)
        return f"{self.statistic:.4f} ({terms}, {bw})"

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "spec": self.spec,
            "bandwidth_used": self.bandwidth_used,
            "hac_variance": self.lrv.scalar,
            "kernel": self.lrv.kernel.to_dict(),
            "decision_5pct": self.decision_5pct,
            "nobs": self.nobs,
            "cell": self.table_cell(),
        }


def kpss_decision(statistic: float, spec: str, alpha: float = 0.05) -> str:
    """Reject iff the statistic is strictly above the tabulated critical value."""
    if spec not in KPSS_CRITICAL_VALUES:
        raise ConfigError(f"spec must be 'level' or 'trend', got {spec!r}")
    table = KPSS_CRITICAL_VALUES[spec]
    for level, cv in table.items():
        if math.isclose(alpha, level):
            return REJECT if statistic > cv else NOT_REJECTED
    raise ConfigError(f"alpha must be one of {sorted(table)}, got {alpha}")


def _values(s) -> np.ndarray:
    if isinstance(s, TimeSeries):
        return s.require_complete()
    return np.asarray(s, dtype=float)


def kpss_residuals(y: np.ndarray, spec: str) -> np.ndarray:
    T = y.size
    if spec == "level":
        X = np.ones((T, 1))
    elif spec == "trend":
        X = np.column_stack([np.ones(T), np.arange(1, T + 1, dtype=float)])
    else:
        raise ConfigError(f"spec must be 'level' or 'trend', got {spec!r}")
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    return y - X @ beta


def kpss_test(s, spec: str = "level", kernel: KernelSpec | None = None) -> KpssResult:
    """KPSS statistic ``T^-2 sum S_t^2 / s^2`` for level or trend stationarity.

    ``S_t`` are partial sums of the residuals from regressing the series on
    a constant (``level``) or constant and linear trend (``trend``); ``s^2``
    is their long-run variance under ``kernel`` (default: Bartlett with the
    ``l4`` truncation lag).
    """
    y = _values(s)
    T = y.size
    if T < 8 and not (kernel is not None and T >= 3):
        raise LengthError(f"KPSS needs at least 8 observations, got {T}")
    e = kpss_residuals(y, spec)
    ssr = float(e @ e)
    tss = float(np.sum((y - y.mean()) ** 2)) + float(y @ y) * 1e-30
    if ssr <= 1e-20 * tss or ssr == 0.0:
        raise DegenerateError("zero residual variance; KPSS statistic undefined")
    kernel = kernel or default_kpss_kernel(T)
    lrv = long_run_variance(e, kernel)
    s2 = lrv.scalar
    if s2 <= 0:
        raise DegenerateError("long-run variance estimate is zero")
    S = np.cumsum(e)
    stat = float(S @ S / T**2 / s2)
    return KpssResult(
        statistic=stat,
        spec=spec,
        bandwidth_used=lrv.bandwidth_used,
        lrv=lrv,
        decision_5pct=kpss_decision(stat, spec, 0.05),
        nobs=T,
    )


def kpss_statistics(Y: np.ndarray, spec: str = "level", lags: int = 0) -> np.ndarray:
    """Vectorized Bartlett-kernel KPSS statistics for the columns of ``Y``.

    Used for size simulations; agrees with :func:`kpss_test` column by column.
    """
    Y = np.asarray(Y, dtype=float)
    T = Y.shape[0]
    if spec == "level":
        E = Y - Y.mean(axis=0)
    else:
        X = np.column_stack([np.ones(T), np.arange(1, T + 1, dtype=float)])
        E = Y - X @ np.linalg.lstsq(X, Y, rcond=None)[0]
    s2 = np.sum(E * E, axis=0) / T
    for j in range(1, lags + 1):
        s2 += 2.0 * (1.0 - j / (lags + 1.0)) * np.sum(E[j:] * E[:-j], axis=0) / T
    S = np.cumsum(E, axis=0)
    return np.sum(S * S, axis=0) / T**2 / s2


def kpss_difference_protocol(
    s, spec: str = "level", kernel: KernelSpec | None = None, diff_spec: str | None = None
):
    """Test the levels, then the first difference, and classify I(0)/I(1).

    Returns ``(levels, diffs, order)`` where ``order`` is ``"I0"`` when the
    levels are not rejected at 5%, ``"I1"`` when the levels are rejected and
    the differences are not, and ``"inconclusive"`` otherwise.
    """
    if not isinstance(s, TimeSeries):
        v = np.asarray(s, dtype=float)
        s = TimeSeries("series", np.arange(v.size), v)
    levels = kpss_test(s, spec, kernel)
    diffs = kpss_test(difference(s, 1), diff_spec or spec, kernel)
    return levels, diffs, classify_integration(levels.decision_5pct, diffs.decision_5pct)


def classify_integration(levels_decision: str, diffs_decision: str) -> str:
    if levels_decision == NOT_REJECTED:
        return "I0"
    if diffs_decision == NOT_REJECTED:
        return "I1"
    return "inconclusive"


def lambda_from_theta(theta: float) -> float:
    """Signal ratio implied by the MA(1) root of the differenced series."""
    if not (-1.0 <= theta < 0.0):
        raise DomainError(f"theta must lie in [-1, 0), got {theta}")
    return -((1.0 + theta) ** 2) / theta


@dataclass(frozen=True)
class ArimaEquivalence:
    theta: float
    lam: float

    @property
    def lambda_(self) -> float:
        return self.lam


def _ma1_css(theta: float, w: np.ndarray) -> float:
    v = 0.0
    ss = 0.0
    for x in w:
        v = x - theta * v
        ss += v * v
    return ss


def fit_ma1_theta(w) -> float:
    """MA(1) coefficient minimizing the one-step prediction error sum of squares.

    The search is restricted to the invertible, non-positive region
    ``[-1, 0]``, the only region the random-walk-plus-noise model maps into.
    """
    w = np.asarray(w, dtype=float)
    w = w - w.mean()
    res = optimize.minimize_scalar(_ma1_css, bounds=(-1.0, 0.0), args=(w,), method="bounded",
                                   options={"xatol": 1e-8})
    return float(res.x)


def arima_equivalence(s) -> ArimaEquivalence:
    """Fit the MA(1) of the differenced series and report ``(theta, lambda)``.

    A diagnostic only: ``lambda`` near 0 (``theta`` near -1) points to an
    over-differenced, i.e. stationary, level series.
    """
    y = _values(s)
    if y.size < 8:
        raise LengthError("need at least 8 observations")
    theta = fit_ma1_theta(np.diff(y))
    theta = min(theta, -1e-8)
    return ArimaEquivalence(theta, lambda_from_theta(max(theta, -1.0)))
