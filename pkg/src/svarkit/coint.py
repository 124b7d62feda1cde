"""Canonical cointegrating regression and single-equation cointegration tests.

The CCR estimator removes the long-run endogeneity of the regressors by
shifting ``y`` and ``X`` with the one-sided and two-sided long-run
covariances of ``u_t = (u_1t, u_2t')'``, where ``u_1t`` is the static OLS
residual and ``u_2t`` the differenced, detrended regressors.  OLS on the
transformed data is then asymptotically mixed normal.

Tests provided:

* Hansen's Lc parameter-instability test (null: cointegration)
* Park's variable-addition test on superfluous trends (null: cointegration)
* Engle-Granger ADF-tau and Phillips-Ouliaris Z_t on static OLS residuals
  (null: no cointegration), with MacKinnon response-surface p-values
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats
from statsmodels.tsa.adfvalues import mackinnonp

from . import _hansen_table
from .errors import ConfigError, LengthError, SingularError
from .hac import KernelSpec, LrvEstimate, long_run_variance
from .tscore import Dataset

DETERMINISTIC = ("c", "ct", "ctt")
_TERM_NAMES = ("const", "trend", "trend2")
OMEGA22_MAX_COND = 1e12


def deterministic_terms(T: int, spec: str, start: int = 1) -> np.ndarray:
    """Columns ``1, t, t^2`` (as many as ``spec`` asks for), with ``t = start..``."""
    if spec not in DETERMINISTIC:
        raise ConfigError(f"deterministic spec must be one of {DETERMINISTIC}, got {spec!r}")
    t = np.arange(start, start + T, dtype=float)
    cols = [np.ones(T), t, t * t][: len(spec)]
    return np.column_stack(cols)


@dataclass(frozen=True)
class CcrSpec:
    y: str
    X: tuple
    deterministic: str = "c"
    kernel: KernelSpec = field(default_factory=KernelSpec)
    prewhiten: int = 1
    center: bool = True
    dof_correct: bool = True

    def __post_init__(self):
        object.__setattr__(self, "X", tuple(self.X))
        if not self.X:
            raise ConfigError("CCR needs at least one regressor (n >= 2)")
        if self.deterministic not in DETERMINISTIC:
            raise ConfigError(
                f"deterministic must include a constant: one of {DETERMINISTIC}"
            )
        if self.y in self.X:
            raise ConfigError("y cannot also be a regressor")

    @property
    def n(self) -> int:
        return 1 + len(self.X)

    @property
    def term_names(self) -> list:
        return list(_TERM_NAMES[: len(self.deterministic)])


@dataclass
class CcrFit:
    spec: CcrSpec
    beta: np.ndarray
    gamma1: np.ndarray
    sigma: np.ndarray
    lambda_: np.ndarray
    omega: np.ndarray
    y_star: np.ndarray
    X_star: np.ndarray
    Z_star: np.ndarray
    resid: np.ndarray
    se: np.ndarray
    pvalues: np.ndarray
    omega_1_2: float
    beta_ols: np.ndarray
    gamma_ols: np.ndarray
    u_hat: np.ndarray
    lrv: LrvEstimate
    nobs: int

    @property
    def lambda2(self) -> np.ndarray:
        return self.lambda_[:, 1:]

    @property
    def params(self) -> np.ndarray:
        return np.concatenate([self.beta, self.gamma1])

    @property
    def param_names(self) -> list:
        return list(self.spec.X) + self.spec.term_names

    @property
    def bandwidth(self) -> float:
        return self.lrv.bandwidth_used

    def identity_error(self) -> float:
        """Max deviation from ``Omega = Lambda + Lambda' - Sigma``."""
        return float(np.max(np.abs(self.omega - (self.lambda_ + self.lambda_.T - self.sigma))))

    def equation_line(self, digits: int = 3) -> str:
        """``y* = c + b1 x1* + ...`` with p-values in parentheses beneath."""
        names = self.param_names
        k = len(self.spec.X)
        order = list(range(k, len(names))) + list(range(k))
        terms, pv = [], []
        for i in order:
            coef = self.params[i]
            label = names[i] if i >= k else f"{names[i]}*"
            if names[i] == "const":
                label = ""
            sign = "-" if coef < 0 else "+"
            body = f"{abs(coef):.{digits}f}{(' ' + label) if label else ''}"
            terms.append(body if not terms and coef >= 0 else f"{sign} {body}")
            pv.append(f"({self.pvalues[i]:.{digits}f})")
        return f"{self.spec.y}* = " + " ".join(terms) + "\n" + " ".join(pv)

    def to_dict(self) -> dict:
        return {
            "y": self.spec.y,
            "X": list(self.spec.X),
            "deterministic": self.spec.deterministic,
            "params": dict(zip(self.param_names, self.params.tolist())),
            "se": dict(zip(self.param_names, self.se.tolist())),
            "pvalues": dict(zip(self.param_names, self.pvalues.tolist())),
            "static_ols": dict(zip(self.param_names, np.concatenate([self.beta_ols, self.gamma_ols]).tolist())),
            "sigma": self.sigma.tolist(),
            "lambda": self.lambda_.tolist(),
            "omega": self.omega.tolist(),
            "omega_1_2": self.omega_1_2,
            "bandwidth": self.bandwidth,
            "prewhiten_order": self.lrv.prewhiten_order,
            "nobs": self.nobs,
            "equation": self.equation_line(),
        }


@dataclass(frozen=True)
class CointTestResult:
    test: str
    statistic: float
    pvalue: float
    null: str
    df: int | None = None
    clamped: bool = False
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "test": self.test,
            "statistic": self.statistic,
            "pvalue": self.pvalue,
            "null": self.null,
            "df": self.df,
            "clamped": self.clamped,
            **({"detail": self.detail} if self.detail else {}),
        }


def _ols(y, Z):
    coef, *_ = np.linalg.lstsq(Z, y, rcond=None)
    return coef, y - Z @ coef


def validate_long_run_matrices(sigma, omega, tol: float = 1e-10) -> None:
    """Raise ``ValueError`` unless both matrices are symmetric PSD and ``omega`` has full rank."""
    for name, M in (("sigma", sigma), ("omega", omega)):
        M = np.asarray(M, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError(f"{name} must be square")
        if not np.allclose(M, M.T, atol=tol, rtol=0):
            raise ValueError(f"{name} is not symmetric")
        if np.linalg.eigvalsh(M).min() < -tol:
            raise ValueError(f"{name} is not positive semidefinite")
    if np.linalg.matrix_rank(np.asarray(omega, dtype=float)) < np.shape(omega)[0]:
        raise ValueError("omega does not have full rank")


def ccr_transform(y, X, u, sigma, lambda2, omega, beta_tilde):
    """Transformed ``(y*, X*)`` given the long-run matrices.

    ``X* = X - u (Sigma^-1 Lambda_2)`` and
    ``y* = y - u (Sigma^-1 Lambda_2 beta~ + (0, Omega_22^-1 Omega_21)')``.
    """
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    m = X.shape[1]
    sl2 = np.linalg.solve(sigma, lambda2)
    kappa = np.zeros(m + 1)
    kappa[1:] = np.linalg.solve(omega[1:, 1:], omega[1:, 0])
    X_star = X - u @ sl2
    y_star = y - u @ (sl2 @ np.asarray(beta_tilde, dtype=float) + kappa)
    return y_star, X_star


def _prepare(data: Dataset, spec: CcrSpec):
    for name in (spec.y, *spec.X):
        if name not in data:
            raise ConfigError(f"series {name!r} not in dataset")
    y = data[spec.y].require_complete()
    X = data.to_array(list(spec.X))
    T = y.size
    if T <= spec.n + len(spec.deterministic) + 4:
        raise LengthError(f"CCR needs T > {spec.n + len(spec.deterministic) + 4}, got {T}")
    return y, X, T


def ccr_fit(data: Dataset, spec: CcrSpec) -> CcrFit:
    """Canonical cointegrating regression of ``spec.y`` on ``spec.X``.

    The first observation is lost to the differenced regressor errors.
    """
    y, X, T = _prepare(data, spec)
    m = X.shape[1]
    D = deterministic_terms(T, spec.deterministic)
    d = D.shape[1]

    coef, u1 = _ols(y, np.hstack([X, D]))
    beta_ols, gamma_ols = coef[:m], coef[m:]
    gamma_x, eps2 = _ols(X, D)
    u2 = np.diff(eps2, axis=0)
    u = np.column_stack([u1[1:], u2])

    lrv = long_run_variance(
        u,
        spec.kernel,
        prewhiten=spec.prewhiten,
        center=spec.center,
        dof=(m + d) if spec.dof_correct else 0,
    )
    sigma, lam, omega = lrv.sigma, lrv.one_sided, lrv.value
    omega22 = omega[1:, 1:]
    if np.linalg.cond(omega22) > OMEGA22_MAX_COND:
        raise SingularError("long-run covariance of the regressors is singular")

    y_star, X_star = ccr_transform(y[1:], X[1:], u, sigma, lam[:, 1:], omega, beta_ols)
    Z_star = np.hstack([X_star, D[1:]])
    theta, resid = _ols(y_star, Z_star)
    omega12 = omega[0, 1:]
    omega_1_2 = float(omega[0, 0] - omega12 @ np.linalg.solve(omega22, omega12))
    cov = omega_1_2 * np.linalg.inv(Z_star.T @ Z_star)
    se = np.sqrt(np.maximum(np.diag(cov), 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        tvals = np.where(se > 0, theta / se, np.inf)
    pvalues = 2.0 * stats.norm.sf(np.abs(tvals))
    return CcrFit(
        spec=spec,
        beta=theta[:m],
        gamma1=theta[m:],
        sigma=sigma,
        lambda_=lam,
        omega=omega,
        y_star=y_star,
        X_star=X_star,
        Z_star=Z_star,
        resid=resid,
        se=se,
        pvalues=pvalues,
        omega_1_2=omega_1_2,
        beta_ols=beta_ols,
        gamma_ols=gamma_ols,
        u_hat=u,
        lrv=lrv,
        nobs=T - 1,
    )


def _table_pvalue(stat: float, crit: list, upper_tail: list):
    """Upper-tail p-value by linear interpolation in a quantile table.

    Returns ``(p, clamped)``; outside the table the nearest tabulated level
    is returned with ``clamped=True``.
    """
    cv = np.asarray(crit)
    lv = np.asarray(upper_tail)
    order = np.argsort(cv)
    cv, lv = cv[order], lv[order]
    if stat < cv[0]:
        return float(lv[0]), True
    if stat > cv[-1]:
        return float(lv[-1]), True
    return float(np.interp(stat, cv, lv)), False


def hansen_pvalue(stat: float, n_regressors: int, deterministic: str = "c"):
    key = (n_regressors, deterministic)
    if key not in _hansen_table.CRITICAL_VALUES:
        raise ConfigError(f"no Lc table for {n_regressors} regressors with {deterministic!r}")
    return _table_pvalue(stat, _hansen_table.CRITICAL_VALUES[key], _hansen_table.UPPER_TAIL)


def hansen_lc_test(fit: CcrFit) -> CointTestResult:
    """Hansen's Lc on the CCR scores ``z*_t u*_t``.

    ``Lc = tr(M^-1 sum_t S_t S_t') / (T omega_1.2)`` with ``M = Z*'Z*`` and
    ``S_t`` the partial sums of the scores.
    """
    Z, e = fit.Z_star, fit.resid
    T = Z.shape[0]
    S = np.cumsum(Z * e[:, None], axis=0)
    M = Z.T @ Z
    stat = float(np.einsum("ti,ti->", S, np.linalg.solve(M, S.T).T) / (T * fit.omega_1_2))
    p, clamped = hansen_pvalue(stat, len(fit.spec.X), fit.spec.deterministic)
    return CointTestResult("hansen_lc", stat, p, "cointegration", clamped=clamped)


def park_variable_addition_test(data: Dataset, spec: CcrSpec, added_powers=("trend", "trend2"),
                                fit: CcrFit | None = None) -> CointTestResult:
    """Wald test that superfluous trend powers added to the CCR regression are zero.

    The added columns enter the transformed regression alongside ``Z*`` and
    the Wald statistic uses the ``omega_1.2`` of the original fit; it is
    asymptotically chi-square with ``q`` degrees of freedom under cointegration.
    """
    power_of = {"trend": 1, "trend2": 2, "trend3": 3}
    present = len(spec.deterministic) - 1
    powers = []
    for term in added_powers:
        if term not in power_of:
            raise ConfigError(f"unknown added term {term!r}")
        if power_of[term] <= present:
            raise ConfigError(f"{term!r} already in the deterministic specification")
        powers.append(power_of[term])
    q = len(powers)
    if q == 0:
        return CointTestResult("park_chi2", 0.0, 1.0, "cointegration", df=0)
    fit = fit or ccr_fit(data, spec)
    T = fit.Z_star.shape[0]
    t = np.arange(2, T + 2, dtype=float)
    extra = np.column_stack([t**k for k in powers])
    Z = np.hstack([fit.Z_star, extra])
    if np.linalg.matrix_rank(Z) < Z.shape[1]:
        raise SingularError("added trend terms are collinear with the regressors")
    theta, _ = _ols(fit.y_star, Z)
    R = theta[-q:]
    V = np.linalg.inv(Z.T @ Z)[-q:, -q:] * fit.omega_1_2
    stat = float(R @ np.linalg.solve(V, R))
    return CointTestResult("park_chi2", stat, chi2_pvalue(stat, q), "cointegration", df=q)


def chi2_pvalue(stat: float, df: int) -> float:
    if df <= 0:
        return 1.0
    return float(stats.chi2.sf(stat, df))


def _static_residuals(data: Dataset, spec: CcrSpec) -> np.ndarray:
    y, X, T = _prepare(data, spec)
    D = deterministic_terms(T, spec.deterministic)
    _, e = _ols(y, np.hstack([X, D]))
    return e


def _lagmat(x: np.ndarray, k: int) -> np.ndarray:
    n = x.size
    return np.column_stack([x[k - i : n - i] for i in range(1, k + 1)]) if k else np.empty((n - k, 0))


def adf_tau(e, max_lag: int | None = None) -> tuple[float, int]:
    """ADF t-statistic (no deterministic terms) with lag chosen by BIC."""
    e = np.asarray(e, dtype=float)
    T = e.size
    if max_lag is None:
        max_lag = int(12.0 * (T / 100.0) ** 0.25)
    max_lag = max(0, min(max_lag, T // 2 - 2))
    de = np.diff(e)
    lagged = e[:-1]
    # common sample for the lag search
    n = de.size - max_lag
    best = (math.inf, 0)
    for k in range(max_lag + 1):
        Z = np.column_stack([lagged[max_lag:], _lagmat(de, max_lag)[:, :k]])
        _, r = _ols(de[max_lag:], Z)
        bic = math.log(r @ r / n) + Z.shape[1] * math.log(n) / n
        if bic < best[0] - 1e-12:
            best = (bic, k)
    k = best[1]
    Z = np.column_stack([lagged[k:], _lagmat(de, k)])
    coef, r = _ols(de[k:], Z)
    s2 = r @ r / (Z.shape[0] - Z.shape[1])
    se = math.sqrt(s2 * np.linalg.inv(Z.T @ Z)[0, 0])
    return float(coef[0] / se), k


def engle_granger_test(data: Dataset, spec: CcrSpec, max_lag: int | None = None) -> CointTestResult:
    """ADF-tau on static OLS residuals; MacKinnon p-value for ``n`` variables."""
    e = _static_residuals(data, spec)
    tau, k = adf_tau(e, max_lag)
    p = float(mackinnonp(tau, regression=spec.deterministic, N=spec.n))
    return CointTestResult("engle_granger", tau, p, "no_cointegration", detail={"lags": k})


def phillips_ouliaris_zt(e, kernel: KernelSpec | None = None) -> tuple[float, float]:
    """Phillips-Ouliaris ``Z_t`` on residuals ``e``; returns ``(Z_t, bandwidth)``."""
    e = np.asarray(e, dtype=float)
    x, y = e[:-1], e[1:]
    sxx = float(x @ x)
    rho = float(x @ y) / sxx
    k = y - rho * x
    n = k.size
    gamma0 = float(k @ k) / n
    lrv = long_run_variance(k, kernel or KernelSpec())
    lam2 = lrv.scalar
    lam = math.sqrt(lam2)
    zt = ((rho - 1.0) * sxx - 0.5 * n * (lam2 - gamma0)) / (lam * math.sqrt(sxx))
    return float(zt), lrv.bandwidth_used


def phillips_ouliaris_test(data: Dataset, spec: CcrSpec) -> CointTestResult:
    """Phillips-Ouliaris ``Z_t`` on static OLS residuals with a QS/auto long-run variance."""
    e = _static_residuals(data, spec)
    zt, bw = phillips_ouliaris_zt(e, spec.kernel)
    p = float(mackinnonp(zt, regression=spec.deterministic, N=spec.n))
    return CointTestResult("phillips_ouliaris", zt, p, "no_cointegration", detail={"bandwidth": bw})


def cointegration_battery(data: Dataset, spec: CcrSpec, fit: CcrFit | None = None) -> dict:
    """The CCR fit plus all four tests, keyed by test name."""
    fit = fit or ccr_fit(data, spec)
    added = [t for t, p in (("trend", 1), ("trend2", 2)) if p > len(spec.deterministic) - 1]
    return {
        "fit": fit,
        "hansen_lc": hansen_lc_test(fit),
        "park_chi2": park_variable_addition_test(data, spec, added, fit=fit),
        "engle_granger": engle_granger_test(data, spec),
        "phillips_ouliaris": phillips_ouliaris_test(data, spec),
    }
