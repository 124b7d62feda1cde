"""Reduced-form VAR(p) estimation by equation-wise OLS and residual diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import stats

from .errors import ConfigError, DegenerateError, LengthError, ParseError, SingularError
from .tscore import Dataset, write_table_csv


@dataclass(frozen=True)
class VarFit:
    names: tuple
    p: int
    intercept: np.ndarray
    A_hats: tuple
    residuals: np.ndarray
    omega_eps: np.ndarray
    loglik: float
    T_eff: int
    Y: np.ndarray  # full T x K data the fit was computed from

    @property
    def K(self) -> int:
        return len(self.names)

    @property
    def coef_matrix(self) -> np.ndarray:
        """``[c, A_1, ..., A_p]`` as a K x (1 + K p) matrix."""
        return np.hstack([self.intercept[:, None], *self.A_hats])

    @property
    def A_sum(self) -> np.ndarray:
        return sum(self.A_hats, np.zeros((self.K, self.K)))

    def regressors(self) -> np.ndarray:
        return var_regressors(self.Y, self.p)

    def to_dict(self) -> dict:
        return {
            "names": list(self.names),
            "p": self.p,
            "intercept": self.intercept.tolist(),
            "A": [a.tolist() for a in self.A_hats],
            "omega_eps": self.omega_eps.tolist(),
            "loglik": self.loglik,
            "T_eff": self.T_eff,
        }


def var_regressors(Y: np.ndarray, p: int, start: int | None = None) -> np.ndarray:
    """Rows ``(1, Y_{t-1}', ..., Y_{t-p}')`` for ``t = start..T-1`` (default ``start = p``)."""
    T = Y.shape[0]
    start = p if start is None else start
    cols = [np.ones((T - start, 1))]
    for i in range(1, p + 1):
        cols.append(Y[start - i : T - i])
    return np.hstack(cols)


def gaussian_loglik(omega: np.ndarray, n: int) -> float:
    K = omega.shape[0]
    sign, logdet = np.linalg.slogdet(omega)
    if sign <= 0:
        return -math.inf
    return -0.5 * n * K * (math.log(2.0 * math.pi) + 1.0) - 0.5 * n * logdet


def _data_matrix(data) -> tuple[tuple, np.ndarray]:
    if isinstance(data, Dataset):
        return tuple(data.names), data.to_array()
    Y = np.asarray(data, dtype=float)
    if Y.ndim != 2:
        raise LengthError("VAR data must be T x K")
    return tuple(f"y{i + 1}" for i in range(Y.shape[1])), Y


def var_fit(data, p: int) -> VarFit:
    """Equation-by-equation OLS of ``Y_t`` on an intercept and ``p`` lags.

    ``omega_eps`` and the log-likelihood use the effective sample
    ``T_eff = T - p`` as divisor.
    """
    names, Y = _data_matrix(data)
    T, K = Y.shape
    if p < 0:
        raise ConfigError("lag order must be non-negative")
    if T - p <= K * p + 1:
        raise LengthError(f"VAR({p}) with K={K} needs T - p > K p + 1, got T={T}")
    Z = var_regressors(Y, p)
    Yt = Y[p:]
    if np.linalg.matrix_rank(Z) < Z.shape[1]:
        raise SingularError("regressor matrix is rank deficient")
    coef, *_ = np.linalg.lstsq(Z, Yt, rcond=None)
    resid = Yt - Z @ coef
    n = T - p
    omega = resid.T @ resid / n
    B = coef.T
    A_hats = tuple(B[:, 1 + i * K : 1 + (i + 1) * K].copy() for i in range(p))
    return VarFit(
        names=names,
        p=p,
        intercept=B[:, 0].copy(),
        A_hats=A_hats,
        residuals=resid,
        omega_eps=omega,
        loglik=gaussian_loglik(omega, n),
        T_eff=n,
        Y=Y,
    )


def information_criteria(omega: np.ndarray, n: int, n_params: int) -> dict:
    logdet = np.linalg.slogdet(omega)[1]
    return {
        "aic": logdet + 2.0 * n_params / n,
        "bic": logdet + math.log(n) * n_params / n,
        "hq": logdet + 2.0 * math.log(math.log(n)) * n_params / n,
    }


def select_lag(data, p_max: int) -> dict:
    """Lag order minimizing AIC, BIC and HQ over ``0..p_max`` on a common sample.

    The first ``p_max`` observations are held out for every candidate so the
    criteria are comparable.  Returns ``{"aic": p, "bic": p, "hq": p,
    "table": {p: {criterion: value}}}``.
    """
    names, Y = _data_matrix(data)
    T, K = Y.shape
    if p_max < 0 or T - p_max <= K * p_max + 1:
        raise ConfigError(f"p_max={p_max} infeasible for T={T}, K={K}")
    n = T - p_max
    Yt = Y[p_max:]
    table = {}
    for p in range(p_max + 1):
        Z = var_regressors(Y, p, start=p_max)
        coef, *_ = np.linalg.lstsq(Z, Yt, rcond=None)
        e = Yt - Z @ coef
        table[p] = information_criteria(e.T @ e / n, n, p * K * K)
    out = {c: min(table, key=lambda q: (table[q][c], q)) for c in ("aic", "bic", "hq")}
    out["table"] = table
    return out


def companion_matrix(A_hats: Sequence[np.ndarray]) -> np.ndarray:
    K = A_hats[0].shape[0]
    p = len(A_hats)
    F = np.zeros((K * p, K * p))
    F[:K] = np.hstack(A_hats)
    if p > 1:
        F[K:, :-K] = np.eye(K * (p - 1))
    return F


def stability_check(fit: VarFit) -> tuple[np.ndarray, bool]:
    """Companion eigenvalue moduli in descending order and whether all are < 1."""
    if fit.p == 0:
        return np.zeros(0), True
    mod = np.sort(np.abs(np.linalg.eigvals(companion_matrix(fit.A_hats))))[::-1]
    return mod, bool(mod[0] < 1.0)


def portmanteau_test(fit: VarFit, h: int) -> tuple[float, int, float]:
    """Adjusted multivariate Ljung-Box statistic on the residuals.

    ``Q = T^2 sum_{j=1}^h (T - j)^-1 tr(C_j' C_0^-1 C_j C_0^-1)`` with
    ``df = K^2 (h - p)``.
    """
    if h <= fit.p:
        raise ConfigError(f"portmanteau lag h={h} must exceed the VAR order p={fit.p}")
    u = fit.residuals
    n, K = u.shape
    if h >= n:
        raise ConfigError(f"portmanteau lag h={h} must be below T_eff={n}")
    C0 = u.T @ u / n
    C0inv = np.linalg.inv(C0)
    Q = 0.0
    for j in range(1, h + 1):
        Cj = u[j:].T @ u[:-j] / n
        Q += np.trace(Cj.T @ C0inv @ Cj @ C0inv) / (n - j)
    Q *= n * n
    df = K * K * (h - fit.p)
    return float(Q), df, float(stats.chi2.sf(Q, df))


def brown_forsythe_test(groups) -> tuple[float, float]:
    """Levene-type test on absolute deviations from group medians.

    ``groups`` is either a T x K matrix (each column a group) or a sequence
    of 1-d arrays.
    """
    if isinstance(groups, np.ndarray) and groups.ndim == 2:
        groups = [groups[:, k] for k in range(groups.shape[1])]
    groups = [np.asarray(g, dtype=float) for g in groups]
    if len(groups) < 2:
        raise DegenerateError("need at least two groups")
    if any(g.size < 2 for g in groups):
        raise DegenerateError("each group needs at least two observations")
    devs = [np.abs(g - np.median(g)) for g in groups]
    grand = np.concatenate(devs)
    if np.all(grand == 0.0):
        raise DegenerateError("all absolute deviations are zero")
    within = sum(float(np.sum((d - d.mean()) ** 2)) for d in devs)
    if within == 0.0:
        # equal spread within groups; differences only in level
        return (0.0, 1.0) if np.ptp([d.mean() for d in devs]) == 0 else (math.inf, 0.0)
    res = stats.levene(*groups, center="median")
    return float(res.statistic), float(res.pvalue)


def lr_diag_test(omega: np.ndarray, T: int) -> tuple[float, int, float]:
    """``LR = T (sum_k ln sigma_kk - ln|Omega|)`` for a diagonal covariance, df ``K(K-1)/2``."""
    omega = np.asarray(omega, dtype=float)
    K = omega.shape[0]
    if omega.shape != (K, K) or not np.allclose(omega, omega.T):
        raise SingularError("covariance matrix must be square and symmetric")
    try:
        L = np.linalg.cholesky(omega)
    except np.linalg.LinAlgError:
        raise SingularError("covariance matrix is not positive definite") from None
    logdet = 2.0 * float(np.sum(np.log(np.diag(L))))
    lr = T * (float(np.sum(np.log(np.diag(omega)))) - logdet)
    lr = max(lr, 0.0)
    df = K * (K - 1) // 2
    return lr, df, float(stats.chi2.sf(lr, df))


def lm_diag_test(R: np.ndarray, T: int) -> tuple[float, int, float]:
    """Breusch-Pagan ``LM = T sum_{k>l} r_kl^2``, df ``K(K-1)/2``."""
    R = np.asarray(R, dtype=float)
    K = R.shape[0]
    if R.ndim != 2 or R.shape != (K, K):
        raise ParseError("correlation matrix must be square")
    if not np.allclose(np.diag(R), 1.0, atol=1e-12, rtol=0):
        raise ParseError("correlation matrix must have a unit diagonal")
    if not np.allclose(R, R.T) or np.any(np.abs(R) > 1.0 + 1e-12):
        raise ParseError("not a valid correlation matrix")
    lm = T * float(np.sum(np.tril(R, -1) ** 2))
    df = K * (K - 1) // 2
    return lm, df, float(stats.chi2.sf(lm, df))


def residual_correlation(fit: VarFit) -> np.ndarray:
    d = np.sqrt(np.diag(fit.omega_eps))
    return fit.omega_eps / np.outer(d, d)


def gls_refit(fit: VarFit) -> np.ndarray:
    """SUR/GLS coefficients ``[c, A_1..A_p]`` with ``Omega_eps^-1`` weights.

    With identical regressors in every equation this equals OLS exactly.
    """
    Z = fit.regressors()
    Yt = fit.Y[fit.p :]
    W = np.linalg.inv(fit.omega_eps)
    ZZ = Z.T @ Z
    lhs = np.kron(W, ZZ)
    rhs = (Z.T @ Yt @ W).T.reshape(-1)  # equation-major stacking of Z' Y W
    b = np.linalg.solve(lhs, rhs)
    return b.reshape(fit.K, -1)


@dataclass
class DiagnosticsReport:
    portmanteau: tuple
    brown_forsythe: tuple
    lr_diag: tuple
    lm_diag: tuple
    stability: np.ndarray
    is_stable: bool
    lag: int = field(default=0)

    def to_dict(self) -> dict:
        def trip(x):
            return {"statistic": x[0], "df": x[1], "pvalue": x[2]}

        return {
            "portmanteau": {**trip(self.portmanteau), "h": self.lag},
            "brown_forsythe": {"statistic": self.brown_forsythe[0], "pvalue": self.brown_forsythe[1]},
            "lr_diag": trip(self.lr_diag),
            "lm_diag": trip(self.lm_diag),
            "stability_moduli": self.stability.tolist(),
            "is_stable": self.is_stable,
        }


def diagnostics(fit: VarFit, h: int | None = None, T: int | None = None) -> DiagnosticsReport:
    """Run the residual battery.  ``T`` for the LR/LM tests defaults to ``T_eff``."""
    h = h if h is not None else max(fit.p + 1, min(12, fit.T_eff // 4))
    T = T or fit.T_eff
    mod, ok = stability_check(fit)
    return DiagnosticsReport(
        portmanteau=portmanteau_test(fit, h),
        brown_forsythe=brown_forsythe_test(fit.residuals),
        lr_diag=lr_diag_test(fit.omega_eps, T),
        lm_diag=lm_diag_test(residual_correlation(fit), T),
        stability=mod,
        is_stable=ok,
        lag=h,
    )


def upper_triangle_rows(M: np.ndarray) -> list:
    """Rows of ``M`` with the strictly lower part blanked (``None``)."""
    M = np.asarray(M, dtype=float)
    K = M.shape[0]
    return [[None if j < i else float(M[i, j]) for j in range(K)] for i in range(K)]


def write_residual_tables(fit: VarFit, corr_path, cov_path, prefix: str = "res_") -> None:
    """Residual correlation and covariance tables in upper-triangular layout."""
    labels = [prefix + n for n in fit.names]
    write_table_csv(corr_path, labels, labels, upper_triangle_rows(residual_correlation(fit)))
    write_table_csv(cov_path, labels, labels, upper_triangle_rows(fit.omega_eps))
