"""Kernel HAC estimation of long-run (zero-frequency) covariance matrices.

One routine serves the KPSS denominator and the three CCR matrices
(contemporaneous, one-sided, two-sided), so they are always assembled from
the same autocovariances.

Lag weighting convention: lag ``j`` receives weight ``k(j / bw)``.  The
classical truncation-lag form for the Bartlett kernel, ``1 - j/(l+1)``, is
reached through :meth:`KernelSpec.lags`, which sets ``bw = l + 1``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np
from scipy import linalg

from .errors import ConfigError, DegenerateError, LengthError, ParseError

logger = logging.getLogger(__name__)

KERNELS = ("quadratic_spectral", "bartlett", "truncated")
PSD_TOL = 1e-10
PREWHITEN_MAX_ROOT = 0.97

# Newey-West (1994) plug-in constants: (characteristic exponent q, c_gamma,
# exponent of the pre-bandwidth lag rule n = 4 (T/100)^a)
_NW_CONSTANTS = {
    "bartlett": (1, 1.1447, 2.0 / 9.0),
    "quadratic_spectral": (2, 1.3221, 2.0 / 25.0),
    "truncated": (2, 0.6611, 2.0 / 25.0),
}


@dataclass(frozen=True)
class KernelSpec:
    """Kernel choice plus bandwidth (a non-negative real or ``"auto"``).

    ``lag_truncation`` is informational: it records the integer lag a
    bandwidth was derived from when built with :meth:`lags`.
    """

    kind: str = "quadratic_spectral"
    bandwidth: Union[float, str] = "auto"
    lag_truncation: int | None = None

    def __post_init__(self):
        if self.kind not in KERNELS:
            raise ConfigError(f"unknown kernel {self.kind!r}; choose from {KERNELS}")
        bw = self.bandwidth
        if isinstance(bw, str):
            if bw != "auto":
                raise ConfigError(f"bandwidth must be a number or 'auto', got {bw!r}")
        else:
            bw = float(bw)
            if not math.isfinite(bw) or bw < 0:
                raise ConfigError(f"fixed bandwidth must be finite and >= 0, got {bw}")
            object.__setattr__(self, "bandwidth", bw)

    @classmethod
    def lags(cls, l: int, kind: str = "bartlett") -> "KernelSpec":
        """Kernel using ``l`` lags: ``bw = l + 1`` for Bartlett, ``bw = l`` otherwise."""
        if int(l) != l or l < 0:
            raise ConfigError(f"lag truncation must be a non-negative integer, got {l}")
        l = int(l)
        bw = l + 1 if kind == "bartlett" else l
        return cls(kind, float(bw), lag_truncation=l)

    @property
    def is_auto(self) -> bool:
        return self.bandwidth == "auto"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "bandwidth": self.bandwidth, "lag_truncation": self.lag_truncation}


def kernel_weight(spec: KernelSpec | str, x):
    """Kernel value ``k(x)``; vectorized over ``x``."""
    kind = spec.kind if isinstance(spec, KernelSpec) else spec
    x = np.abs(np.asarray(x, dtype=float))
    if kind == "bartlett":
        out = np.maximum(0.0, 1.0 - x)
    elif kind == "truncated":
        out = (x <= 1.0).astype(float)
    elif kind == "quadratic_spectral":
        out = np.ones_like(x)
        nz = x > 0
        z = 6.0 * np.pi * x[nz] / 5.0
        out[nz] = 25.0 / (12.0 * np.pi**2 * x[nz] ** 2) * (np.sin(z) / z - np.cos(z))
    else:
        raise ConfigError(f"unknown kernel {kind!r}")
    return out if out.ndim else float(out)


def _as_matrix(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.ndim == 1:
        u = u[:, None]
    if u.ndim != 2:
        raise ParseError("residuals must be a T x K matrix")
    if not np.all(np.isfinite(u)):
        raise ParseError("residuals contain non-finite values")
    return u


def nw_auto_bandwidth(u, spec: KernelSpec | str = "quadratic_spectral", weights=None) -> float:
    """Newey-West (1994) automatic bandwidth from the combination ``u @ weights``."""
    kind = spec.kind if isinstance(spec, KernelSpec) else spec
    u = _as_matrix(u)
    n, K = u.shape
    if n < 8:
        raise LengthError("automatic bandwidth needs T >= 8")
    w = np.ones(K) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (K,):
        raise ConfigError(f"weights must have length {K}")
    f = u @ w
    q, c_gamma, expo = _NW_CONSTANTS[kind]
    n_lag = min(int(4.0 * (n / 100.0) ** expo), n - 1)
    sig = np.array([f[j:] @ f[: n - j] for j in range(n_lag + 1)]) / n
    if sig[0] <= 1e-300 or sig[0] <= 1e-24 * np.mean(u * u):
        raise DegenerateError("residual combination has zero variance")
    j = np.arange(1, n_lag + 1)
    s0 = sig[0] + 2.0 * sig[1:].sum()
    sq = 2.0 * np.sum(j**q * sig[1:])
    cap = float(n - 1)
    if s0 <= 1e-12 * sig[0]:
        return cap
    gamma = c_gamma * ((sq / s0) ** 2) ** (1.0 / (2 * q + 1))
    return float(min(gamma * n ** (1.0 / (2 * q + 1)), cap))


def autocovariances(e: np.ndarray, max_lag: int) -> np.ndarray:
    """``G[j] = n^-1 sum_t e_t e_{t-j}'`` for j = 0..max_lag (shape max_lag+1, K, K)."""
    n, K = e.shape
    max_lag = min(max_lag, n - 1)
    if max_lag <= 64:
        return np.stack([e[j:].T @ e[: n - j] for j in range(max_lag + 1)]) / n
    size = 1 << int(np.ceil(np.log2(2 * n)))
    F = np.fft.rfft(e, n=size, axis=0)
    G = np.empty((max_lag + 1, K, K))
    for a in range(K):
        for b in range(K):
            G[:, a, b] = np.fft.irfft(F[:, a] * np.conj(F[:, b]), n=size)[: max_lag + 1]
    return G / n


@dataclass
class LrvEstimate:
    """Two-sided long-run covariance ``value`` with its building blocks.

    ``sigma`` is the contemporaneous covariance of the input and
    ``one_sided`` the sum over lags ``j >= 0``; ``value = one_sided +
    one_sided' - sigma`` holds to rounding.
    """

    value: np.ndarray
    sigma: np.ndarray
    one_sided: np.ndarray
    bandwidth_used: float
    kernel: KernelSpec
    prewhiten_order: int = 0
    prewhiten_coefs: list = field(default_factory=list)
    prewhiten_shrunk: bool = False
    nobs: int = 0
    clamped: bool = False

    @property
    def prewhitened(self) -> bool:
        return self.prewhiten_order > 0

    @property
    def scalar(self) -> float:
        if self.value.shape != (1, 1):
            raise ValueError("estimate is not scalar")
        return float(self.value[0, 0])

    def to_dict(self) -> dict:
        return {
            "value": self.value.tolist(),
            "sigma": self.sigma.tolist(),
            "one_sided": self.one_sided.tolist(),
            "bandwidth_used": self.bandwidth_used,
            "kernel": self.kernel.to_dict(),
            "prewhiten_order": self.prewhiten_order,
            "prewhiten_shrunk": self.prewhiten_shrunk,
            "nobs": self.nobs,
            "clamped": self.clamped,
        }


def _fit_prewhitening_var(u: np.ndarray, p: int):
    n, K = u.shape
    Y = u[p:]
    X = np.hstack([u[p - i : n - i] for i in range(1, p + 1)])
    coef, *_ = np.linalg.lstsq(X, Y, rcond=None)
    A = [coef[(i * K) : ((i + 1) * K)].T for i in range(p)]
    F = companion(A)
    rho = float(np.max(np.abs(np.linalg.eigvals(F)))) if F.size else 0.0
    shrunk = False
    if rho >= PREWHITEN_MAX_ROOT:
        # scaling A_i by s**i scales every companion root by s
        s = PREWHITEN_MAX_ROOT / rho
        A = [Ai * s ** (i + 1) for i, Ai in enumerate(A)]
        shrunk = True
        logger.info("prewhitening roots shrunk from %.4f to %.2f", rho, PREWHITEN_MAX_ROOT)
    e = Y - X @ np.vstack([Ai.T for Ai in A])
    return A, e, shrunk


def companion(A: list) -> np.ndarray:
    """Companion matrix of the lag polynomial ``I - A_1 L - ... - A_p L^p``."""
    if not A:
        return np.zeros((0, 0))
    K = A[0].shape[0]
    p = len(A)
    F = np.zeros((K * p, K * p))
    F[:K] = np.hstack(A)
    if p > 1:
        F[K:, : K * (p - 1)] = np.eye(K * (p - 1))
    return F


def _white_one_sided(A: list, sigma_e: np.ndarray) -> np.ndarray:
    """sum_{k>=0} Gamma_u(k) for the VAR(p) ``A`` driven by white noise of covariance ``sigma_e``."""
    K = sigma_e.shape[0]
    F = companion(A)
    Q = np.zeros_like(F)
    Q[:K, :K] = sigma_e
    G0 = linalg.solve_discrete_lyapunov(F, Q)
    S = np.linalg.solve(np.eye(F.shape[0]) - F, G0)
    return S[:K, :K]


def _clamp_psd(omega: np.ndarray, scale: float):
    omega = 0.5 * (omega + omega.T)
    vals, vecs = np.linalg.eigh(omega)
    if vals.min() >= 0:
        return omega, False
    if vals.min() < -PSD_TOL * max(scale, 1.0):
        logger.warning("long-run covariance had eigenvalue %.3g; clamped to 0", vals.min())
    vals = np.maximum(vals, 0.0)
    return (vecs * vals) @ vecs.T, True


def long_run_variance(
    u,
    spec: KernelSpec | None = None,
    prewhiten: int = 0,
    center: bool = False,
    dof: int = 0,
    weights=None,
) -> LrvEstimate:
    """Kernel estimate of ``sum_j E[u_t u_{t-j}']`` over all integer ``j``.

    Parameters
    ----------
    u : array_like, T x K (or length T)
    spec : KernelSpec, default quadratic spectral with automatic bandwidth
    prewhiten : int
        Order of the VAR prewhitening filter (0 disables).  The estimate is
        recoloured through ``(I - A_1 - ... - A_p)^{-1}``.
    center : bool
        Demean the columns first.
    dof : int
        Number of estimated parameters behind ``u``; autocovariances are
        scaled by ``n / (n - dof)``.
    weights : array_like, optional
        Combination weights for the automatic bandwidth (default all ones).
    """
    spec = spec or KernelSpec()
    u = _as_matrix(u)
    T, K = u.shape
    if T <= K:
        raise LengthError(f"need T > K, got T={T}, K={K}")
    if prewhiten and T <= K * prewhiten + K:
        raise LengthError(f"VAR({prewhiten}) prewhitening needs T > {K * prewhiten + K}")
    if center:
        u = u - u.mean(axis=0)
    if prewhiten:
        A, e, shrunk = _fit_prewhitening_var(u, prewhiten)
    else:
        A, e, shrunk = [], u, False
    n = e.shape[0]
    if dof and n - dof <= 0:
        raise LengthError("degrees-of-freedom correction exceeds sample size")
    scale = n / (n - dof) if dof else 1.0

    bw = nw_auto_bandwidth(e, spec, weights) if spec.is_auto else float(spec.bandwidth)
    if bw <= 0:
        max_lag = 0
    elif spec.kind == "quadratic_spectral":
        max_lag = n - 1
    else:
        max_lag = min(int(np.floor(bw)), n - 1)
    G = autocovariances(e, max_lag) * scale
    lam_e = G[0].copy()
    if max_lag > 0:
        w = kernel_weight(spec.kind, np.arange(1, max_lag + 1) / bw)
        lam_e += np.tensordot(w, G[1:], axes=1)
    sigma_e = G[0]

    if prewhiten:
        D = np.linalg.inv(np.eye(K) - sum(A))
        sigma = (u.T @ u) / T * (T / (T - dof) if dof else 1.0)
        c_model = D @ sigma_e @ D.T - _white_one_sided(A, sigma_e)
        M = D @ sigma_e @ D.T - sigma
        C = c_model + 0.5 * (M - c_model - c_model.T)
        lam = D @ lam_e @ D.T - C
    else:
        sigma = sigma_e
        lam = lam_e
    omega = lam + lam.T - sigma
    omega_psd, clamped = _clamp_psd(omega, float(np.max(np.abs(np.diag(sigma)))))
    if clamped:
        lam = lam + 0.5 * (omega_psd - omega)
    return LrvEstimate(
        value=omega_psd,
        sigma=0.5 * (sigma + sigma.T),
        one_sided=lam,
        bandwidth_used=float(bw),
        kernel=spec if not spec.is_auto else replace(spec),
        prewhiten_order=int(prewhiten),
        prewhiten_coefs=[a.tolist() for a in A],
        prewhiten_shrunk=shrunk,
        nobs=T,
        clamped=clamped,
    )
