"""AB-model structural VAR: restriction patterns, identification, ML and bootstrap.

The model is ``A eps_t = B u_t`` with ``E[u u'] = I``, so the reduced-form
covariance is ``Omega = A^-1 B B' A^-1'``.  Free cells of ``A`` and ``B``
are estimated by maximizing the concentrated log-likelihood

    lnLc = -KT/2 ln 2pi + T ln|det A| - T ln|det B| - T/2 tr(W Omega W'),

with ``W = B^-1 A``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import optimize, stats

from .errors import (
    BootstrapError,
    ConfigError,
    ConvergenceError,
    IdentificationError,
    ParseError,
    SingularError,
)
from .varkit import VarFit, var_fit

GRAD_TOL = 1e-7
DET_B_MIN = 1e-12
_NUMBER = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")


def _parse_grid(rows, label: str) -> np.ndarray:
    if isinstance(rows, str):
        rows = [r for r in re.split(r"[/\n;]", rows) if r.strip()]
    out = []
    for r in rows:
        tokens = r.split() if isinstance(r, str) else [str(t) for t in r]
        row = []
        for tok in tokens:
            tok = tok.strip()
            if tok == "*":
                row.append(math.nan)
            elif _NUMBER.match(tok):
                row.append(float(tok))
            else:
                raise ParseError(f"{label}: bad token {tok!r} (use numbers or '*')")
        out.append(row)
    K = len(out)
    if K == 0 or any(len(r) != K for r in out):
        raise ParseError(f"{label}: grid must be square, got row lengths {[len(r) for r in out]}")
    return np.array(out, dtype=float)


@dataclass(frozen=True)
class RestrictionPattern:
    """Fixed/free cells of ``A`` and ``B``; NaN marks a free cell."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        B = np.array(self.B, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape != B.shape:
            raise ConfigError("A and B patterns must be square and of equal size")
        if not np.all(np.diag(A) == 1.0):
            raise ConfigError("A pattern diagonal must be fixed at 1")
        A.setflags(write=False)
        B.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @classmethod
    def parse(cls, A_rows, B_rows) -> "RestrictionPattern":
        """Build from text grids; tokens are numbers (fixed) or ``*`` (free).

        Each grid is a list of row strings (``["1 0", "* 1"]``), a list of
        token lists, or a single string with rows separated by ``/``.
        """
        return cls(_parse_grid(A_rows, "A"), _parse_grid(B_rows, "B"))

    @classmethod
    def recursive(cls, K: int) -> "RestrictionPattern":
        """``A = I`` and lower-triangular free ``B`` (Cholesky identification)."""
        B = np.where(np.tril(np.ones((K, K))) > 0, math.nan, 0.0)
        return cls(np.eye(K), B)

    @property
    def K(self) -> int:
        return self.A.shape[0]

    @property
    def free_A(self) -> np.ndarray:
        return np.isnan(self.A)

    @property
    def free_B(self) -> np.ndarray:
        return np.isnan(self.B)

    @property
    def a_A(self) -> int:
        return int(np.sum(~self.free_A))

    @property
    def b_B(self) -> int:
        return int(np.sum(~self.free_B))

    @property
    def n_free(self) -> int:
        return int(self.free_A.sum() + self.free_B.sum())

    @property
    def param_names(self) -> list:
        names = [f"a{i + 1}{j + 1}" for i, j in zip(*np.nonzero(self.free_A))]
        return names + [f"b{i + 1}{j + 1}" for i, j in zip(*np.nonzero(self.free_B))]

    def unpack(self, theta) -> tuple[np.ndarray, np.ndarray]:
        """Fill free cells (row-major, A first) with ``theta``."""
        theta = np.asarray(theta, dtype=float)
        A = self.A.copy()
        B = self.B.copy()
        na = int(self.free_A.sum())
        A[self.free_A] = theta[:na]
        B[self.free_B] = theta[na:]
        return A, B

    def pack(self, A, B) -> np.ndarray:
        return np.concatenate([np.asarray(A)[self.free_A], np.asarray(B)[self.free_B]])

    def grid_text(self) -> dict:
        def fmt(M):
            return [" ".join("*" if math.isnan(v) else f"{v:g}" for v in row) for row in M]

        return {"A": fmt(self.A), "B": fmt(self.B)}


@dataclass(frozen=True)
class IdentificationReport:
    K: int
    required: int
    imposed: int
    n_free: int
    order_holds: bool
    rank: str  # holds | fails | not_evaluated
    status: str  # just | over | under
    overid_degree: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _omega_jacobian(pattern: RestrictionPattern, theta) -> np.ndarray:
    """Jacobian of ``vech(A^-1 B B' A^-1')`` with respect to the free parameters."""
    A, B = pattern.unpack(theta)
    K = pattern.K
    Ainv = np.linalg.inv(A)
    Phi = Ainv @ B
    iu = np.tril_indices(K)
    cols = []
    for free, which in ((pattern.free_A, "A"), (pattern.free_B, "B")):
        for i, j in zip(*np.nonzero(free)):
            E = np.zeros((K, K))
            E[i, j] = 1.0
            dPhi = -Ainv @ E @ Phi if which == "A" else Ainv @ E
            dOm = dPhi @ Phi.T + Phi @ dPhi.T
            cols.append(dOm[iu])
    return np.column_stack(cols) if cols else np.zeros((len(iu[0]), 0))


def check_identification(pattern: RestrictionPattern, K: int | None = None,
                         points: int = 20, seed: int = 0) -> IdentificationReport:
    """Order condition from counts and rank condition at random parameter points.

    The rank condition holds if the Jacobian of the implied covariance has
    full column rank at any of ``points`` random admissible draws.
    """
    K = pattern.K if K is None else K
    if K != pattern.K:
        raise ConfigError(f"pattern is {pattern.K}x{pattern.K}, expected K={K}")
    required = 2 * K * K - K * (K + 1) // 2
    imposed = pattern.a_A + pattern.b_B
    order = imposed >= required
    n_cov = K * (K + 1) // 2
    rank = "not_evaluated"
    if order:
        rng = np.random.default_rng(seed)
        rank = "fails"
        for _ in range(points):
            theta = rng.standard_normal(pattern.n_free)
            A, B = pattern.unpack(theta)
            B = B + np.where(pattern.free_B & np.eye(K, dtype=bool), 2.0 * np.sign(B + 1e-300), 0.0)
            if abs(np.linalg.det(A)) < 1e-6 or abs(np.linalg.det(B)) < 1e-6:
                continue
            J = _omega_jacobian(pattern, pattern.pack(A, B))
            if J.shape[1] == 0 or np.linalg.matrix_rank(J, tol=1e-8 * max(1.0, np.abs(J).max())) == J.shape[1]:
                rank = "holds"
                break
    degree = n_cov - pattern.n_free
    if not order or rank == "fails":
        status = "under"
    elif degree == 0:
        status = "just"
    else:
        status = "over"
    return IdentificationReport(K, required, imposed, pattern.n_free, order, rank, status, degree)


@dataclass
class SvarFit:
    pattern: RestrictionPattern
    A_hat: np.ndarray
    B_hat: np.ndarray
    loglik: float
    identification: IdentificationReport
    theta: np.ndarray
    se: np.ndarray
    se_method: str
    T: int
    grad_norm: float
    starts_converged: int
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    @property
    def phi0(self) -> np.ndarray:
        return np.linalg.solve(self.A_hat, self.B_hat)

    @property
    def param_names(self) -> list:
        return self.pattern.param_names

    @property
    def pvalues(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.where(self.se > 0, np.abs(self.theta) / self.se, np.inf)
        return 2.0 * stats.norm.sf(z)

    @property
    def identification_label(self) -> str:
        r = self.identification
        return f"over({r.overid_degree})" if r.status == "over" else r.status

    def implied_omega(self) -> np.ndarray:
        P = self.phi0
        return P @ P.T

    def with_se(self, se, method, lower=None, upper=None) -> "SvarFit":
        return SvarFit(**{**self.__dict__, "se": np.asarray(se, dtype=float), "se_method": method,
                          "lower": lower, "upper": upper})

    def to_dict(self) -> dict:
        out = {
            "A": self.A_hat.tolist(),
            "B": self.B_hat.tolist(),
            "phi0": self.phi0.tolist(),
            "loglik": self.loglik,
            "identification": self.identification_label,
            "params": dict(zip(self.param_names, self.theta.tolist())),
            "se": dict(zip(self.param_names, self.se.tolist())),
            "pvalues": dict(zip(self.param_names, self.pvalues.tolist())),
            "se_method": self.se_method,
            "grad_norm": self.grad_norm,
            "starts_converged": self.starts_converged,
        }
        if self.lower is not None:
            out["interval_95"] = {
                n: [lo, hi] for n, lo, hi in zip(self.param_names, self.lower.tolist(), self.upper.tolist())
            }
        return out


def _objective(theta, pattern, omega):
    """Per-observation negative concentrated log-likelihood (without constants) and gradient."""
    A, B = pattern.unpack(theta)
    sa, lda = np.linalg.slogdet(A)
    sb, ldb = np.linalg.slogdet(B)
    if sa == 0 or sb == 0 or ldb < math.log(DET_B_MIN):
        return 1e10, np.zeros_like(theta)
    try:
        Binv = np.linalg.inv(B)
        AinvT = np.linalg.inv(A).T
    except np.linalg.LinAlgError:
        return 1e10, np.zeros_like(theta)
    W = Binv @ A
    WO = W @ omega
    f = -lda + ldb + 0.5 * float(np.sum(WO * W))
    gA = -AinvT + Binv.T @ WO
    gB = Binv.T - Binv.T @ WO @ W.T
    grad = np.concatenate([gA[pattern.free_A], gB[pattern.free_B]])
    return f, grad


def _standardized(pattern: RestrictionPattern, d: np.ndarray) -> RestrictionPattern:
    """Pattern for ``A~ = D^-1 A D`` and ``B~ = D^-1 B`` with ``D = diag(d)``."""
    return RestrictionPattern(pattern.A * d[None, :] / d[:, None], pattern.B / d[:, None])


def _sign_normalize(pattern: RestrictionPattern, B: np.ndarray) -> np.ndarray:
    B = B.copy()
    K = B.shape[0]
    for j in range(K):
        col_fixed = ~pattern.free_B[:, j]
        if np.any(col_fixed & (pattern.B[:, j] != 0)):
            continue
        pivot = B[j, j] if pattern.free_B[j, j] else B[np.argmax(np.abs(B[:, j])), j]
        if pivot < 0:
            B[:, j] = -B[:, j]
    return B


def _initial_theta(pattern: RestrictionPattern, omega: np.ndarray) -> np.ndarray:
    A0 = np.where(pattern.free_A, 0.0, pattern.A)
    L = np.linalg.cholesky(A0 @ omega @ A0.T)
    B0 = np.where(pattern.free_B, L, pattern.B)
    B0 = np.where(pattern.free_B & (B0 == 0), 0.1, B0)
    return pattern.pack(A0, B0)


def _minimize(pattern, omega, x0):
    res = optimize.minimize(_objective, x0, args=(pattern, omega), jac=True, method="BFGS",
                            options={"gtol": 1e-11, "maxiter": 2000})
    x = res.x
    for _ in range(3):
        f, g = _objective(x, pattern, omega)
        if np.max(np.abs(g), initial=0.0) < GRAD_TOL:
            break
        res = optimize.minimize(_objective, x, args=(pattern, omega), jac=True, method="BFGS",
                                options={"gtol": 1e-11, "maxiter": 2000})
        x = res.x
    f, g = _objective(x, pattern, omega)
    return x, f, float(np.max(np.abs(g), initial=0.0))


def _hessian(pattern, omega, theta, eps=1e-5):
    n = theta.size
    H = np.empty((n, n))
    for i in range(n):
        h = np.zeros(n)
        h[i] = eps * max(1.0, abs(theta[i]))
        H[:, i] = (_objective(theta + h, pattern, omega)[1] - _objective(theta - h, pattern, omega)[1]) / (2 * h[i])
    return 0.5 * (H + H.T)


def is_recursive(pattern: RestrictionPattern) -> bool:
    """``A = I`` fixed and ``B`` free exactly on and below the diagonal."""
    K = pattern.K
    lower = np.tril(np.ones((K, K), dtype=bool))
    return (np.array_equal(pattern.A, np.eye(K)) and np.array_equal(pattern.free_B, lower)
            and np.all(pattern.B[~lower] == 0.0))


def svar_ml_fit(var: VarFit, pattern: RestrictionPattern, starts: int = 10, seed: int = 0,
                x0: np.ndarray | None = None, scale: float = 0.5,
                closed_form: bool = False) -> SvarFit:
    """Maximum-likelihood estimate of the free cells of ``A`` and ``B``.

    Quasi-Newton (BFGS) on the analytic gradient from ``starts`` starting
    points: a Cholesky-derived point (or ``x0`` when given) plus Gaussian
    perturbations of it.  The best converged optimum is kept and the ``B``
    columns are sign-normalized to a positive diagonal.  Standard errors
    default to the inverse observed information; see :func:`bootstrap_se`.

    With ``closed_form=True`` a recursive pattern skips the optimizer and
    takes ``B`` as the Cholesky factor of ``Omega_eps``, which is the exact
    ML solution in that case.
    """
    ident = check_identification(pattern)
    if ident.status == "under":
        raise IdentificationError(
            f"model is under-identified: {ident.imposed} restrictions imposed, "
            f"{ident.required} required, rank {ident.rank}"
        )
    omega = var.omega_eps
    try:
        np.linalg.cholesky(omega)
    except np.linalg.LinAlgError:
        raise SingularError("reduced-form covariance is not positive definite") from None
    if closed_form and is_recursive(pattern):
        B = np.linalg.cholesky(omega)
        theta = pattern.pack(np.eye(pattern.K), B)
        gn = float(np.max(np.abs(_objective(theta, pattern, omega)[1])))
        loglik = just_identified_loglik(omega, var.T_eff)
        return SvarFit(pattern, np.eye(pattern.K), B, loglik, ident, theta,
                       np.full(theta.size, np.nan), "none", var.T_eff, gn, 1)
    d = np.sqrt(np.diag(omega))
    Om = omega / np.outer(d, d)
    sp = _standardized(pattern, d)
    if x0 is not None:
        A_in, B_in = pattern.unpack(x0)
        base = sp.pack(A_in * d[None, :] / d[:, None], B_in / d[:, None])
    else:
        base = _initial_theta(sp, Om)
    rng = np.random.default_rng(seed)
    best = None
    n_conv = 0
    for s in range(max(1, starts)):
        if s == 0:
            start = base
        elif s == 1 and x0 is not None:
            start = _initial_theta(sp, Om)
        else:
            start = base + scale * rng.standard_normal(base.size)
        x, f, gn = _minimize(sp, Om, start)
        conv = gn < GRAD_TOL and f < 1e9
        n_conv += conv
        key = (not conv, f)
        if best is None or key < best[0]:
            best = (key, x, f, gn)
    (_, x, f, gn) = best
    At, Bt = sp.unpack(x)
    A = At * d[:, None] / d[None, :]
    B = Bt * d[:, None]
    if n_conv == 0:
        raise ConvergenceError(
            f"no start reached gradient norm < {GRAD_TOL} (best {gn:.3g})",
            best={"A": A, "B": B, "grad_norm": gn},
        )
    B = _sign_normalize(pattern, B)
    theta = pattern.pack(A, B)
    T = var.T_eff
    K = pattern.K
    sa, lda = np.linalg.slogdet(A)
    _, ldb = np.linalg.slogdet(B)
    W = np.linalg.solve(B, A)
    loglik = -0.5 * K * T * math.log(2 * math.pi) + T * lda - T * ldb - 0.5 * T * float(np.trace(W @ omega @ W.T))
    try:
        H = _hessian(pattern, omega, theta) * T
        cov = np.linalg.inv(H)
        se = np.sqrt(np.where(np.diag(cov) > 0, np.diag(cov), np.nan))
    except np.linalg.LinAlgError:
        se = np.full(theta.size, np.nan)
    return SvarFit(pattern, A, B, float(loglik), ident, theta, se, "information", T, gn, n_conv)


def just_identified_loglik(omega: np.ndarray, T: int) -> float:
    K = omega.shape[0]
    return -0.5 * K * T * math.log(2 * math.pi) - 0.5 * T * np.linalg.slogdet(omega)[1] - 0.5 * K * T


def overid_pvalue(stat: float, df: int) -> float:
    if df == 0:
        return 1.0
    return float(stats.chi2.sf(stat, df))


def overid_lr_test(restricted: SvarFit, var: VarFit) -> tuple[float, int, float]:
    """``LR = 2 (lnL_just - lnL_restricted)`` against chi-square(over-identification degree).

    A just-identified fit has degree 0; it returns a zero statistic with
    ``p = 1``.
    """
    df = restricted.identification.overid_degree
    if df < 0 or restricted.identification.status == "under":
        raise IdentificationError("over-identification test needs an identified model")
    lr = 2.0 * (just_identified_loglik(var.omega_eps, var.T_eff) - restricted.loglik)
    lr = max(lr, 0.0) if df > 0 else 0.0
    return float(lr), int(df), overid_pvalue(lr, df)


def structural_shocks(fit: SvarFit, var: VarFit) -> np.ndarray:
    """``u_t = B^-1 A eps_t`` for every residual row."""
    if np.linalg.cond(fit.B_hat) > 1e12:
        raise SingularError("B is singular")
    W = np.linalg.solve(fit.B_hat, fit.A_hat)
    return var.residuals @ W.T


def simulate_var(intercept, A_hats, Y0, eps) -> np.ndarray:
    """Recursion ``Y_t = c + sum_i A_i Y_{t-i} + eps_t`` from initial rows ``Y0``."""
    p = len(A_hats)
    n = eps.shape[0]
    Y = np.empty((p + n, eps.shape[1]))
    Y[:p] = Y0
    for t in range(n):
        y = intercept + eps[t]
        for i, A in enumerate(A_hats, start=1):
            y = y + A @ Y[p + t - i]
        Y[p + t] = y
    return Y


@dataclass
class BootstrapResult:
    draws: np.ndarray  # reps_ok x n_free
    se: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    A_hats: list = field(repr=False)  # per replication reduced-form lag matrices
    phi0: list = field(repr=False)
    reps: int = 0
    failures: int = 0


def bootstrap_se(fit: SvarFit, var: VarFit, reps: int = 500, seed: int = 0,
                 level: float = 0.95) -> BootstrapResult:
    """Recursive-design residual bootstrap of the AB parameters.

    Replication ``r`` draws from ``default_rng([seed, r])``, so results do
    not depend on execution order.
    """
    if reps < 100:
        raise ConfigError("bootstrap needs reps >= 100")
    p = var.p
    eps = var.residuals - var.residuals.mean(axis=0)
    Y0 = var.Y[:p]
    n = eps.shape[0]
    draws, A_list, phi_list = [], [], []
    failures = 0
    for r in range(reps):
        rng = np.random.default_rng([seed, r])
        e = eps[rng.integers(0, n, n)]
        Yb = simulate_var(var.intercept, var.A_hats, Y0, e)
        try:
            vb = var_fit(Yb, p)
            fb = svar_ml_fit(vb, fit.pattern, starts=3, seed=r, x0=fit.theta, closed_form=True)
        except (ConvergenceError, SingularError, np.linalg.LinAlgError):
            failures += 1
            continue
        draws.append(fb.theta)
        A_list.append(vb.A_hats)
        phi_list.append(fb.phi0)
    if failures > 0.10 * reps:
        raise BootstrapError(
            f"{failures} of {reps} bootstrap replications failed",
            diagnostics={"failures": failures, "reps": reps},
        )
    D = np.array(draws)
    alpha = 1.0 - level
    return BootstrapResult(
        draws=D,
        se=D.std(axis=0, ddof=1),
        lower=np.quantile(D, alpha / 2, axis=0),
        upper=np.quantile(D, 1 - alpha / 2, axis=0),
        A_hats=A_list,
        phi0=phi_list,
        reps=reps,
        failures=failures,
    )


def _term(coef: float, label: str, first: bool) -> str:
    if first:
        return f"{coef:.4f} {label}"
    return f"{'-' if coef < 0 else '+'} {abs(coef):.4f} {label}"


def system_listing(fit: SvarFit, eps_labels: Sequence[str] | None = None,
                   shock_labels: Sequence[str] | None = None) -> list[str]:
    """One equation per reduced-form innovation with p-values beneath.

    ``eps_k = -sum_{j != k} a_kj eps_j + sum_l b_kl u_l``; only free cells
    and nonzero fixed cells are shown.
    """
    K = fit.pattern.K
    eps_labels = list(eps_labels or [str(k + 1) for k in range(K)])
    shock_labels = list(shock_labels or eps_labels)
    pv = dict(zip(fit.param_names, fit.pvalues))
    lines = []
    for k in range(K):
        terms, ps = [], []
        for j in range(K):
            if j == k:
                continue
            a = fit.A_hat[k, j]
            if fit.pattern.free_A[k, j] or a != 0:
                terms.append(_term(-a, f"eps_{eps_labels[j]}", not terms))
                ps.append(pv.get(f"a{k + 1}{j + 1}"))
        for j in range(K):
            b = fit.B_hat[k, j]
            if fit.pattern.free_B[k, j] or b != 0:
                terms.append(_term(b, f"u_{shock_labels[j]}", not terms))
                ps.append(pv.get(f"b{k + 1}{j + 1}"))
        lines.append(f"eps_{eps_labels[k]} = " + " ".join(terms))
        lines.append("    " + " ".join("(fixed)" if q is None else f"({q:.4g})" for q in ps))
    return lines
