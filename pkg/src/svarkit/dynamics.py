"""Structural impulse responses, long-run impacts, variance decompositions and bands."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigError, DegenerateError, StabilityError
from .svar import BootstrapResult, SvarFit, bootstrap_se
from .varkit import VarFit, companion_matrix


def ma_coefficients(A_hats: Sequence[np.ndarray], h: int) -> np.ndarray:
    """Reduced-form MA matrices ``Psi_0 = I, Psi_i = sum_j A_j Psi_{i-j}``."""
    A_hats = list(A_hats)
    K = A_hats[0].shape[0] if A_hats else None
    if K is None:
        raise ConfigError("need at least one lag matrix")
    psi = np.zeros((h + 1, K, K))
    psi[0] = np.eye(K)
    for i in range(1, h + 1):
        for j, A in enumerate(A_hats[:i], start=1):
            psi[i] += A @ psi[i - j]
    return psi


def irf_from(A_hats, phi0, h: int) -> np.ndarray:
    """``Phi_i = Psi_i Phi_0`` for ``i = 0..h``, shape ``(h+1, K, K)``."""
    if h < 0:
        raise ConfigError("horizon must be non-negative")
    return ma_coefficients(A_hats, h) @ np.asarray(phi0, dtype=float)


def long_run_from(A_hats, phi0) -> np.ndarray:
    """``(I - A_1 - ... - A_p)^-1 Phi_0``; raises ``StabilityError`` if unstable."""
    A_hats = list(A_hats)
    mod = np.abs(np.linalg.eigvals(companion_matrix(A_hats)))
    if mod.max() >= 1.0:
        raise StabilityError(f"VAR is not stable (max companion modulus {mod.max():.4f})")
    K = A_hats[0].shape[0]
    return np.linalg.solve(np.eye(K) - sum(A_hats), phi0)


@dataclass
class ImpulseSet:
    phis: np.ndarray
    names: list
    shocks: list
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    multiplier: float | None = None
    reps: int | None = None
    band_method: str | None = None

    @property
    def horizons(self) -> np.ndarray:
        return np.arange(self.phis.shape[0])

    @property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.phis, axis=0)

    @property
    def has_bands(self) -> bool:
        return self.lower is not None

    def to_dict(self) -> dict:
        out = {
            "names": self.names,
            "shocks": self.shocks,
            "phis": self.phis.tolist(),
            "cumulative": self.cumulative.tolist(),
        }
        if self.has_bands:
            out.update(lower=self.lower.tolist(), upper=self.upper.tolist(),
                       multiplier=self.multiplier, reps=self.reps, band_method=self.band_method)
        return out


def _labels(var: VarFit, shocks):
    return list(var.names), list(shocks or [f"u{k + 1}" for k in range(var.K)])


def impulse_responses(svar: SvarFit, var: VarFit, h: int, shocks=None) -> ImpulseSet:
    names, shocks = _labels(var, shocks)
    return ImpulseSet(irf_from(var.A_hats, svar.phi0, h), names, shocks)


def long_run_impact(svar: SvarFit, var: VarFit) -> np.ndarray:
    if var.p == 0:
        return svar.phi0
    return long_run_from(var.A_hats, svar.phi0)


@dataclass
class FevdTable:
    rows: list
    cols: list
    shares: np.ndarray
    h: int

    def to_dict(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "h": self.h, "shares": self.shares.tolist()}


def fevd_from(phis: np.ndarray, h: int) -> np.ndarray:
    """Percent shares summing ``Phi_s^2`` over ``s = 0..h-1``."""
    if h < 1:
        raise ConfigError("FEVD horizon must be at least 1")
    if phis.shape[0] < h:
        raise ConfigError(f"need {h} response matrices, got {phis.shape[0]}")
    contrib = np.sum(phis[:h] ** 2, axis=0)
    total = contrib.sum(axis=1, keepdims=True)
    if np.any(total <= 0):
        raise DegenerateError("zero forecast-error variance in some row")
    return 100.0 * contrib / total


def fevd(svar: SvarFit, var: VarFit, h: int, shocks=None) -> FevdTable:
    names, shocks = _labels(var, shocks)
    phis = irf_from(var.A_hats, svar.phi0, max(h - 1, 0))
    return FevdTable(names, shocks, fevd_from(phis, h), h)


def bands_from_draws(point: np.ndarray, draws: np.ndarray, multiplier: float = 2.0,
                     method: str = "sd", level: float = 0.95):
    """Lower/upper bands from replication responses ``draws`` (reps x ...)."""
    if method == "sd":
        sd = draws.std(axis=0, ddof=1)
        return point - multiplier * sd, point + multiplier * sd
    if method == "percentile":
        a = (1.0 - level) / 2.0
        lo, hi = np.quantile(draws, [a, 1.0 - a], axis=0)
        return np.minimum(lo, point), np.maximum(hi, point)
    raise ConfigError(f"band method must be 'sd' or 'percentile', got {method!r}")


def mc_bands(svar: SvarFit, var: VarFit, h: int, reps: int = 500, seed: int = 0,
             multiplier: float = 2.0, method: str = "sd", shocks=None,
             boot: BootstrapResult | None = None) -> ImpulseSet:
    """Impulse responses with bootstrap bands (``point +/- multiplier * SD`` by default).

    Replications come from :func:`svarkit.svar.bootstrap_se`; pass ``boot``
    to reuse an existing run.
    """
    if multiplier < 0:
        raise ConfigError("band multiplier must be non-negative")
    boot = boot or bootstrap_se(svar, var, reps=reps, seed=seed)
    point = impulse_responses(svar, var, h, shocks)
    draws = np.array([irf_from(A, P, h) for A, P in zip(boot.A_hats, boot.phi0)])
    lo, hi = bands_from_draws(point.phis, draws, multiplier, method)
    point.lower, point.upper = lo, hi
    point.multiplier, point.reps, point.band_method = multiplier, boot.reps, method
    return point


@dataclass
class RoundTripReport:
    A1: np.ndarray
    phi2: np.ndarray
    psi_inf: np.ndarray
    phi2_max_error: float
    psi_max_error: float
    phi2_ok: bool
    psi_ok: bool
    sign_discrepancies: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "phi2_max_error": self.phi2_max_error,
            "psi_max_error": self.psi_max_error,
            "phi2_ok": self.phi2_ok,
            "psi_ok": self.psi_ok,
            "sign_discrepancies": self.sign_discrepancies,
        }


def sign_discrepancies(reference: np.ndarray, candidate: np.ndarray, what: str,
                       min_abs: float = 1e-4) -> list:
    """Cells where both entries exceed ``min_abs`` in size but differ in sign (1-based)."""
    out = []
    for i, j in zip(*np.nonzero((np.abs(reference) >= min_abs) & (np.abs(candidate) >= min_abs)
                                & (np.sign(reference) != np.sign(candidate)))):
        out.append({"matrix": what, "cell": [int(i) + 1, int(j) + 1],
                    "reference": float(reference[i, j]), "candidate": float(candidate[i, j])})
    return out


def roundtrip_check(phi0, phi1, phi2, psi_inf, structural_phi0=None, quoted_psi=None,
                    tol_phi2: float = 0.003, tol_psi: float = 0.01) -> RoundTripReport:
    """Recover ``A_1 = Phi_1 Phi_0^-1`` and recompute ``Phi_2`` and ``Psi_inf``.

    Sign discrepancies are reported between ``phi0`` and the impact matrix
    implied by the structural estimates (``structural_phi0``), and between
    the printed ``psi_inf`` and any separately quoted cells.
    """
    phi0 = np.asarray(phi0, dtype=float)
    A1 = np.asarray(phi1, dtype=float) @ np.linalg.inv(phi0)
    phi2_hat = A1 @ A1 @ phi0
    psi_hat = long_run_from([A1], phi0)
    e2 = float(np.max(np.abs(phi2_hat - phi2)))
    ep = float(np.max(np.abs(psi_hat - psi_inf)))
    issues = []
    if structural_phi0 is not None:
        issues += sign_discrepancies(np.asarray(structural_phi0), phi0, "phi0")
    for (i, j), v in (quoted_psi or {}).items():
        if np.sign(v) != np.sign(psi_inf[i, j]):
            issues.append({"matrix": "psi_inf", "cell": [i + 1, j + 1], "reference": float(v),
                           "candidate": float(psi_inf[i, j]), "recomputed": float(psi_hat[i, j])})
    return RoundTripReport(A1, phi2_hat, psi_hat, e2, ep, e2 <= tol_phi2, ep <= tol_psi, issues)


def write_irf_csv(irf: ImpulseSet, directory) -> list[Path]:
    """One CSV per response variable: horizon, then point (and bands) per shock."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, name in enumerate(irf.names):
        path = directory / f"irf_{name}.csv"
        header = ["horizon"]
        for s in irf.shocks:
            header += [s] + ([f"{s}_lower", f"{s}_upper"] if irf.has_bands else [])
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for t in irf.horizons:
                row = [int(t)]
                for j in range(len(irf.shocks)):
                    row.append(repr(float(irf.phis[t, i, j])))
                    if irf.has_bands:
                        row += [repr(float(irf.lower[t, i, j])), repr(float(irf.upper[t, i, j]))]
                w.writerow(row)
        paths.append(path)
    return paths


def write_fevd_csv(table: FevdTable, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"h={table.h}", *table.cols])
        for name, row in zip(table.rows, table.shares):
            w.writerow([name, *(f"{v:.6f}" for v in row)])


def write_irf_svg(irf: ImpulseSet, path) -> None:
    """Grid of line plots, one row per response and one column per shock."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    K, S = len(irf.names), len(irf.shocks)
    with matplotlib.rc_context({"svg.hashsalt": "svarkit", "svg.fonttype": "none"}):
        fig, axes = plt.subplots(K, S, figsize=(3 * S, 2.2 * K), squeeze=False, sharex=True)
        x = irf.horizons
        for i in range(K):
            for j in range(S):
                ax = axes[i, j]
                ax.plot(x, irf.phis[:, i, j], color="C0", lw=1.2)
                if irf.has_bands:
                    ax.plot(x, irf.lower[:, i, j], color="C3", lw=0.8, ls="--")
                    ax.plot(x, irf.upper[:, i, j], color="C3", lw=0.8, ls="--")
                ax.axhline(0.0, color="0.5", lw=0.5)
                ax.set_title(f"{irf.names[i]} to {irf.shocks[j]}", fontsize=8)
                ax.tick_params(labelsize=7)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
