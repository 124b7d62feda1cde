"""Config-driven end-to-end runner: statistics, unit roots, cointegration, VAR, SVAR, dynamics.

A run reads a JSON config, executes the stages in order and writes
``report.json``, ``tables/*.csv`` and ``plots/*.svg`` into the output
directory.  ``report.json`` depends only on the input bytes, the config and
the seed; wall-clock timings go to a separate ``timings.json``.
"""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__, reference
from .coint import CcrSpec, cointegration_battery
from .dynamics import (
    fevd,
    impulse_responses,
    long_run_impact,
    mc_bands,
    write_fevd_csv,
    write_irf_csv,
    write_irf_svg,
)
from .errors import (
    ConfigError,
    DegenerateError,
    LengthError,
    OutlierError,
    StabilityError,
    SvarkitError,
)
from .hac import KernelSpec
from .svar import RestrictionPattern, bootstrap_se, overid_lr_test, svar_ml_fit, system_listing
from .tscore import (
    Dataset,
    TimeSeries,
    correlation_table,
    describe,
    difference,
    load_csv,
    log_transform,
    write_table_csv,
)
from .unitroot import kpss_difference_protocol
from .varkit import diagnostics, select_lag, var_fit, write_residual_tables

OUTPUT_DIR_ENV = "SVARKIT_OUTPUT_DIR"
TRANSFORMS = ("none", "log", "diff", "logdiff")
BURN_IN = 200
OUTLIER_MAX_SHARE = 0.20

# ---------------------------------------------------------------- config


@dataclass(frozen=True)
class PipelineConfig:
    input_path: str | None
    index_col: str
    variables: tuple  # ((name, transform), ...)
    kpss_specs: tuple = ("level", "trend")
    kpss_bandwidth: Any = None  # None -> l4 default, "auto", or a number
    ccr: dict | None = None
    var_p: Any = "auto"
    var_p_max: int = 4
    portmanteau_h: int | None = None
    lr_lm_T: int | None = None
    svar_A: tuple | None = None
    svar_B: tuple | None = None
    shocks: tuple | None = None
    h: int = 10
    fevd_h: int = 10
    reps: int = 500
    seed: int = 0
    multiplier: float = 2.0
    band_method: str = "sd"
    outliers: str = "off"
    outlier_threshold: float = 3.5
    output_dir: str = "svarkit_output"
    synth: dict | None = None
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def names(self) -> list:
        return [n for n, _ in self.variables]

    @classmethod
    def from_dict(cls, cfg: dict, base_dir: Path | None = None) -> "PipelineConfig":
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
        base_dir = Path(base_dir or ".")
        inp = cfg.get("input") or {}
        synth = cfg.get("synth")
        if not inp.get("path") and not synth:
            raise ConfigError("config needs input.path or a synth block")
        path = inp.get("path")
        if path and not Path(path).is_absolute():
            path = str(base_dir / path)
        variables = cfg.get("variables")
        if not variables:
            raise ConfigError("config needs a non-empty 'variables' list")
        pairs = []
        for v in variables:
            if isinstance(v, str):
                v = {"name": v}
            name, tr = v.get("name"), v.get("transform", "none")
            if not name:
                raise ConfigError(f"variable entry without a name: {v}")
            if tr not in TRANSFORMS:
                raise ConfigError(f"{name}: transform must be one of {TRANSFORMS}")
            pairs.append((name, tr))
        if len({n for n, _ in pairs}) != len(pairs):
            raise ConfigError("duplicate variable names")
        kp = cfg.get("kpss") or {}
        specs = tuple(kp.get("specs", ("level", "trend")))
        for s in specs:
            if s not in ("level", "trend"):
                raise ConfigError(f"kpss spec must be 'level' or 'trend', got {s!r}")
        vcfg = cfg.get("var") or {}
        p = vcfg.get("p", "auto")
        if p != "auto" and (not isinstance(p, int) or p < 0):
            raise ConfigError("var.p must be a non-negative integer or 'auto'")
        sv = cfg.get("svar") or {}
        A, B = sv.get("A"), sv.get("B")
        if (A is None) != (B is None):
            raise ConfigError("svar needs both A and B grids")
        if A is not None:
            pat = RestrictionPattern.parse(A, B)  # validates early
            if pat.K != len(pairs):
                raise ConfigError(f"restriction grids are {pat.K}x{pat.K} for {len(pairs)} variables")
        dyn = cfg.get("dynamics") or {}
        shocks = dyn.get("shocks")
        if shocks is not None and len(shocks) != len(pairs):
            raise ConfigError("one shock label per variable is required")
        out = cfg.get("outliers") or {"mode": "off"}
        if isinstance(out, str):
            out = {"mode": out}
        if out.get("mode", "off") not in ("off", "additive"):
            raise ConfigError("outliers.mode must be 'off' or 'additive'")
        thr = float(out.get("threshold", 3.5))
        if not thr > 0:
            raise ConfigError("outlier threshold must be positive")
        ccr = cfg.get("ccr")
        if ccr is not None:
            for n in [ccr.get("y"), *ccr.get("X", [])]:
                if n is None:
                    raise ConfigError("ccr needs 'y' and 'X'")
        mult = float(dyn.get("multiplier", 2.0))
        if mult < 0:
            raise ConfigError("band multiplier must be non-negative")
        reps = int(dyn.get("reps", 500))
        if reps != 0 and reps < 100:
            raise ConfigError("dynamics.reps must be 0 (no bands) or >= 100")
        return cls(
            input_path=path,
            index_col=inp.get("index_col", "year"),
            variables=tuple(pairs),
            kpss_specs=specs,
            kpss_bandwidth=kp.get("bandwidth"),
            ccr=ccr,
            var_p=p,
            var_p_max=int(vcfg.get("p_max", 4)),
            portmanteau_h=vcfg.get("portmanteau_h"),
            lr_lm_T=vcfg.get("lr_lm_T"),
            svar_A=tuple(A) if A is not None else None,
            svar_B=tuple(B) if B is not None else None,
            shocks=tuple(shocks) if shocks else None,
            h=int(dyn.get("h", 10)),
            fevd_h=int(dyn.get("fevd_h", 10)),
            reps=reps,
            seed=int(dyn.get("seed", 0)),
            multiplier=mult,
            band_method=dyn.get("band_method", "sd"),
            outliers=out.get("mode", "off"),
            outlier_threshold=thr,
            output_dir=cfg.get("output_dir", "svarkit_output"),
            synth=synth,
            raw=cfg,
        )

    @classmethod
    def load(cls, path) -> "PipelineConfig":
        path = Path(path)
        try:
            cfg = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return cls.from_dict(cfg, base_dir=path.parent)


# ---------------------------------------------------------------- outliers


def _ar1(y: np.ndarray):
    Z = np.column_stack([np.ones(y.size - 1), y[:-1]])
    if np.linalg.matrix_rank(Z) < 2:
        raise DegenerateError("AR(1) fit is degenerate (constant series)")
    (c, phi), *_ = np.linalg.lstsq(Z, y[1:], rcond=None)
    return float(c), float(phi)


def _robust_z(e: np.ndarray) -> np.ndarray:
    med = np.median(e)
    scale = 1.4826 * np.median(np.abs(e - med))
    if scale <= 0:
        scale = float(np.std(e))
    if scale <= 0:
        raise DegenerateError("AR(1) residuals have zero spread")
    return (e - med) / scale


def _interpolate(y: np.ndarray, t: int, c: float, phi: float) -> float:
    if t == y.size - 1 or abs(phi) >= 1.0:
        return c + phi * y[t - 1]
    mu = c / (1.0 - phi)
    return mu + phi / (1.0 + phi * phi) * ((y[t - 1] - mu) + (y[t + 1] - mu))


def detect_outliers(s: TimeSeries, threshold: float = 3.5) -> tuple[TimeSeries, list]:
    """Flag additive outliers from AR(1) residuals and interpolate them away.

    The largest robust z-score above ``threshold`` is flagged, replaced by
    its AR(1) interpolation from the neighbouring values, and the AR(1) is
    refitted; this repeats until no residual exceeds the threshold.  One
    point at a time avoids flagging the echo an additive spike leaves in the
    next residual.  The first observation has no residual and is never
    flagged.  Returns the linearized series and the flagged periods.
    """
    if threshold <= 0:
        raise ConfigError("threshold must be positive")
    y = s.require_complete().copy()
    T = y.size
    if T < 12:
        raise LengthError("outlier detection needs at least 12 observations")
    max_flags = int(math.floor(OUTLIER_MAX_SHARE * T))
    flagged = []
    while True:
        c, phi = _ar1(y)
        z = _robust_z(y[1:] - c - phi * y[:-1])
        if flagged:
            z[np.array(flagged) - 1] = 0.0
        k = int(np.argmax(np.abs(z)))
        if abs(z[k]) <= threshold:
            break
        t = k + 1
        flagged.append(t)
        if len(flagged) > max_flags:
            raise OutlierError(
                f"{s.name}: more than {OUTLIER_MAX_SHARE:.0%} of observations flagged; refusing to linearize"
            )
        y[t] = _interpolate(y, t, c, phi)
    if not flagged:
        return s, []
    flagged.sort()
    return s.with_values(y), [int(s.index[t]) for t in flagged]


# ---------------------------------------------------------------- synthetic data

RECURSIVE_A1 = np.array([
    [0.5, 0.1, 0.0, 0.0],
    [0.0, 0.4, 0.1, 0.0],
    [0.1, 0.0, 0.3, 0.1],
    [0.0, 0.0, 0.1, 0.2],
])
RECURSIVE_B = np.array([
    [1.0, 0.0, 0.0, 0.0],
    [0.5, 1.0, 0.0, 0.0],
    [0.3, 0.2, 1.0, 0.0],
    [0.2, 0.1, 0.4, 1.0],
])
SYSTEM11_NAMES = ("dcay", "ds_adr", "dns_adr", "dg_gdp")


def dgp_matrices(dgp: str, A=None, B=None, A1=None):
    """``(A, B, A1, names)`` for a named data-generating process."""
    if dgp == "recursive":
        K = RECURSIVE_A1.shape[0]
        return np.eye(K), RECURSIVE_B, RECURSIVE_A1, tuple(f"y{k + 1}" for k in range(K))
    if dgp == "paper_system11":
        return reference.SYSTEM11_A, reference.SYSTEM11_B, reference.recovered_A1(), SYSTEM11_NAMES
    if dgp == "custom":
        if A is None or B is None or A1 is None:
            raise ConfigError("custom DGP needs A, B and A1")
        A, B, A1 = (np.asarray(m, dtype=float) for m in (A, B, A1))
        if not (A.shape == B.shape == A1.shape and A.ndim == 2 and A.shape[0] == A.shape[1]):
            raise ConfigError("custom DGP matrices must be square and of equal size")
        return A, B, A1, tuple(f"y{k + 1}" for k in range(A.shape[0]))
    raise ConfigError(f"unknown DGP {dgp!r}; use recursive, paper_system11 or custom")


def synth_generate(dgp: str, T: int, seed: int, A=None, B=None, A1=None, names=None,
                   levels: bool = False, start: int = 1) -> Dataset:
    """Simulate ``Y_t = A1 Y_{t-1} + A^-1 B u_t`` with standard-normal ``u_t``.

    ``BURN_IN`` initial draws are discarded.  With ``levels=True`` the
    output is the cumulated series (so that first differences follow the
    VAR), which suits runs that test levels and model differences.
    """
    A, B, A1, default_names = dgp_matrices(dgp, A, B, A1)
    if int(T) != T or T < 50:
        raise LengthError(f"T must be an integer >= 50, got {T}")
    mod = np.abs(np.linalg.eigvals(A1)).max()
    if mod >= 1.0:
        raise StabilityError(f"A1 is not stable (spectral radius {mod:.4f})")
    K = A.shape[0]
    names = tuple(names or default_names)
    if len(names) != K:
        raise ConfigError("one name per variable is required")
    P = np.linalg.solve(A, B)
    rng = np.random.default_rng(seed)
    u = rng.standard_normal((BURN_IN + T, K))
    eps = u @ P.T
    Y = np.zeros((BURN_IN + T, K))
    for t in range(1, BURN_IN + T):
        Y[t] = A1 @ Y[t - 1] + eps[t]
    Y = Y[BURN_IN:]
    if levels:
        Y = np.cumsum(Y, axis=0)
    return Dataset.from_array(names, Y, index=np.arange(start, start + T))


# ---------------------------------------------------------------- run


@dataclass
class RunReport:
    stages: dict
    config: dict
    version: str
    warnings: list
    timings: dict = field(default_factory=dict)
    exit_code: int = 0

    @property
    def ok(self) -> bool:
        return self.exit_code == 0

    def to_dict(self) -> dict:
        return {
            "toolkit_version": self.version,
            "status": "ok" if self.ok else "error",
            "config": self.config,
            "warnings": self.warnings,
            "stages": self.stages,
        }

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.to_dict()), indent=2, allow_nan=False) + "\n"


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


def _apply_transform(s: TimeSeries, transform: str) -> TimeSeries:
    if transform == "none":
        return s
    if transform == "log":
        return log_transform(s)
    if transform == "diff":
        return difference(s, 1)
    return difference(log_transform(s), 1)


def _align(series: list) -> Dataset:
    common = series[0].index
    for s in series[1:]:
        common = np.intersect1d(common, s.index)
    cols = []
    for s in series:
        mask = np.isin(s.index, common)
        cols.append(TimeSeries(s.name, s.index[mask], s.values[mask]))
    return Dataset(cols)


def _kpss_kernel(bandwidth):
    if bandwidth is None:
        return None
    if bandwidth == "auto":
        return KernelSpec("bartlett", "auto")
    return KernelSpec("bartlett", float(bandwidth))


def _ccr_spec(cfg: dict) -> CcrSpec:
    kern = cfg.get("kernel", "quadratic_spectral")
    bw = cfg.get("bandwidth", "auto")
    return CcrSpec(
        y=cfg["y"],
        X=tuple(cfg["X"]),
        deterministic=cfg.get("deterministic", "c"),
        kernel=KernelSpec(kern, bw),
        prewhiten=int(cfg.get("prewhiten", 1)),
    )


class _StageRunner:
    def __init__(self):
        self.stages: dict = {}
        self.timings: dict = {}
        self.failed = False
        self.soft_error = False

    def run(self, name, fn, soft=False):
        if self.failed:
            self.stages[name] = {"status": "skipped", "reason": "an earlier stage failed"}
            return None
        t0 = time.perf_counter()
        try:
            artifact = fn()
        except SvarkitError as exc:
            self.stages[name] = {"status": "error", "error": type(exc).__name__, "message": str(exc)}
            if not soft:
                self.failed = True
            self.soft_error = True
            return None
        finally:
            self.timings[name] = time.perf_counter() - t0
        self.stages[name] = {"status": "ok", "artifact": artifact}
        return artifact

    def skip(self, name, reason):
        self.stages[name] = {"status": "skipped", "reason": reason}


def _load_input(cfg: PipelineConfig) -> Dataset:
    if cfg.synth:
        s = cfg.synth
        return synth_generate(s.get("dgp", "paper_system11"), int(s.get("T", 200)), int(s.get("seed", 0)),
                              A=s.get("A"), B=s.get("B"), A1=s.get("A1"), names=cfg.names,
                              levels=bool(s.get("levels", True)))
    data = load_csv(cfg.input_path, cfg.index_col)
    missing = [n for n in cfg.names if n not in data]
    if missing:
        raise ConfigError(f"variables not in input: {missing}")
    return data.select(cfg.names)


def resolve_output_dir(cfg: PipelineConfig) -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV) or cfg.output_dir)


def run_pipeline(config: PipelineConfig, output_dir=None, write: bool = True) -> RunReport:
    """Execute every stage in order and (optionally) write the artifacts.

    Hard stage errors stop the run and mark later stages skipped; the
    long-run impact stage fails softly so impulse responses are still
    produced for unstable systems.  Any recorded error gives exit code 3.
    """
    cfg = config
    out = Path(output_dir) if output_dir is not None else resolve_output_dir(cfg)
    tables, plots = out / "tables", out / "plots"
    if write:
        tables.mkdir(parents=True, exist_ok=True)
        plots.mkdir(parents=True, exist_ok=True)
    runner = _StageRunner()
    warnings: list = []
    ctx: dict = {}

    runner.run("input", lambda: _stage_input(cfg, ctx))

    runner.run("describe", lambda: _stage_describe(ctx, tables if write else None))
    runner.run("transform", lambda: _stage_transform(cfg, ctx))
    if cfg.outliers == "off":
        runner.skip("outliers", "outlier detection disabled")
    else:
        runner.run("outliers", lambda: _stage_outliers(cfg, ctx))
    if cfg.kpss_specs:
        runner.run("kpss", lambda: _stage_kpss(cfg, ctx, warnings, tables if write else None))
    else:
        runner.skip("kpss", "no KPSS specifications configured")
    if cfg.ccr:
        runner.run("cointegration", lambda: _stage_coint(cfg, ctx, warnings))
    else:
        runner.skip("cointegration", "no ccr block in config")
    runner.run("lag_selection", lambda: _stage_lag(cfg, ctx))
    runner.run("var", lambda: _stage_var(cfg, ctx, tables if write else None))
    if cfg.svar_A is None:
        for n in ("svar", "impulse_responses", "long_run_impact", "fevd", "bands"):
            runner.skip(n, "no svar restriction grids in config")
    else:
        runner.run("svar", lambda: _stage_svar(cfg, ctx))
        runner.run("impulse_responses", lambda: _stage_irf(cfg, ctx, tables if write else None))
        runner.run("long_run_impact", lambda: _stage_longrun(cfg, ctx, tables if write else None), soft=True)
        runner.run("fevd", lambda: _stage_fevd(cfg, ctx, tables if write else None))
        if cfg.reps == 0:
            runner.skip("bands", "dynamics.reps = 0")
        else:
            runner.run("bands", lambda: _stage_bands(cfg, ctx, tables if write else None,
                                                      plots if write else None))
    if write and "irf" in ctx and "bands" not in ctx:
        write_irf_svg(ctx["irf"], plots / "irf.svg")

    exit_code = 3 if (runner.failed or runner.soft_error) else 0
    report = RunReport(
        stages=runner.stages,
        config=_jsonable(cfg.raw),
        version=__version__,
        warnings=warnings,
        timings=runner.timings,
        exit_code=exit_code,
    )
    if write:
        (out / "report.json").write_text(report.to_json(), encoding="utf-8")
        (out / "timings.json").write_text(json.dumps(report.timings, indent=2) + "\n", encoding="utf-8")
    return report


def _stage_input(cfg, ctx):
    data = _load_input(cfg)
    ctx["levels"] = data
    return {"T": data.T, "variables": data.names, "first": int(data.index[0]), "last": int(data.index[-1]),
            "source": "synthetic" if cfg.synth else "csv"}


def _stage_describe(ctx, tables):
    data = ctx["levels"]
    summaries = {n: describe(data[n]).to_dict() for n in data.names}
    corr = correlation_table(data)
    if tables is not None:
        fields = ["mean", "median", "stddev", "skewness", "kurtosis", "jarque_bera", "jb_pvalue", "T"]
        write_table_csv(tables / "descriptive.csv", fields, data.names,
                        [[summaries[n][f] for n in data.names] for f in fields])
        write_table_csv(tables / "correlations.csv", data.names, data.names, corr["corr"])
        write_table_csv(tables / "correlation_pvalues.csv", data.names, data.names, corr["pvalue"])
    return {"summary": summaries, "correlations": corr}


def _stage_transform(cfg, ctx):
    data = ctx["levels"]
    series = [_apply_transform(data[n], tr) for n, tr in cfg.variables]
    ctx["model"] = _align(series)
    return {"transforms": dict(cfg.variables), "T": ctx["model"].T}


def _stage_outliers(cfg, ctx):
    data = ctx["model"]
    cols, flagged = [], {}
    for n in data.names:
        s, dates = detect_outliers(data[n], cfg.outlier_threshold)
        cols.append(s)
        flagged[n] = dates
    ctx["model"] = Dataset(cols)
    return {"threshold": cfg.outlier_threshold, "flagged": flagged}


def _stage_kpss(cfg, ctx, warnings, tables):
    data = ctx["levels"]
    kernel = _kpss_kernel(cfg.kpss_bandwidth)
    out = {}
    rows = []
    for n, tr in cfg.variables:
        s = data[n]
        if tr in ("log", "logdiff"):
            s = log_transform(s)
        out[n] = {}
        for spec in cfg.kpss_specs:
            lv, df, order = kpss_difference_protocol(s, spec, kernel)
            out[n][spec] = {"levels": lv.to_dict(), "differences": df.to_dict(), "order": order}
            rows.append([n, spec, lv.table_cell(), df.table_cell(), order])
        orders = {out[n][sp]["order"] for sp in cfg.kpss_specs}
        if tr in ("diff", "logdiff") and orders == {"I0"}:
            warnings.append(f"{n}: KPSS indicates I(0) in levels but the series is differenced")
        if tr in ("none", "log") and "I1" in orders:
            warnings.append(f"{n}: KPSS indicates I(1) but the series enters the VAR in levels")
    if tables is not None:
        write_table_csv(tables / "kpss.csv", [r[0] for r in rows], ["spec", "levels", "differences", "order"],
                        [r[1:] for r in rows], corner="variable")
    return out


def _stage_coint(cfg, ctx, warnings):
    spec = _ccr_spec(cfg.ccr)
    data = ctx["levels"]
    res = cointegration_battery(data, spec)
    fit = res.pop("fit")
    tests = {k: v.to_dict() for k, v in res.items()}
    coint_votes = (tests["hansen_lc"]["pvalue"] > 0.05) + (tests["park_chi2"]["pvalue"] > 0.05) + \
        (tests["engle_granger"]["pvalue"] < 0.05) + (tests["phillips_ouliaris"]["pvalue"] < 0.05)
    verdict = "cointegrated" if coint_votes >= 3 else ("no_cointegration" if coint_votes <= 1 else "mixed")
    if verdict == "cointegrated" and any(tr in ("diff", "logdiff") for _, tr in cfg.variables):
        warnings.append("cointegration tests favour cointegration but the VAR is specified in differences")
    return {"ccr": fit.to_dict(), "tests": tests, "verdict": verdict}


def _stage_lag(cfg, ctx):
    sel = select_lag(ctx["model"], cfg.var_p_max)
    p = sel["bic"] if cfg.var_p == "auto" else cfg.var_p
    ctx["p"] = p
    return {"aic": sel["aic"], "bic": sel["bic"], "hq": sel["hq"], "chosen": p,
            "rule": "bic" if cfg.var_p == "auto" else "fixed", "table": sel["table"]}


def _stage_var(cfg, ctx, tables):
    fit = var_fit(ctx["model"], ctx["p"])
    ctx["var"] = fit
    h = cfg.portmanteau_h
    diag = diagnostics(fit, h=h, T=cfg.lr_lm_T).to_dict()
    if tables is not None:
        write_residual_tables(fit, tables / "residual_correlation.csv", tables / "residual_covariance.csv")
    return {"fit": fit.to_dict(), "diagnostics": diag}


def _shock_labels(cfg):
    return list(cfg.shocks) if cfg.shocks else [f"u_{n}" for n in cfg.names]


def _stage_svar(cfg, ctx):
    pattern = RestrictionPattern.parse(list(cfg.svar_A), list(cfg.svar_B))
    fit = svar_ml_fit(ctx["var"], pattern, seed=cfg.seed)
    out = {"pattern": pattern.grid_text(), "identification": fit.identification.to_dict()}
    if fit.identification.status == "over":
        lr, df, p = overid_lr_test(fit, ctx["var"])
        out["overid_lr"] = {"statistic": lr, "df": df, "pvalue": p}
    if cfg.reps:
        boot = bootstrap_se(fit, ctx["var"], reps=cfg.reps, seed=cfg.seed)
        fit = fit.with_se(boot.se, "bootstrap", boot.lower, boot.upper)
        ctx["boot"] = boot
        out["bootstrap"] = {"reps": boot.reps, "failures": boot.failures}
    ctx["svar"] = fit
    out["fit"] = fit.to_dict()
    out["system"] = system_listing(fit, cfg.names, _shock_labels(cfg))
    return out


def _stage_irf(cfg, ctx, tables):
    irf = impulse_responses(ctx["svar"], ctx["var"], cfg.h, _shock_labels(cfg))
    ctx["irf"] = irf
    if tables is not None:
        write_irf_csv(irf, tables)
    return irf.to_dict()


def _stage_longrun(cfg, ctx, tables):
    psi = long_run_impact(ctx["svar"], ctx["var"])
    if tables is not None:
        write_table_csv(tables / "long_run_impact.csv", cfg.names, _shock_labels(cfg), psi)
    return {"psi_inf": psi.tolist()}


def _stage_fevd(cfg, ctx, tables):
    table = fevd(ctx["svar"], ctx["var"], cfg.fevd_h, _shock_labels(cfg))
    if tables is not None:
        write_fevd_csv(table, tables / "fevd.csv")
    return table.to_dict()


def _stage_bands(cfg, ctx, tables, plots):
    irf = mc_bands(ctx["svar"], ctx["var"], cfg.h, multiplier=cfg.multiplier, method=cfg.band_method,
                   shocks=_shock_labels(cfg), boot=ctx.get("boot"), reps=cfg.reps, seed=cfg.seed)
    ctx["bands"] = irf
    if tables is not None:
        write_irf_csv(irf, tables)
    if plots is not None:
        write_irf_svg(irf, plots / "irf.svg")
    return {"multiplier": irf.multiplier, "method": irf.band_method, "reps": irf.reps,
            "lower": irf.lower.tolist(), "upper": irf.upper.tolist()}
