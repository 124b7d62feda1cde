"""Simulate null quantiles of Hansen's Lc statistic and write svarkit/_hansen_table.py.

Under the null the statistic's limit depends only on the number of I(1)
regressors and the deterministic terms, so exogenous random-walk regressors
with iid errors and static OLS give draws from the right distribution.

    python scripts/gen_hansen_table.py --reps 40000 --nobs 1000
"""

import argparse
from pathlib import Path

import numpy as np

UPPER_TAIL = [0.001, 0.005, 0.01, 0.025, 0.05, 0.075, 0.10, 0.15, 0.20, 0.25, 0.30,
              0.40, 0.50, 0.60, 0.70, 0.80, 0.90, 0.95, 0.975, 0.99]


def lc_draws(m, det, reps, nobs, rng, batch=500):
    t = np.arange(1, nobs + 1) / nobs
    cols = {"c": [np.ones(nobs)], "ct": [np.ones(nobs), t], "ctt": [np.ones(nobs), t, t * t]}[det]
    D = np.column_stack(cols)
    out = []
    for start in range(0, reps, batch):
        b = min(batch, reps - start)
        x = np.cumsum(rng.standard_normal((b, nobs, m)), axis=1)
        y = rng.standard_normal((b, nobs))
        Z = np.concatenate([x, np.broadcast_to(D, (b, nobs, D.shape[1]))], axis=2)
        M = np.einsum("bti,btj->bij", Z, Z)
        theta = np.linalg.solve(M, np.einsum("bti,bt->bi", Z, y)[..., None])[..., 0]
        u = y - np.einsum("bti,bi->bt", Z, theta)
        omega = np.mean(u * u, axis=1)
        S = np.cumsum(Z * u[:, :, None], axis=1)
        Minv = np.linalg.inv(M)
        stat = np.einsum("bti,bij,btj->b", S, Minv, S) / (nobs * omega)
        out.append(stat)
    return np.concatenate(out)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--reps", type=int, default=40000)
    ap.add_argument("--nobs", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=19920101)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "src/svarkit/_hansen_table.py"))
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    lines = [
        '"""Upper-tail quantiles of Hansen\'s Lc under the null of cointegration.',
        "",
        f"Generated by scripts/gen_hansen_table.py (reps={args.reps}, nobs={args.nobs},",
        f"seed={args.seed}).  Keys are (number of I(1) regressors, deterministic terms).",
        '"""',
        "",
        f"UPPER_TAIL = {UPPER_TAIL!r}",
        "",
        "CRITICAL_VALUES = {",
    ]
    for det in ("c", "ct", "ctt"):
        for m in range(1, 6):
            draws = lc_draws(m, det, args.reps, args.nobs, rng)
            q = np.quantile(draws, 1 - np.asarray(UPPER_TAIL))
            vals = ", ".join(f"{v:.4f}" for v in q)
            lines.append(f"    ({m}, {det!r}): [{vals}],")
            print(m, det, "5%:", round(float(np.quantile(draws, 0.95)), 3))
    lines.append("}")
    Path(args.out).write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
