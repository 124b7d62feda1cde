"""Command-line entry point.

    svarkit run config.json
    svarkit kpss data.csv --col cay --spec level --bandwidth auto
    svarkit synth --dgp paper_system11 --t 5000 --seed 7 --out data.csv

Exit codes: 0 success, 2 configuration or input error, 3 stage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ConfigError, ParseError, SvarkitError
from .pipeline import PipelineConfig, resolve_output_dir, run_pipeline, synth_generate
from .tscore import load_csv
from .unitroot import kpss_test

EXIT_OK, EXIT_CONFIG, EXIT_STAGE = 0, 2, 3


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="svarkit", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the full pipeline from a JSON config")
    run.add_argument("config")

    kp = sub.add_parser("kpss", help="KPSS test on one CSV column")
    kp.add_argument("csv")
    kp.add_argument("--col", required=True)
    kp.add_argument("--spec", choices=("level", "trend"), default="level")
    kp.add_argument("--bandwidth", default=None, help="Bartlett bandwidth or 'auto' (default: l4 rule)")
    kp.add_argument("--index-col", default="year")

    sy = sub.add_parser("synth", help="simulate a dataset from a bundled DGP")
    sy.add_argument("--dgp", choices=("recursive", "paper_system11"), default="paper_system11")
    sy.add_argument("--t", type=int, default=200)
    sy.add_argument("--seed", type=int, default=0)
    sy.add_argument("--levels", action="store_true", help="write cumulated (level) series")
    sy.add_argument("--out", required=True)
    return ap


def _kernel(bw):
    from .hac import KernelSpec

    if bw is None:
        return None
    if bw == "auto":
        return KernelSpec("bartlett", "auto")
    try:
        return KernelSpec("bartlett", float(bw))
    except ValueError:
        raise ConfigError(f"--bandwidth must be a number or 'auto', got {bw!r}") from None


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = PipelineConfig.load(args.config)
            report = run_pipeline(cfg)
            print(f"report written to {resolve_output_dir(cfg) / 'report.json'}")
            for name, st in report.stages.items():
                print(f"  {name:18s} {st['status']}" + (f"  {st.get('error')}: {st.get('message')}"
                                                        if st["status"] == "error" else ""))
            return report.exit_code
        if args.command == "kpss":
            data = load_csv(args.csv, args.index_col)
            if args.col not in data:
                raise ConfigError(f"no column {args.col!r} in {args.csv}")
            res = kpss_test(data[args.col], args.spec, _kernel(args.bandwidth))
            print(json.dumps(res.to_dict(), indent=2))
            return EXIT_OK
        if args.command == "synth":
            data = synth_generate(args.dgp, args.t, args.seed, levels=args.levels)
            data.to_csv(args.out)
            print(f"wrote {data.T} rows x {len(data)} columns to {args.out}")
            return EXIT_OK
    except (ConfigError, ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SvarkitError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_STAGE
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
