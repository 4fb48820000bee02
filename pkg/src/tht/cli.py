"""``tht`` command line: run verification suites and write reports."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .harness import SUITES, ConfigError, parse_config, run_suite


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tht", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a verification suite")
    run.add_argument("--suite", choices=SUITES + ("all",))
    run.add_argument("--config", type=Path, help="flat key = value file")
    run.add_argument("--resolution", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--case", choices=("diagonal", "fiberwise"))
    run.add_argument("--a", type=float, help="dyadic multiplier for the diagonal case")
    run.add_argument("--trials", type=int)
    run.add_argument("--tolerance", type=float)
    run.add_argument("--exponents", help="alpha0,alpha1[,alpha2]")
    run.add_argument("--out", dest="out_path", help="JSON report path")
    run.add_argument("--quiet", action="store_true")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    try:
        text = args.config.read_text() if args.config else ""
        keys = ("suite", "resolution", "seed", "case", "a", "trials", "tolerance",
                "exponents", "out_path")
        cfg = parse_config(text, {k: getattr(args, k) for k in keys})
    except (OSError, ConfigError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    report = run_suite(cfg.suite, cfg)
    if not args.quiet:
        print(report.to_table())
    if cfg.out_path:
        out = Path(cfg.out_path)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(report.to_json() + "\n")
        for name in report.tables:
            out.with_name(f"{out.stem}.{name}.csv").write_text(report.to_csv(name))
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
