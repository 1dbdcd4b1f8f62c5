"""nogolab <experiment> [options]; exit status 0 iff every check passed."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..errors import NogolabError
from .experiments import CATALOG, RunConfig, run_experiment


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nogolab", description="Run one experiment and print its report.")
    p.add_argument("experiment", choices=sorted(CATALOG))
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int)
    p.add_argument("--eta", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(
        experiment=args.experiment,
        m=args.m,
        n=args.n,
        trials=args.trials,
        seed=args.seed,
        k=args.k,
        eta=args.eta,
        tol=args.tol,
        out=args.out,
        format=args.format,
        workers=args.workers,
    )
    try:
        report = run_experiment(cfg)
    except (NogolabError, ValueError) as exc:
        print(f"nogolab: {exc}", file=sys.stderr)
        return 2
    text = report.to_json() if cfg.format == "json" else report.to_csv()
    if cfg.out:
        Path(cfg.out).write_text(text + "\n")
    else:
        print(text)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
