"""Command line entry point.

    rflab <scenario> --config run.json [--out DIR] [--threads N] [--plots]
    rflab oracle disk --radius R --lambda-max L

Exit status: 0 when every check passes, 2 when a check fails, 3 on an
infrastructure error (bad config, solver or flow failure, I/O).
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace

from ..errors import RflabError
from ..spectral import disk_eigen_table
from .config import SCENARIOS, ExperimentConfig
from .reports import write_run
from .scenarios import run

EXIT_OK, EXIT_FAILED, EXIT_INFRA = 0, 2, 3

log = logging.getLogger("rflab")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rflab", description=__doc__.split("\n")[0])
    p.add_argument("scenario", choices=SCENARIOS)
    p.add_argument("target", nargs="?", help="for 'oracle': 'disk' prints the analytic spectrum")
    p.add_argument("--config", help="experiment config (JSON)")
    p.add_argument("--out", help="output directory (overrides the config)")
    p.add_argument("--threads", type=int, help="parallel spectral solves (RFLAB_THREADS wins)")
    p.add_argument("--plots", action="store_true", help="also write SVG plots")
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--lambda-max", type=float, default=50.0)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _threads(arg: int | None, default: int) -> int:
    env = os.environ.get("RFLAB_THREADS")
    if env:
        return int(env)
    return arg if arg is not None else default


def print_disk_oracle(radius: float, cutoff: float, stream=None) -> None:
    stream = stream or sys.stdout
    stream.write("lambda,m,n,multiplicity\n")
    for lam, m, n in disk_eigen_table(radius, cutoff):
        stream.write(f"{lam:.17g},{m},{n},{1 if m == 0 else 2}\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.scenario == "oracle" and args.target is not None:
            if args.target != "disk":
                raise ValueError(f"unknown oracle {args.target!r}")
            print_disk_oracle(args.radius, args.lambda_max)
            return EXIT_OK
        if not args.config:
            raise ValueError("--config is required")
        cfg = ExperimentConfig.load(args.config)
        if cfg.scenario != args.scenario:
            raise ValueError(f"config is for scenario {cfg.scenario!r}, not {args.scenario!r}")
        cfg = replace(cfg, threads=_threads(args.threads, cfg.threads),
                      output=args.out or cfg.output)
        result = run(cfg)
        manifest = write_run(result, cfg, cfg.output, plots=args.plots)
    except (RflabError, ValueError, KeyError, TypeError, OSError, json.JSONDecodeError) as exc:
        print(f"rflab: error: {exc}", file=sys.stderr)
        return EXIT_INFRA
    for c in result.checks:
        mark = "PASS" if c.passed else "FAIL"
        print(f"{mark} {c.name}: value={c.value:.6g} margin={c.margin:.3g} noise={c.noise_floor:.3g}")
    print(f"{manifest['n_checks'] - manifest['n_failed']}/{manifest['n_checks']} checks passed; "
          f"artifacts in {cfg.output}")
    return EXIT_OK if result.passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
