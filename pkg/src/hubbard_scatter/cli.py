"""Command line entry point: ``run``, ``sweep`` and ``selftest``.

Exit codes: 0 success, 1 configuration or output-path error, 2 numeric contract
violation.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .config import ConfigError, load_config
from .metrics import PartitionError
from .propagator import NumericContractError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2

log = logging.getLogger("hubbard_scatter")


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hubbard-scatter", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment config")
    run.add_argument("--config", required=True, type=Path)
    run.add_argument("--out", required=True, type=Path)

    sweep = sub.add_parser("sweep", help="evaluate the Cartesian product of the config's grids")
    sweep.add_argument("--config", required=True, type=Path)
    sweep.add_argument("--out", required=True, type=Path)
    sweep.add_argument("--workers", type=int, default=1)

    test = sub.add_parser("selftest", help="run the invariant checks")
    test.add_argument("--quick", action="store_true", help="skip the lattice-dynamics checks")
    return ap


def _report_config_error(exc: ConfigError) -> int:
    for path, msg in exc.errors:
        print(f"config error: {path}: {msg}", file=sys.stderr)
    return EXIT_CONFIG


def _execute(args, sweep: bool) -> int:
    from .runner import execute, write_run, write_sweep

    try:
        cfg = load_config(args.config)
        if sweep and args.workers < 1:
            raise ConfigError([("--workers", "must be >= 1")])
        n = cfg.n_points()
        log.info("%s: %d grid point(s)", cfg.experiment, n)
        result = execute(cfg, workers=args.workers if sweep else 1)
    except ConfigError as exc:
        return _report_config_error(exc)
    except (NumericContractError, PartitionError) as exc:
        print(f"numeric contract violation: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    try:
        paths = (write_sweep if sweep else write_run)(result, args.out)
    except OSError as exc:
        print(f"cannot write to {args.out}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_CONFIG
    for p in paths:
        print(p)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(asctime)s %(message)s")
    if args.command == "run":
        return _execute(args, sweep=False)
    if args.command == "sweep":
        return _execute(args, sweep=True)
    from .selftest import run_selftest

    return EXIT_OK if run_selftest(quick=args.quick) else EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
