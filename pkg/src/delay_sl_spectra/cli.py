"""``delay-sl-spectra <solve|compare|verify> --config FILE [--out DIR] [--sign paper|corrected]``

Exit codes: 0 success, 1 config or validation error, 2 numeric failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .config import load_config
from .errors import ConfigError, ExpressionError, NumericError, ValidationError
from .report import run_compare, run_solve, run_verify

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2

log = logging.getLogger("delay_sl_spectra")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="delay-sl-spectra",
                                 description="Eigenvalues of a discontinuous retarded Sturm-Liouville problem.")
    ap.add_argument("command", choices=("solve", "compare", "verify"))
    ap.add_argument("--config", required=True, help="config file, or a bundled name (C0, C1, C2)")
    ap.add_argument("--out", type=Path, default=None, help="output directory (default: config 'out' or .)")
    ap.add_argument("--sign", choices=("paper", "corrected"), default=None,
                    help="sign convention of the eigenvalue correction term")
    return ap


def _report_failures(rep) -> int:
    for n, exc in rep.failures:
        print(f"error: n={n}: {type(exc).__name__}: {exc}", file=sys.stderr)
    return EXIT_NUMERIC if rep.failures else EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        cfg = load_config(args.config)
        if args.sign:
            cfg = dataclasses.replace(cfg, sign=args.sign)
    except (ConfigError, ValidationError, ExpressionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "solve":
            rep = run_solve(cfg, args.out)
            print(f"{len(rep.records)} eigenvalues written")
            return _report_failures(rep)
        if args.command == "compare":
            res = run_compare(cfg, args.out)
            print(f"slope(err_leading)={res.slope_leading}  slope(err_refined)={res.slope_refined}  sign={res.sign}")
            return _report_failures(res.report)
        report = run_verify(cfg, args.out)
        for c in report.checks:
            print(f"{c.status.upper():4s} {c.name}: {c.value}")
        print(f"overall: {report.overall}")
        return EXIT_OK
    except NumericError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
