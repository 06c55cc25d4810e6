# app/cli.py
"""
Command-line entry point.

    python -m app.cli eval --polygon square.txt --point 0.5,0.5 --grad
    python -m app.cli quality --polygon k.json --thresholds '{"sigma_max": 4, ...}'
    python -m app.cli sweep --family cex1 --out cex1.csv
    python -m app.cli rate --in cex2.csv --x s --y h1_semi_error
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from typing import Any, List, Optional

import orjson
from pydantic import ValidationError as PydanticValidationError

from .errors import NumericalError, ValidationError, WachspressError
from .experiments import default_spec, fit_rate, parse_grid, run_sweep
from .models import Family
from .polygon_io import load_polygon, parse_point
from .reporter import failed_rows, paired_columns, read_csv, write_csv
from .schemas import RateOut, ThresholdsIn
from .service import assess, evaluate
from .settings import get_settings

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def _emit(payload: Any) -> None:
    sys.stdout.buffer.write(orjson.dumps(payload, option=orjson.OPT_SERIALIZE_NUMPY | orjson.OPT_APPEND_NEWLINE))
    sys.stdout.flush()


def _fail(kind: str, detail: str) -> None:
    sys.stderr.buffer.write(orjson.dumps({"error": kind, "detail": detail}, option=orjson.OPT_APPEND_NEWLINE))
    sys.stderr.flush()


# ----- Subcommands -----
def cmd_eval(args: argparse.Namespace) -> int:
    p = load_polygon(args.polygon)
    _emit(evaluate(p, parse_point(args.point), args.form, args.grad).model_dump())
    return EXIT_OK


def cmd_quality(args: argparse.Namespace) -> int:
    p = load_polygon(args.polygon)
    thresholds = None
    if args.thresholds:
        try:
            thresholds = ThresholdsIn.model_validate_json(args.thresholds)
        except PydanticValidationError as exc:
            raise ValidationError(f"bad thresholds: {exc.errors(include_url=False)}") from None
    _emit(assess(p, thresholds).model_dump())
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    spec = default_spec(Family(args.family))
    if args.grid:
        spec = replace(spec, s_values=parse_grid(args.grid))
    if args.function:
        spec = replace(spec, function=args.function)
    if args.sides:
        spec = replace(spec, sides=args.sides)
    rows = run_sweep(spec, tol=args.tol, workers=args.workers)
    path = write_csv(rows, args.out)
    logger.info("wrote %d rows to %s", len(rows), path)
    bad = failed_rows(rows)
    if bad:
        for r in bad:
            _fail("SweepRowFailed", f"s={r.s!r}: {r.error}")
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_rate(args: argparse.Namespace) -> int:
    xs, ys = paired_columns(read_csv(args.inp), args.x, args.y)
    fit = fit_rate(xs, ys)
    _emit(RateOut(slope=fit.slope, intercept=fit.intercept, r_squared=fit.r_squared, points=len(xs)).model_dump())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wachspress", description="Wachspress coordinates and interpolation-error sweeps")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="coordinates (and gradients) at one point")
    ev.add_argument("--polygon", required=True, help="vertex file (.txt 'x y' lines or .json)")
    ev.add_argument("--point", required=True, help="X,Y")
    ev.add_argument("--form", choices=("area", "cot"), default="area")
    ev.add_argument("--grad", action="store_true")
    ev.set_defaults(func=cmd_eval)

    q = sub.add_parser("quality", help="shape measures and condition verdicts")
    q.add_argument("--polygon", required=True)
    q.add_argument("--thresholds", help='JSON: {"sigma_max":..,"d_m_min":..,"psi_m_min":..,"psi_M_max":..}')
    q.set_defaults(func=cmd_quality)

    sw = sub.add_parser("sweep", help="error sweep over a polygon family, written as CSV")
    sw.add_argument("--family", required=True, choices=[f.value for f in Family])
    sw.add_argument("--grid", help="comma-separated parameter values (default: data/sweep_grids.yaml)")
    sw.add_argument("--function", help="built-in field name, e.g. x^2, xy, x(1-x), sin(x)cos(y)")
    sw.add_argument("--sides", type=int, help="number of sides for benign-ngon")
    sw.add_argument("--tol", type=float)
    sw.add_argument("--workers", type=int)
    sw.add_argument("--out", required=True)
    sw.set_defaults(func=cmd_sweep)

    r = sub.add_parser("rate", help="log-log slope of one CSV column against another")
    r.add_argument("--in", dest="inp", required=True)
    r.add_argument("--x", required=True)
    r.add_argument("--y", required=True)
    r.set_defaults(func=cmd_rate)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else getattr(logging, get_settings().log_level, logging.WARNING)
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ValidationError as exc:
        _fail(type(exc).__name__, str(exc))
        return EXIT_VALIDATION
    except NumericalError as exc:
        _fail(type(exc).__name__, str(exc))
        return EXIT_NUMERICAL
    except WachspressError as exc:
        _fail(type(exc).__name__, str(exc))
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
