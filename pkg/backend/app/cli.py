"""
Command-line front end: ``tunnel-wkb rate | scan | figure | validate``.

Flags may be combined with a JSON ``--config`` file; flags win. Records go
to stdout (or ``--output``) as CSV or JSON lines, logs go to stderr, and
failures print ``{"error": category, "message": text}`` to stderr.
"""
import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence

from pydantic import ValidationError

from app.config import Settings, get_settings
from app.core.rate_engine import RateEngine
from app.core.record_writer import write_to_path
from app.exceptions import TunnelingError, UsageError
from app.models.schemas import (
    FIGURE_IDS,
    RECORD_COLUMNS,
    SCAN_COLUMNS,
    Command,
    OutputFormat,
    RunConfig,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CODES = {
    "usage": 2,
    "domain": 3,
    "applicability": 4,
    "convergence": 5,
}

VALIDATION_COLUMNS = ("name", "group", "passed", "measured", "tolerance", "detail")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON file with run parameters; flags override it")
    parser.add_argument("--format", dest="output_format", choices=[f.value for f in OutputFormat])
    parser.add_argument("--output", help="write records here instead of stdout")
    parser.add_argument("--verbose", action="store_true", help="debug logging")


def _add_state(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--potential", choices=["powerlaw", "log"])
    parser.add_argument("--s", type=float, help="power-law exponent, 0 < s < 2")
    parser.add_argument("--V0", type=float, help="logarithmic depth")
    parser.add_argument("--a", type=float, help="logarithmic length scale")
    parser.add_argument("--n", type=int, help="principal quantum number")
    parser.add_argument("--mu", type=float, help="Maslov index override")
    parser.add_argument("--E", type=float, help="explicit level energy")
    parser.add_argument("--method", choices=["oracle", "exact", "asymptotic"])
    parser.add_argument("--order", type=int, help="asymptotic truncation order")
    parser.add_argument("--field-mode", dest="field_mode", choices=["static", "ac"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tunnel-wkb",
        description="WKB tunnel-ionization rates for power-law and logarithmic wells",
        argument_default=argparse.SUPPRESS,
    )
    commands = parser.add_subparsers(dest="command", required=True)

    rate = commands.add_parser("rate", help="single rate", argument_default=argparse.SUPPRESS)
    _add_state(rate)
    rate.add_argument("--F", type=float, help="field strength")
    _add_common(rate)

    scan = commands.add_parser("scan", help="rates over a log-spaced field range",
                               argument_default=argparse.SUPPRESS)
    _add_state(scan)
    scan.add_argument("--F-min", dest="F_min", type=float)
    scan.add_argument("--F-max", dest="F_max", type=float)
    scan.add_argument("--count", type=int, help="number of field values")
    _add_common(scan)

    figure = commands.add_parser("figure", help="figure data", argument_default=argparse.SUPPRESS)
    figure.add_argument("figure", help=f"one of {', '.join(FIGURE_IDS)}")
    _add_common(figure)

    validate = commands.add_parser("validate", help="acceptance suite",
                                   argument_default=argparse.SUPPRESS)
    validate.add_argument("--only", nargs="+", help="criterion names or groups")
    validate.add_argument("--tol-scale", dest="tol_scale", type=float,
                          help="multiply every tolerance by this factor")
    _add_common(validate)
    return parser


def _load_config_file(path: str) -> Dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as handle:
            payload = json.load(handle)
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read config file {path}: {e}") from e
    if not isinstance(payload, dict):
        raise UsageError(f"config file {path} must hold a JSON object")
    return payload


def _split_selectors(values: Sequence[str]) -> List[str]:
    return [part for value in values for part in value.split(",") if part]


def resolve_config(args: argparse.Namespace, settings: Settings) -> RunConfig:
    """Merge the JSON config file and command-line flags into a RunConfig"""
    flags = vars(args).copy()
    flags.pop("verbose", None)
    config_path = flags.pop("config", None)
    merged: Dict[str, Any] = _load_config_file(config_path) if config_path else {}
    merged.update(flags)
    if merged.get("only"):
        merged["only"] = _split_selectors(merged["only"])
    merged.setdefault("output_format", settings.DEFAULT_OUTPUT_FORMAT)
    try:
        return RunConfig(**merged)
    except ValidationError as e:
        problems = "; ".join(f"{'.'.join(map(str, err['loc'])) or 'config'}: {err['msg']}"
                             for err in e.errors())
        raise UsageError(problems) from e


def _report_error(category: str, message: str) -> None:
    print(json.dumps({"error": category, "message": message}), file=sys.stderr)


def run(config: RunConfig, engine: RateEngine) -> int:
    """Execute one command; returns the process exit status"""
    logger.info(f"Running command {config.command.value}")
    if config.command is Command.RATE:
        record = engine.compute_rate(config).to_record()
        write_to_path([record], RECORD_COLUMNS, config.output, sys.stdout, config.output_format)
        return EXIT_OK

    if config.command is Command.SCAN:
        try:
            request = config.scan_request()
        except ValidationError as e:
            raise UsageError(f"invalid scan range: {e.errors()[0]['msg']}") from e
        response = engine.scan(request)
        write_to_path(response.rows, SCAN_COLUMNS, config.output, sys.stdout, config.output_format)
        return EXIT_OK

    if config.command is Command.FIGURE:
        figure = engine.figure(config.figure or "")
        write_to_path(figure.rows, figure.columns, config.output, sys.stdout, config.output_format)
        return EXIT_OK

    report = engine.validate(config.only, config.tol_scale)
    rows = [
        {
            "name": r.name,
            "group": r.group,
            "passed": r.passed,
            "measured": r.measured,
            "tolerance": r.tolerance,
            "detail": r.detail,
        }
        for r in report.results
    ]
    write_to_path(rows, VALIDATION_COLUMNS, config.output, sys.stdout, config.output_format)
    return EXIT_OK if report.passed else EXIT_FAILURE


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse has already printed its usage message
        return int(e.code) if isinstance(e.code, int) else EXIT_CODES["usage"]

    settings = get_settings()
    level = logging.DEBUG if getattr(args, "verbose", False) else settings.LOG_LEVEL.upper()
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )

    try:
        config = resolve_config(args, settings)
        return run(config, RateEngine(settings))
    except TunnelingError as e:
        logger.error(f"{e.category} error: {e}", exc_info=logger.isEnabledFor(logging.DEBUG))
        _report_error(e.category, str(e))
        return EXIT_CODES.get(e.category, EXIT_FAILURE)
    except Exception as e:
        logger.error(f"Unexpected failure: {str(e)}", exc_info=True)
        _report_error("error", str(e))
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
