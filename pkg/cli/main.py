"""
Command-line entry point.

    python app.py wave --preset ks
    python app.py spectrum absolute --preset ks-absolute --out abs.csv
    python app.py evans wind --preset ks-origin
    python app.py crossings --preset fkpp-crossings

Exit codes: 0 success, 2 configuration/model/numerical error,
3 zero of E on the contour, 4 branch-point proximity.
"""

import argparse
import logging
import sys
from typing import Optional, Sequence

from cli.commands.crossings import cmd_crossings
from cli.commands.evans import cmd_evans
from cli.commands.spectrum import cmd_spectrum
from cli.commands.wave import cmd_wave
from cli.dependencies import ConfigError, resolve_config
from config.logging_utils import log_error, set_debug
from config.settings import settings
from services.evans_service import EvansError, ZeroOnContour
from services.fkpp_service import BranchPointError, ModelError
from services.numerics_service import NumericsError
from services.output_service import OutputServiceError
from services.projective_service import ProjectiveError
from services.spectrum_service import SpectrumError


EXIT_OK = 0
EXIT_ERROR = 2
EXIT_ZERO_ON_CONTOUR = 3
EXIT_BRANCH_POINT = 4


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="TOML or JSON run configuration")
    parser.add_argument("--preset", help="shipped preset name")
    parser.add_argument("--out", help="output path (default: standard output)")
    parser.add_argument("--format", choices=["csv", "json"], dest="fmt")
    parser.add_argument("--debug", action="store_true", help="trace progress on standard error")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=settings.APP_NAME, description="Riccati Evans-function toolkit")
    parser.add_argument("--version", action="version", version=settings.APP_VERSION)
    commands = parser.add_subparsers(dest="command", required=True)

    wave = commands.add_parser("wave", help="travelling-wave profile")
    _common(wave)

    spectrum = commands.add_parser("spectrum", help="continuous/absolute spectrum data")
    spectrum.add_argument("view", choices=["continuous", "absolute", "regions", "weighted"])
    _common(spectrum)

    evans = commands.add_parser("evans", help="Evans-function evaluation and winding")
    evans.add_argument("view", choices=["eval", "wind", "track"])
    evans.add_argument("--count-poles", action="store_true", help="wind: report N = winding + P")
    evans.add_argument("--workers", type=int, help="worker processes for contour samples")
    _common(evans)

    crossings = commands.add_parser("crossings", help="F-KPP crossing counts for real λ ≥ 0")
    crossings.add_argument("--lambdas", type=float, nargs="+", help="override the configured λ list")
    _common(crossings)
    return parser


def _dispatch(args: argparse.Namespace) -> int:
    config = resolve_config(args.config, args.preset, args.out, args.fmt)
    if getattr(args, "workers", None):
        config = config.model_copy(update={"workers": args.workers})
    if getattr(args, "lambdas", None):
        config = config.model_copy(update={"lambdas": [complex(x) for x in args.lambdas]})

    if args.command == "wave":
        return cmd_wave(config)
    if args.command == "spectrum":
        return cmd_spectrum(config, args.view)
    if args.command == "evans":
        return cmd_evans(config, args.view, count_poles=args.count_poles)
    return cmd_crossings(config)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run the command and map failures to exit codes."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.debug else logging.WARNING, stream=sys.stderr)
    if args.debug:
        set_debug(True)

    try:
        return _dispatch(args)
    except ZeroOnContour as e:
        log_error(f"zero on contour: {e}", prefix="CLI")
        return EXIT_ZERO_ON_CONTOUR
    except BranchPointError as e:
        log_error(f"branch point: {e}", prefix="CLI")
        return EXIT_BRANCH_POINT
    except (ConfigError, ModelError, NumericsError, ProjectiveError, SpectrumError, EvansError, OutputServiceError) as e:
        log_error(f"{type(e).__name__}: {e}", prefix="CLI")
        return EXIT_ERROR
