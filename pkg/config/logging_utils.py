"""
Run Logging

Debug-gated progress lines for wave shooting, Evans windings and spectrum
scans. Everything goes to stderr; stdout carries only command results.
"""

import logging
import sys
from datetime import datetime
from typing import Literal, Optional

from config.settings import settings


# Subsystems a log line can be tagged with
Area = Literal["", "WAVE", "EVANS", "SPECTRUM", "PROJECTIVE", "CLI"]

_BAR_WIDTH = 20

_debug_logger = logging.getLogger("evans.debug")
_debug_handler = logging.StreamHandler(sys.stderr)
_debug_handler.setFormatter(
    logging.Formatter('[%(asctime)s] [DEBUG] %(message)s', datefmt='%H:%M:%S')
)
_debug_logger.addHandler(_debug_handler)
_debug_logger.setLevel(logging.DEBUG if settings.DEBUG else logging.WARNING)
_debug_logger.propagate = False


def set_debug(enabled: bool) -> None:
    """Switch debug output on or off for the rest of the run (--debug)."""
    settings.DEBUG = enabled
    _debug_logger.setLevel(logging.DEBUG if enabled else logging.WARNING)


def _emit(text: str, area: Area = "") -> None:
    stamp = datetime.now().strftime("%H:%M:%S")
    tag = f"[{area}] " if area else ""
    print(f"[{stamp}] {tag}{text}", file=sys.stderr)


def log_debug(message: str, *args, prefix: Area = "") -> None:
    """
    %-style debug message, e.g. log_debug("λ=%s switched to chart %d", lam, k, prefix="PROJECTIVE").

    Args:
        message: Format string
        *args: Values for the format string
        prefix: Subsystem tag
    """
    if not settings.DEBUG:
        return
    text = message % args if args else message
    _debug_logger.debug(f"[{prefix}] {text}" if prefix else text)


def log_step(step_name: str, step_number: Optional[int] = None, total_steps: Optional[int] = None) -> None:
    """Numbered stage of a CLI command ("[1/2] shooting F-KPP front")."""
    if not settings.DEBUG:
        return
    if step_number is not None and total_steps is not None:
        progress = f"[{step_number}/{total_steps}]"
    elif step_number is not None:
        progress = f"[Step {step_number}]"
    else:
        progress = "[STEP]"
    _emit(f"{progress} {step_name}")


def log_success(message: str, prefix: Area = "") -> None:
    if settings.DEBUG:
        _emit(f"✓ {message}", prefix)


def log_error(message: str, prefix: Area = "") -> None:
    """
    Failure line; shown whatever DEBUG says, since the exit code alone does
    not say which λ or parameter went wrong.
    """
    _emit(f"✗ {message}", prefix)


def log_progress(current: int, total: int, message: str = "", prefix: Area = "") -> None:
    """
    Bar of completed samples (λ values, contour points) out of the current total.

    The total may grow between calls while a contour is refined, so the bar
    is clamped to its width.
    """
    if not settings.DEBUG:
        return
    fraction = current / total if total > 0 else 0.0
    filled = min(_BAR_WIDTH, int(fraction * _BAR_WIDTH))
    bar = "=" * filled + " " * (_BAR_WIDTH - filled)
    suffix = f" - {message}" if message else ""
    _emit(f"[{bar}] {fraction * 100:.0f}% ({current}/{total}){suffix}", prefix)
