"""CLI dependencies: run-config resolution and model construction."""

import json

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Optional

from pydantic import ValidationError

from config.logging_utils import log_debug
from config.presets import PRESETS
from models.run_config import RunConfig
from services.fkpp_service import FkppEvans, FkppProblem, FkppWave, fkpp_wave
from services.ks_service import KsEvans, KsProblem
from services.spectrum_service import SpectralProblem


class ConfigError(Exception):
    """Raised when a run configuration cannot be loaded or validated."""
    pass


def _read_file(path: Path) -> dict:
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        if path.suffix == ".json":
            return json.loads(path.read_text(encoding="utf-8"))
        with path.open("rb") as handle:
            return tomllib.load(handle)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as e:
        raise ConfigError(f"cannot parse {path}: {e}") from e


def resolve_config(
    path: Optional[str] = None,
    preset: Optional[str] = None,
    out: Optional[str] = None,
    fmt: Optional[str] = None,
) -> RunConfig:
    """
    Build the RunConfig for one invocation.

    A preset supplies the base values and a config file overrides them
    key by key at the top level; --out and --format override both.

    Raises:
        ConfigError: If neither source is given, the preset is unknown, or
            validation fails (the pydantic message is kept)
    """
    if path is None and preset is None:
        raise ConfigError("either --config or --preset is required")

    data: dict = {}
    if preset is not None:
        if preset not in PRESETS:
            known = ", ".join(sorted(PRESETS))
            raise ConfigError(f"unknown preset {preset!r} (known: {known})")
        data.update(PRESETS[preset])
        data.setdefault("name", preset)
    if path is not None:
        data.update(_read_file(Path(path)))
    if out is not None:
        data["out"] = out
    if fmt is not None:
        data["format"] = fmt

    try:
        config = RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(str(e)) from e
    log_debug("config %s (%s) hash %s", config.name, config.model, config.config_hash()[:12], prefix="CLI")
    return config


def get_wave(config: RunConfig) -> FkppWave:
    """F-KPP front for the configured parameters."""
    return fkpp_wave(config.fkpp, tail_tol=config.tolerances.tail_tol)


def get_problem(config: RunConfig, wave: Optional[FkppWave] = None) -> SpectralProblem:
    """Spectral problem of the configured model."""
    if config.model == "fkpp":
        return FkppProblem(config.fkpp, wave)
    return KsProblem(config.ks)


def get_evaluator(config: RunConfig, wave: Optional[FkppWave] = None) -> FkppEvans | KsEvans:
    """Evans evaluator of the configured model."""
    tolerances = config.tolerances
    if config.model == "fkpp":
        return FkppEvans(
            config.fkpp,
            wave if wave is not None else get_wave(config),
            at_branch_ok=config.at_branch_ok,
            rel_tol=tolerances.rel_tol,
            abs_tol=tolerances.abs_tol,
        )
    return KsEvans(
        config.ks,
        exclusion=config.exclusion,
        rel_tol=tolerances.rel_tol,
        abs_tol=tolerances.abs_tol,
    )
