"""
Run Configuration Model

Defines the archivable description of one CLI run: model, parameters,
tolerances, contour and output settings. Loaded from TOML or JSON files or
from a shipped preset.
"""

import hashlib
import json
from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

from config.settings import settings
from models.contour import ContourSpec
from models.params import FkppParams, KsParams
from models.types import ComplexNumber


class Tolerances(BaseModel):
    """Schema for the numerical tolerances of a run."""

    rel_tol: float = Field(default_factory=lambda: settings.RTOL, gt=0)
    abs_tol: float = Field(default_factory=lambda: settings.ATOL, gt=0)
    tail_tol: float = Field(default_factory=lambda: settings.WAVE_TAIL_TOL, gt=0)
    hyperbolicity_tol: float = Field(default_factory=lambda: settings.HYPERBOLICITY_TOL, gt=0)
    theta_max: float = Field(default_factory=lambda: settings.THETA_MAX, gt=0)
    max_depth: int = Field(default_factory=lambda: settings.MAX_DEPTH, ge=1)


class SpectrumWindow(BaseModel):
    """Schema for a rectangular λ window and the grid laid over it."""

    re_min: float = -2.0
    re_max: float = 2.0
    im_min: float = -2.0
    im_max: float = 2.0
    n_re: int = Field(default=121, ge=2)
    n_im: int = Field(default=121, ge=2)

    @model_validator(mode="after")
    def check_bounds(self) -> "SpectrumWindow":
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError("window bounds must satisfy re_min < re_max and im_min < im_max")
        return self

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        return (self.re_min, self.re_max, self.im_min, self.im_max)

    @property
    def grid(self) -> tuple[int, int]:
        return (self.n_re, self.n_im)


class WeightSweep(BaseModel):
    """Schema for a sweep of exponential weights ν."""

    nu_min: float = -10.0
    nu_max: float = 10.0
    nu_step: float = Field(default=0.05, gt=0)
    k_max: float = Field(default=50.0, gt=0)
    k_points: int = Field(default=2001, ge=3)


class RunConfig(BaseModel):
    """Schema for a complete run configuration."""

    name: str = Field(default="custom", description="Preset or run name")
    model: Literal["fkpp", "ks"]
    fkpp: Optional[FkppParams] = None
    ks: Optional[KsParams] = None
    tolerances: Tolerances = Field(default_factory=Tolerances)
    contour: Optional[ContourSpec] = None
    lambdas: list[ComplexNumber] = Field(default_factory=list, description="λ values for evans eval / crossings")
    at_branch_ok: bool = Field(default=False, description="Evaluate at F-KPP branch points (E_η = 0 at the plus-end one)")
    exclusion: Optional[tuple[float, float, float, float]] = Field(
        default=(0.0, 0.3, 4.0, 0.01),
        description="K-S excluded region (re_lo, re_hi, |im| max, inner radius); null disables"
    )
    window: SpectrumWindow = Field(default_factory=SpectrumWindow)
    weights: WeightSweep = Field(default_factory=WeightSweep)
    k_max: float = Field(default=10.0, gt=0, description="Largest |k| on dispersion curves")
    workers: int = Field(default_factory=lambda: settings.WORKERS, ge=1)
    output_points: int = Field(default_factory=lambda: settings.OUTPUT_GRID_POINTS, ge=2)
    out: Optional[str] = Field(default=None, description="Output path; stdout when omitted")
    format: Literal["csv", "json"] = "csv"

    @model_validator(mode="after")
    def check_model_params(self) -> "RunConfig":
        if self.model == "fkpp" and self.fkpp is None:
            raise ValueError("model 'fkpp' needs an [fkpp] parameter table")
        if self.model == "ks" and self.ks is None:
            self.ks = KsParams()
        return self

    @property
    def params(self) -> FkppParams | KsParams:
        return self.fkpp if self.model == "fkpp" else self.ks

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON form, ignoring output routing."""
        payload = self.model_dump(mode="json", exclude={"out", "format"})
        text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()
