"""
Model Parameter Schemas

Defines the parameter sets of the two travelling-wave problems.
"""

import math

from pydantic import BaseModel, ConfigDict, Field, model_validator


class FkppParams(BaseModel):
    """Schema for F-KPP diffusion coefficient and wave speed."""

    model_config = ConfigDict(frozen=True)

    delta: float = Field(default=1.0, gt=0, description="Diffusion coefficient δ")
    c: float = Field(..., gt=0, description="Wave speed c")

    @property
    def monotone(self) -> bool:
        """True when c² ≥ 4δ, i.e. the front is monotone."""
        return self.c ** 2 >= 4 * self.delta

    @property
    def minimal_speed(self) -> float:
        return 2 * math.sqrt(self.delta)


class KsParams(BaseModel):
    """Schema for the ε=0 Keller-Segel parameters (u_r = 1, z* = 0 fixed)."""

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(default=1.0, gt=0, description="Consumption rate α")
    beta: float = Field(default=2.0, gt=0, description="Chemotaxis strength β")
    c: float = Field(default=2.0, gt=0, description="Wave speed c")
    delta: float = Field(default=1.0, gt=0, description="Bacterial diffusion δ")

    @model_validator(mode="after")
    def check_diffusion_below_chemotaxis(self) -> "KsParams":
        if not self.delta < self.beta:
            raise ValueError(
                f"constraint 0 < delta < beta violated (delta={self.delta}, beta={self.beta})"
            )
        return self

    @property
    def gamma(self) -> float:
        return self.delta / (self.beta - self.delta)

    @property
    def sigma(self) -> float:
        return self.alpha * (self.beta - self.delta) / self.c ** 2
