"""
Report Models

Defines schemas for Evans-function values, contour samples and the
winding and eigenvalue-count reports emitted by the CLI.
"""

from typing import Literal, Optional

from pydantic import BaseModel, Field

from models.types import ComplexNumber


class EvansValue(BaseModel):
    """Schema for a single Evans-function evaluation."""

    lam: ComplexNumber = Field(..., description="Spectral parameter λ")
    value: ComplexNumber = Field(..., description="Evans-function value at λ")
    residency: tuple[int, int] = Field(..., description="Charts of the (unstable, stable) objects at the matching point")
    switches: int = Field(default=0, ge=0, description="Chart switches during both shootings")
    connection: Literal["shooting", "branch"] = Field(
        default="shooting",
        description="'branch' when E is set to 0 at the plus-end branch point"
    )
    labels: Optional[list[ComplexNumber]] = Field(
        default=None,
        description="Spatial eigenvalues spanning the unstable object at −∞"
    )


class EvansSample(BaseModel):
    """Schema for one accepted contour sample."""

    lam: ComplexNumber = Field(..., description="Sample point on the contour")
    value: ComplexNumber = Field(..., description="Evans-function value")
    argument: float = Field(..., description="Accumulated argument of E along the contour (radians)")
    parameter: float = Field(..., description="Contour parameter s of the sample")
    residency: tuple[int, int] = Field(default=(0, 0), description="Charts resident at the matching point")
    switches: int = Field(default=0, ge=0, description="Chart switches during the evaluation")
    branch_distance: float = Field(default=float("inf"), description="Distance to the nearest flagged branch point")


class WindingReport(BaseModel):
    """Schema for the winding of E along a closed contour."""

    winding: int = Field(..., description="Integer winding number of E about 0")
    total_argument: float = Field(..., description="Total change of arg E (radians)")
    samples: list[EvansSample] = Field(default_factory=list, description="Accepted samples in contour order")
    refinements: int = Field(default=0, ge=0, description="Bisection refinements performed")
    pole_events: list[ComplexNumber] = Field(
        default_factory=list,
        description="λ where the chart residency at the matching point changed"
    )
    warnings: list[str] = Field(default_factory=list, description="Non-fatal diagnostics")


class EigenvalueReport(BaseModel):
    """Schema for the zero/pole accounting inside a contour."""

    winding: int = Field(..., description="Net winding N − P")
    pole_estimate: int = Field(default=0, ge=0, description="Estimated poles of E inside the contour")
    zero_count: int = Field(..., description="Eigenvalue count N = winding + P")
    corrected: bool = Field(default=False, description="True when P > 0 changed N")
    report: WindingReport
