"""
Contour Models

Defines oriented piecewise contours in the λ-plane and the configuration
schema that describes them.
"""

import cmath
import math
from typing import Literal, Optional

from pydantic import BaseModel, Field

from models.types import ComplexNumber


ContourKind = Literal["circle", "right_half_annulus", "shifted_half_disc", "rectangle", "right_half_disc"]


class Segment(BaseModel):
    """Schema for one contour piece: a straight line or a circular arc."""

    kind: Literal["line", "arc"]
    start: ComplexNumber = Field(default=0j, description="Line start point")
    end: ComplexNumber = Field(default=0j, description="Line end point")
    center: ComplexNumber = Field(default=0j, description="Arc center")
    radius: float = Field(default=0.0, ge=0, description="Arc radius")
    theta0: float = Field(default=0.0, description="Arc start angle")
    theta1: float = Field(default=0.0, description="Arc end angle (θ1 < θ0 runs clockwise)")
    spacing: Literal["linear", "geometric"] = Field(
        default="linear",
        description="Geometric spacing places samples evenly in log|λ| along radial lines"
    )

    def point(self, t: float) -> complex:
        """Point at local parameter t ∈ [0, 1]."""
        if self.kind == "arc":
            return self.center + self.radius * cmath.exp(1j * (self.theta0 + t * (self.theta1 - self.theta0)))
        if t <= 0:
            return self.start
        if t >= 1:
            return self.end
        if self.spacing == "geometric":
            return self.start * (abs(self.end) / abs(self.start)) ** t
        return self.start + t * (self.end - self.start)

    @property
    def first(self) -> complex:
        return self.point(0.0)

    @property
    def last(self) -> complex:
        return self.point(1.0)

    def reversed(self) -> "Segment":
        if self.kind == "arc":
            return self.model_copy(update={"theta0": self.theta1, "theta1": self.theta0})
        return self.model_copy(update={"start": self.end, "end": self.start})


class Contour(BaseModel):
    """Schema for an ordered chain of segments parametrized by s ∈ [0, len(segments)]."""

    segments: list[Segment]
    orientation: Literal["ccw", "cw"] = "ccw"

    @property
    def closed(self) -> bool:
        first, last = self.segments[0].first, self.segments[-1].last
        return abs(first - last) <= 1e-12 * max(1.0, abs(first))

    def point(self, s: float) -> complex:
        n = len(self.segments)
        if s >= n:
            return self.segments[-1].last
        index = int(math.floor(s))
        return self.segments[index].point(s - index)

    def reversed(self) -> "Contour":
        return Contour(
            segments=[segment.reversed() for segment in reversed(self.segments)],
            orientation="cw" if self.orientation == "ccw" else "ccw",
        )


class ContourSpec(BaseModel):
    """Schema for a contour in a run configuration."""

    kind: ContourKind
    center: ComplexNumber = Field(default=0j, description="Circle center")
    radius: Optional[float] = Field(default=None, gt=0, description="Circle / half-disc radius")
    r_in: Optional[float] = Field(default=None, gt=0, description="Annulus inner radius")
    r_out: Optional[float] = Field(default=None, gt=0, description="Annulus outer radius")
    shift: float = Field(default=0.0, description="Half-disc shift along the real axis")
    indent: float = Field(default=0.0, ge=0, description="Right-half-disc indentation radius at the origin")
    corners: Optional[tuple[ComplexNumber, ComplexNumber]] = Field(
        default=None,
        description="Rectangle lower-left and upper-right corners"
    )
