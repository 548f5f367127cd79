"""
Projective Service

Affine-chart representations of CP1, CP2 and Gr(2,3). A 2-plane in C^3 is
stored through its Plücker image [K12 : K13 : K23] in CP2, so both spaces
share the chart machinery. Linear flows y' = M(z) y are tracked through
their induced Riccati flow in whichever chart keeps the affine coordinates
bounded.
"""

import logging
from typing import Callable, Literal, NamedTuple, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from config.logging_utils import log_debug
from config.settings import settings
from services.numerics_service import (
    BlowupEvent,
    StiffnessError,
    Trajectory,
    integrate,
)


logger = logging.getLogger(__name__)

Space = Literal["CP1", "CP2", "GR23"]
MatrixField = Callable[[float], np.ndarray]

_CHART_EPS = 1e-14
_MAX_SWITCHES = 10_000


class ProjectiveError(Exception):
    """Base exception for projective-geometry failures."""
    pass


class RankDeficient(ProjectiveError):
    """Raised when two vectors do not span a plane."""
    pass


class ChartUnavailable(ProjectiveError):
    """Raised when the requested chart coordinate vanishes."""
    pass


class SwitchRecord(NamedTuple):
    z: float
    from_chart: int
    to_chart: int


class ChartPoint(BaseModel):
    """A projective point as (chart, affine coordinates) with switch history."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    space: Space
    chart: int
    coords: np.ndarray
    switch_log: list[SwitchRecord] = Field(default_factory=list)

    @property
    def homogeneous(self) -> np.ndarray:
        return from_chart(self.chart, self.coords)


class PluckerLine(BaseModel):
    """Homogeneous Plücker triple [K12 : K13 : K23] of a 2-plane in C^3."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    coordinates: np.ndarray

    def same_point(self, other: "PluckerLine", tol: float = 1e-12) -> bool:
        """True when both triples are proportional."""
        a, b = self.coordinates, other.coordinates
        cross = np.abs(np.outer(a, b) - np.outer(b, a)).max()
        return bool(cross <= tol * np.abs(a).max() * np.abs(b).max())


def homogeneous_dimension(space: Space) -> int:
    return 2 if space == "CP1" else 3


def plucker_from_basis(v, w) -> PluckerLine:
    """
    Plücker coordinates K_ij = v_i w_j − v_j w_i of span{v, w}.

    Raises:
        RankDeficient: If v and w are (numerically) parallel
    """
    v = np.asarray(v, dtype=complex)
    w = np.asarray(w, dtype=complex)
    k = np.array([
        v[0] * w[1] - v[1] * w[0],
        v[0] * w[2] - v[2] * w[0],
        v[1] * w[2] - v[2] * w[1],
    ])
    scale = np.linalg.norm(v) * np.linalg.norm(w)
    if scale == 0 or np.abs(k).max() < _CHART_EPS * scale:
        raise RankDeficient("basis vectors are parallel")
    return PluckerLine(coordinates=k)


def to_chart(point, chart: int) -> np.ndarray:
    """
    Affine coordinates of a homogeneous point in the chart where
    coordinate `chart` is nonzero: the remaining entries divided by it.

    Raises:
        ChartUnavailable: If the chart coordinate is below 1e-14 of the largest
    """
    h = np.asarray(point)
    biggest = np.abs(h).max()
    if biggest == 0:
        raise ChartUnavailable("zero homogeneous vector")
    if abs(h[chart]) < _CHART_EPS * biggest:
        raise ChartUnavailable(f"coordinate {chart} vanishes")
    return np.delete(h, chart) / h[chart]


def from_chart(chart: int, coords) -> np.ndarray:
    """Homogeneous representative with a 1 in slot `chart`."""
    coords = np.asarray(coords)
    return np.insert(coords, chart, 1.0)


def best_chart(point) -> int:
    """Chart of the largest-magnitude coordinate, lowest index on ties."""
    return int(np.argmax(np.abs(np.asarray(point))))


def resident_chart(point, preferred: int, threshold: Optional[float] = None) -> int:
    """
    The preferred chart while its affine coordinates stay within the switch
    threshold, otherwise the best chart.
    """
    threshold = settings.SWITCH_THRESHOLD if threshold is None else threshold
    h = np.abs(np.asarray(point))
    if h[preferred] * threshold >= h.max():
        return preferred
    return best_chart(point)


def chart_point(space: Space, point, chart: Optional[int] = None) -> ChartPoint:
    """Build a ChartPoint from a homogeneous vector, in the best chart by default."""
    h = np.asarray(point)
    if h.shape != (homogeneous_dimension(space),):
        raise ValueError(f"{space} expects {homogeneous_dimension(space)} homogeneous coordinates")
    chart = best_chart(h) if chart is None else chart
    return ChartPoint(space=space, chart=chart, coords=to_chart(h, chart))


def switch_chart(state: ChartPoint, z: float) -> ChartPoint:
    """Re-express a point in its best chart, logging the switch at z."""
    h = state.homogeneous
    target = best_chart(h)
    if target == state.chart:
        return state
    return ChartPoint(
        space=state.space,
        chart=target,
        coords=to_chart(h, target),
        switch_log=[*state.switch_log, SwitchRecord(z, state.chart, target)],
    )


def chart_riccati(M: np.ndarray, chart: int, coords: np.ndarray) -> np.ndarray:
    """
    Riccati vector field induced on a chart by the linear flow h' = M h.

    With ĥ the representative carrying 1 in slot j, the affine coordinates
    x_i = h_i / h_j obey x_i' = (Mĥ)_i − x_i (Mĥ)_j.
    """
    h = np.insert(coords, chart, 1.0)
    Mh = M @ h
    return np.delete(Mh, chart) - coords * Mh[chart]


class TrackPiece(NamedTuple):
    chart: int
    trajectory: Trajectory


class ProjectiveTrack(BaseModel):
    """Chart-switching trajectory of a projective point under a linear flow."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    space: Space
    pieces: list[TrackPiece]
    switch_log: list[SwitchRecord]

    @property
    def z_start(self) -> float:
        return self.pieces[0].trajectory.z_start

    @property
    def z_end(self) -> float:
        return self.pieces[-1].trajectory.z_end

    @property
    def final(self) -> ChartPoint:
        last = self.pieces[-1]
        return ChartPoint(
            space=self.space,
            chart=last.chart,
            coords=last.trajectory.y_end,
            switch_log=list(self.switch_log),
        )

    def _piece_at(self, z: float) -> TrackPiece:
        for piece in reversed(self.pieces):
            if piece.trajectory.covers(z):
                return piece
        raise ValueError(f"z={z} outside track span [{self.z_start}, {self.z_end}]")

    def chart_at(self, z: float) -> int:
        return self._piece_at(z).chart

    def homogeneous_at(self, z: float) -> np.ndarray:
        piece = self._piece_at(z)
        return from_chart(piece.chart, piece.trajectory.value(z))

    def coords_at(self, z: float, chart: int) -> np.ndarray:
        return to_chart(self.homogeneous_at(z), chart)

    def nodes(self) -> list[tuple[float, int, np.ndarray]]:
        """All accepted nodes as (z, chart, homogeneous representative)."""
        rows = []
        for piece in self.pieces:
            for z, y in zip(piece.trajectory.z, piece.trajectory.y):
                rows.append((float(z), piece.chart, from_chart(piece.chart, y)))
        return rows


def track_projective(
    space: Space,
    matrix: MatrixField,
    start,
    z_from: float,
    z_to: float,
    switch_threshold: Optional[float] = None,
    rel_tol: Optional[float] = None,
    abs_tol: Optional[float] = None,
    max_step: float = np.inf,
) -> ProjectiveTrack:
    """
    Follow a projective point under h' = matrix(z) h from z_from to z_to.

    The Riccati flow is integrated in the best chart of the start point.
    When an affine coordinate exceeds switch_threshold, or the chart
    solution blows up, the point is re-expressed in its best chart and the
    integration continues from there.

    Args:
        space: CP1, CP2 or GR23 (for GR23, `matrix` must already be the
            induced matrix on Plücker coordinates)
        matrix: Coefficient matrix of the homogeneous linear flow
        start: Homogeneous start point

    Returns:
        ProjectiveTrack with one piece per chart residency
    """
    threshold = settings.SWITCH_THRESHOLD if switch_threshold is None else switch_threshold
    h0 = np.asarray(start)
    chart = best_chart(h0)
    coords = to_chart(h0, chart)

    def leaves_chart(_z: float, y: np.ndarray) -> bool:
        return bool(np.abs(y).max() > threshold)

    pieces: list[TrackPiece] = []
    log: list[SwitchRecord] = []
    z = float(z_from)
    direction = 1 if z_to > z_from else -1

    while True:
        def field(zz: float, y: np.ndarray, _chart: int = chart) -> np.ndarray:
            return chart_riccati(matrix(zz), _chart, y)

        try:
            trajectory = integrate(
                field, coords, z, z_to,
                rel_tol=rel_tol, abs_tol=abs_tol,
                max_step=max_step, stop=leaves_chart,
            )
            pieces.append(TrackPiece(chart, trajectory))
            if not trajectory.stopped:
                break
            z, y = trajectory.z_end, trajectory.y_end
        except (BlowupEvent, StiffnessError) as e:
            partial = e.partial
            if partial is None or len(partial.z) < 2:
                raise
            pieces.append(TrackPiece(chart, partial))
            z, y = partial.z_end, partial.y_end
            if best_chart(from_chart(chart, y)) == chart:
                # nothing to switch to: the failure is not a chart singularity
                raise

        h = from_chart(chart, y)
        target = best_chart(h)
        if target == chart:
            raise ProjectiveError(f"switch threshold {threshold} below 1 keeps chart {chart} at z={z}")
        log.append(SwitchRecord(z, chart, target))
        if len(log) > _MAX_SWITCHES:
            raise ProjectiveError(f"more than {_MAX_SWITCHES} chart switches before z={z}")
        chart = target
        coords = to_chart(h, chart)
        if not direction * (z_to - z) > 0:
            # stopped exactly at the end: record the end point in the new chart
            end_slope = chart_riccati(matrix(z), chart, coords)
            pieces.append(TrackPiece(chart, Trajectory(
                z=np.array([z]), y=np.array([coords]), dy=np.array([end_slope]),
                direction=direction, rel_tol=pieces[-1].trajectory.rel_tol,
                abs_tol=pieces[-1].trajectory.abs_tol,
            )))
            break

    if len(log) > 100:
        logger.warning("%d chart switches while tracking %s point from %s to %s", len(log), space, z_from, z_to)
    log_debug("tracked %s point over [%s, %s] with %d switches", space, z_from, z_to, len(log), prefix="PROJECTIVE")
    return ProjectiveTrack(space=space, pieces=pieces, switch_log=log)
