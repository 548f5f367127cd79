"""
Evans Service

Orchestrates Evans-function evaluations along contours: contour
construction, adaptive argument tracking, integer winding numbers and
zero/pole accounting from chart residency.
"""

import cmath
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from itertools import repeat
from typing import Callable, Optional, Protocol, Sequence

import numpy as np
from scipy import ndimage

from config.logging_utils import log_debug, log_progress, log_success
from config.settings import settings
from models.contour import Contour, ContourSpec, Segment
from models.reports import EigenvalueReport, EvansSample, EvansValue, WindingReport
from services.fkpp_service import BranchPointError
from services.spectrum_service import SpectralProblem


logger = logging.getLogger(__name__)

_GEOMETRIC_RATIO = 100.0


class EvansError(Exception):
    """Base exception for Evans-engine failures."""
    pass


class ContourError(EvansError):
    """Raised for invalid contour geometry."""
    pass


class ZeroOnContour(EvansError):
    """Raised when E (numerically) vanishes at a contour sample."""

    def __init__(self, message: str, lam: complex):
        super().__init__(message)
        self.lam = lam


class RefinementError(EvansError):
    """Raised when bisection exceeds the maximum depth."""

    def __init__(self, message: str, segment: int, s: float):
        super().__init__(message)
        self.segment = segment
        self.s = s


class PoleOnContour(EvansError):
    """Raised when E is not finite at a contour sample."""

    def __init__(self, message: str, lam: complex):
        super().__init__(message)
        self.lam = lam


class Evaluator(Protocol):
    name: str

    def __call__(self, lam: complex, reference: Optional[Sequence[complex]] = None) -> EvansValue:
        ...

    def branch_points(self) -> list[complex]:
        ...


class FunctionEvaluator:
    """Wraps a plain analytic function so it can be wound like an Evans function."""

    name = "function"

    def __init__(self, func: Callable[[complex], complex]):
        self.func = func

    def __call__(self, lam: complex, reference: Optional[Sequence[complex]] = None) -> EvansValue:
        return EvansValue(lam=lam, value=complex(self.func(lam)), residency=(0, 0))

    def branch_points(self) -> list[complex]:
        return []


def _radial(a: complex, b: complex) -> bool:
    if a == 0 or b == 0:
        return False
    ratio = max(abs(a), abs(b)) / min(abs(a), abs(b))
    same_ray = abs(cmath.phase(b / a)) < 1e-12
    return same_ray and ratio >= _GEOMETRIC_RATIO


def _line(a: complex, b: complex) -> Segment:
    return Segment(kind="line", start=a, end=b, spacing="geometric" if _radial(a, b) else "linear")


def _arc(center: complex, radius: float, theta0: float, theta1: float) -> Segment:
    return Segment(kind="arc", center=center, radius=radius, theta0=theta0, theta1=theta1)


def build_contour(spec: ContourSpec) -> Contour:
    """
    Counterclockwise closed contour for a ContourSpec.

    Kinds: circle(center, radius); right_half_annulus(r_in, r_out);
    shifted_half_disc(radius, shift); rectangle(corners);
    right_half_disc(radius, indent), where indent > 0 goes round the origin
    on a right semicircle of that radius.

    Raises:
        ContourError: If the geometry is invalid
    """
    half = math.pi / 2
    kind = spec.kind
    if kind == "circle":
        if not spec.radius:
            raise ContourError("circle needs a positive radius")
        segments = [_arc(spec.center, spec.radius, 0.0, 2 * math.pi)]
    elif kind == "right_half_annulus":
        r_in, r_out = spec.r_in, spec.r_out
        if not r_in or not r_out or r_in >= r_out:
            raise ContourError(f"annulus needs 0 < r_in < r_out (got {r_in}, {r_out})")
        segments = [
            _arc(0j, r_out, -half, half),
            _line(1j * r_out, 1j * r_in),
            _arc(0j, r_in, half, -half),
            _line(-1j * r_in, -1j * r_out),
        ]
    elif kind == "shifted_half_disc":
        if not spec.radius:
            raise ContourError("half disc needs a positive radius")
        shift, r = complex(spec.shift), spec.radius
        segments = [
            _arc(shift, r, -half, half),
            _line(shift + 1j * r, shift - 1j * r),
        ]
    elif kind == "rectangle":
        if spec.corners is None:
            raise ContourError("rectangle needs two corners")
        low, high = (complex(c) for c in spec.corners)
        if not (low.real < high.real and low.imag < high.imag):
            raise ContourError("rectangle corners must be lower-left then upper-right")
        a, b = low, complex(high.real, low.imag)
        c, d = high, complex(low.real, high.imag)
        segments = [_line(a, b), _line(b, c), _line(c, d), _line(d, a)]
    elif kind == "right_half_disc":
        if not spec.radius:
            raise ContourError("half disc needs a positive radius")
        r, indent = spec.radius, spec.indent
        if indent >= r:
            raise ContourError(f"indentation {indent} must be smaller than the radius {r}")
        if indent > 0:
            segments = [
                _arc(0j, r, -half, half),
                _line(1j * r, 1j * indent),
                _arc(0j, indent, half, -half),
                _line(-1j * indent, -1j * r),
            ]
        else:
            segments = [
                _arc(0j, r, -half, half),
                _line(1j * r, 0j),
                _line(0j, -1j * r),
            ]
    else:
        raise ContourError(f"unknown contour kind {kind!r}")

    contour = Contour(segments=segments)
    for left, right in zip(segments, segments[1:] + segments[:1]):
        gap = abs(left.last - right.first)
        if gap > 1e-12 * max(1.0, abs(left.last)):
            raise ContourError(f"segments do not join ({left.last} vs {right.first})")
    return contour


def _evaluate_all(
    evaluator: Evaluator,
    lams: list[complex],
    references: list[Optional[Sequence[complex]]],
    workers: int,
) -> list[EvansValue]:
    if workers > 1 and len(lams) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(evaluator, lams, references))
    return [evaluator(lam, reference) for lam, reference in zip(lams, references)]


def _evaluate_chains(evaluator: Evaluator, chains: list[list[complex]], workers: int) -> list[list[EvansValue]]:
    if workers > 1 and len(chains) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(evaluate_path, repeat(evaluator), chains))
    return [evaluate_path(evaluator, chain) for chain in chains]


def _branch_distance(lam: complex, branch_points: list[complex]) -> float:
    if not branch_points:
        return math.inf
    return min(abs(lam - b) for b in branch_points)


def winding(
    problem: Optional[SpectralProblem],
    evaluator: Evaluator,
    contour: Contour,
    theta_max: Optional[float] = None,
    max_depth: Optional[int] = None,
    workers: Optional[int] = None,
    initial_samples: Optional[int] = None,
) -> WindingReport:
    """
    Winding number of E about 0 along a closed contour.

    Samples start at `initial_samples` per segment and intervals are bisected
    until every consecutive pair satisfies |Δarg E| ≤ θ_max and
    |ΔE| ≤ ½·min(|E_i|, |E_{i+1}|). The initial samples of each segment are
    walked in contour order, each handed the previous sample's unstable
    labels; a bisection midpoint is handed the labels of its left neighbour.
    Segments and refinement rounds run in worker processes when workers > 1,
    and the result does not depend on the worker count.

    Args:
        problem: Spectral problem the evaluator belongs to (used for logging)
        evaluator: Callable λ → EvansValue with branch_points()
        contour: Closed contour
        theta_max: Largest accepted argument step
        max_depth: Largest number of bisections of an initial interval
        workers: Worker processes for sample evaluation

    Returns:
        WindingReport with samples in contour order

    Raises:
        ContourError: If the contour is not closed
        BranchPointError: If a sample comes within BRANCH_DISTANCE_TOL of a
            flagged branch point
        ZeroOnContour: If |E| < ZERO_RELATIVE_TOL · median|E| at a sample
        PoleOnContour: If E is not finite at a sample
        RefinementError: If an interval needs more than max_depth bisections
    """
    theta_max = settings.THETA_MAX if theta_max is None else theta_max
    max_depth = settings.MAX_DEPTH if max_depth is None else max_depth
    workers = settings.WORKERS if workers is None else workers
    per_segment = settings.INITIAL_SAMPLES if initial_samples is None else initial_samples
    if not contour.closed:
        raise ContourError("winding needs a closed contour")

    name = problem.name if problem is not None else evaluator.name
    branch_points = evaluator.branch_points()
    n_seg = len(contour.segments)

    chains = [[k + i / per_segment for i in range(per_segment)] for k in range(n_seg)]
    params = [s for chain in chains for s in chain]
    values: dict[float, EvansValue] = {}
    depth: dict[float, int] = {s: 0 for s in params}

    def check_branch(batch: list[float]) -> None:
        for s in batch:
            lam = contour.point(s)
            if _branch_distance(lam, branch_points) < settings.BRANCH_DISTANCE_TOL:
                raise BranchPointError(f"contour passes within {settings.BRANCH_DISTANCE_TOL} of a branch point at λ={lam}", lam)

    def store(batch: list[float], results: list[EvansValue]) -> None:
        for s, result in zip(batch, results):
            if not cmath.isfinite(result.value):
                raise PoleOnContour(f"E is not finite at λ={result.lam}", result.lam)
            values[s] = result

    # each segment is walked in order so the unstable labels follow by continuity
    check_branch(params)
    walked = _evaluate_chains(evaluator, [[contour.point(s) for s in chain] for chain in chains], workers)
    for chain, results in zip(chains, walked):
        store(chain, results)
    refinements = 0
    while True:
        magnitudes = np.array([abs(values[s].value) for s in params])
        floor = settings.ZERO_RELATIVE_TOL * float(np.median(magnitudes))
        for s in params:
            if abs(values[s].value) < floor or values[s].value == 0:
                raise ZeroOnContour(f"E vanishes on the contour at λ={values[s].lam}", values[s].lam)

        pending = []
        closing = params + [float(n_seg)]
        for left, right in zip(closing, closing[1:]):
            e0 = values[left].value
            e1 = values[right % n_seg if right == n_seg else right].value
            step = abs(cmath.phase(e1 / e0))
            jump = abs(e1 - e0)
            if step > theta_max or jump > 0.5 * min(abs(e0), abs(e1)):
                if depth[left] >= max_depth:
                    raise RefinementError(
                        f"refinement depth {max_depth} exceeded near λ={values[left].lam}",
                        segment=int(math.floor(left)), s=left,
                    )
                pending.append((left, right))

        if not pending:
            break
        batch = []
        references = []
        for left, right in pending:
            mid = 0.5 * (left + right)
            depth[left] += 1
            depth[mid] = depth[left]
            batch.append(mid)
            references.append(values[left].labels)
        check_branch(batch)
        store(batch, _evaluate_all(evaluator, [contour.point(s) for s in batch], references, workers))
        refinements += len(batch)
        log_progress(len(params), len(params) + len(batch), f"{name}: refining {len(batch)} intervals", prefix="EVANS")
        params = sorted(params + batch)

    samples: list[EvansSample] = []
    pole_events: list[complex] = []
    total = 0.0
    previous: Optional[EvansValue] = None
    for s in params + [float(n_seg)]:
        result = values[0.0 if s == n_seg else s]
        if previous is not None:
            total += cmath.phase(result.value / previous.value)
            if tuple(result.residency) != tuple(previous.residency):
                pole_events.append(contour.point(s))
        if s < n_seg:
            samples.append(EvansSample(
                lam=contour.point(s),
                value=result.value,
                argument=total,
                parameter=s,
                residency=result.residency,
                switches=result.switches,
                branch_distance=_branch_distance(result.lam, branch_points),
            ))
        previous = result

    turns = total / (2 * math.pi)
    count = int(round(turns))
    warnings = []
    if abs(turns - count) > settings.CLOSURE_TOL:
        message = f"argument change {total:.6f} is not within {settings.CLOSURE_TOL} turns of a multiple of 2π"
        warnings.append(message)
        logger.warning(message)
    if pole_events:
        warnings.append(f"{len(pole_events)} chart-residency changes along the contour")

    log_success(f"{name}: winding {count} from {len(samples)} samples", prefix="EVANS")
    return WindingReport(
        winding=count,
        total_argument=total,
        samples=samples,
        refinements=refinements,
        pole_events=pole_events,
        warnings=warnings,
    )


def _inside(points: np.ndarray, polygon: np.ndarray) -> np.ndarray:
    """Winding-number point-in-polygon test for a closed polyline."""
    a = polygon[:-1][None, :] - points.reshape(-1, 1)
    b = polygon[1:][None, :] - points.reshape(-1, 1)
    turns = np.angle(b / a).sum(axis=1) / (2 * np.pi)
    return (np.abs(np.round(turns)) > 0).reshape(points.shape)


def eigenvalue_report(
    problem: Optional[SpectralProblem],
    evaluator: Evaluator,
    contour: Contour,
    interior_grid: Optional[tuple[int, int]] = (8, 8),
    canonical_residency: Optional[tuple[int, int]] = None,
    **winding_options,
) -> EigenvalueReport:
    """
    Zero count N = winding + P inside a contour.

    P is estimated by sampling the chart residency at the matching point on
    a grid of interior points: every connected group of cells whose
    residency differs from the canonical one counts as one pole. This is a
    diagnostic, not a certified count.
    """
    report = winding(problem, evaluator, contour, **winding_options)
    canonical = canonical_residency or getattr(evaluator, "canonical_residency", None)
    if canonical is None:
        canonical = _majority_residency(report)

    poles = 0
    if interior_grid is not None:
        polygon = np.array([s.lam for s in report.samples] + [report.samples[0].lam])
        n_re, n_im = interior_grid
        re = np.linspace(polygon.real.min(), polygon.real.max(), n_re + 2)[1:-1]
        im = np.linspace(polygon.imag.min(), polygon.imag.max(), n_im + 2)[1:-1]
        grid = re[None, :] + 1j * im[:, None]
        inside = _inside(grid, polygon)
        off_canonical = np.zeros(grid.shape, dtype=bool)
        for i, j in zip(*np.nonzero(inside)):
            try:
                result = evaluator(complex(grid[i, j]))
            except (BranchPointError, EvansError) as e:
                log_debug("interior point %s skipped: %s", grid[i, j], e, prefix="EVANS")
                continue
            off_canonical[i, j] = tuple(result.residency) != tuple(canonical)
        _, poles = ndimage.label(off_canonical)

    return EigenvalueReport(
        winding=report.winding,
        pole_estimate=poles,
        zero_count=report.winding + poles,
        corrected=poles > 0,
        report=report,
    )


def _majority_residency(report: WindingReport) -> tuple[int, int]:
    counts: dict[tuple[int, int], int] = {}
    for sample in report.samples:
        key = tuple(sample.residency)
        counts[key] = counts.get(key, 0) + 1
    return max(counts, key=counts.get)


def evaluate_path(evaluator: Evaluator, lambdas: Sequence[complex]) -> list[EvansValue]:
    """
    Evaluate E along an ordered list of λ, handing each sample's unstable
    labels to the next so that labels follow by continuity.
    """
    results = []
    reference = None
    for lam in lambdas:
        result = evaluator(complex(lam), reference)
        results.append(result)
        reference = result.labels
    return results
