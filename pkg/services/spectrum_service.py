"""
Spectrum Service

Classification of the spectral plane for any linearised travelling-wave
problem: signatures of the asymptotic matrices, continuous-spectrum
membership, connected-region labelling, exponentially weighted signatures
and a numerical tracer for the absolute spectrum.
"""

import logging
from abc import ABC, abstractmethod
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import ndimage

from config.logging_utils import log_debug
from config.settings import settings
from services.numerics_service import characteristic_coefficients, polynomial_roots


logger = logging.getLogger(__name__)

End = Literal["plus", "minus"]
ENDS: tuple[End, End] = ("plus", "minus")


class SpectrumError(Exception):
    """Base exception for spectral-plane classification."""
    pass


class BoundaryFlag(SpectrumError):
    """Raised when λ lies on a dispersion curve within the hyperbolicity tolerance."""

    def __init__(self, message: str, lam: complex):
        super().__init__(message)
        self.lam = lam


class SpectralProblem(ABC):
    """
    One linearised travelling-wave problem y' = A(z; λ) y.

    Subclasses supply the coefficient matrix, its limits as z → ±∞ and the
    dispersion relation solved for λ.
    """

    name: str = "problem"
    dimension: int = 2
    # dimension of the unstable subspace at −∞ for λ in the rightmost region
    unstable_dimension: int = 1
    # a point of the rightmost region, used to seed region labelling
    reference_point: complex = 10.0

    @abstractmethod
    def matrix(self, z: float, lam: complex) -> np.ndarray:
        ...

    @abstractmethod
    def asymptotic(self, lam: complex, end: End) -> np.ndarray:
        ...

    @abstractmethod
    def dispersion_lambdas(self, mu: np.ndarray) -> np.ndarray:
        """
        All λ for which some asymptotic matrix has spatial eigenvalue μ.

        Args:
            mu: 1-D array of spatial eigenvalues

        Returns:
            Array of shape (len(mu), branches)
        """
        ...

    def spatial_eigenvalues(self, lam: complex, end: End) -> list[complex]:
        """Eigenvalues of the asymptotic matrix by descending real part."""
        roots = polynomial_roots(characteristic_coefficients(self.asymptotic(lam, end)))
        return sorted(roots, key=lambda m: (-m.real, -m.imag))

    def dispersion(self, k: float) -> list[complex]:
        """λ on the dispersion curves with spatial eigenvalue ik."""
        return [complex(x) for x in self.dispersion_lambdas(np.array([1j * k]))[0]]


class Signature(BaseModel):
    """Counts of eigenvalues with positive, negative and (numerically) zero real part."""

    model_config = ConfigDict(frozen=True)

    n_plus: int
    n_minus: int
    n_zero: int = 0

    def __str__(self) -> str:
        return f"({self.n_plus},{self.n_minus},{self.n_zero})"


class RegionLabel(BaseModel):
    """Either the continuous spectrum or the index of a region of its complement."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["region", "continuous"]
    index: Optional[int] = None
    plus_signature: Signature
    minus_signature: Signature

    @property
    def is_continuous(self) -> bool:
        return self.kind == "continuous"


class RegionMap(BaseModel):
    """
    Grid labelling of a window of the λ-plane.

    labels[i, j] refers to λ = re[j] + i·im[i]: 0 marks the continuous
    spectrum, 1 the region holding the problem's reference point, and
    2, 3, ... the remaining regions in scan order.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    re: np.ndarray
    im: np.ndarray
    labels: np.ndarray
    region_count: int

    def label_at(self, lam: complex) -> int:
        j = int(np.argmin(np.abs(self.re - lam.real)))
        i = int(np.argmin(np.abs(self.im - lam.imag)))
        return int(self.labels[i, j])


class BoundaryPoint(BaseModel):
    """A refined point of the numerically traced absolute spectrum."""

    model_config = ConfigDict(frozen=True)

    re: float
    im: float
    end: End
    gap: float

    @property
    def lam(self) -> complex:
        return complex(self.re, self.im)


def _counts(real_parts, tol: float) -> Signature:
    n_zero = sum(1 for r in real_parts if abs(r) < tol)
    n_plus = sum(1 for r in real_parts if r >= tol)
    return Signature(n_plus=n_plus, n_minus=len(real_parts) - n_plus - n_zero, n_zero=n_zero)


def signature(A: np.ndarray, tol: Optional[float] = None) -> Signature:
    """
    Signature of a 2x2 or 3x3 matrix.

    Eigenvalues with |Re μ| < tol count as zero.
    """
    tol = settings.HYPERBOLICITY_TOL if tol is None else tol
    roots = polynomial_roots(characteristic_coefficients(np.asarray(A, dtype=complex)))
    return _counts([m.real for m in roots], tol)


def weighted_signature(
    problem: SpectralProblem,
    lam: complex,
    nu: float,
    tol: Optional[float] = None,
) -> tuple[Signature, Signature]:
    """
    Signatures (plus end, minus end) in the space weighted by e^{νz}.

    The weight turns a spatial eigenvalue μ into μ − ν, so signs are taken of
    Re μ − ν. ν = 0 gives the unweighted signatures.
    """
    tol = settings.HYPERBOLICITY_TOL if tol is None else tol
    result = []
    for end in ENDS:
        mus = problem.spatial_eigenvalues(lam, end)
        result.append(_counts([m.real - nu for m in mus], tol))
    return result[0], result[1]


def _on_boundary(problem: SpectralProblem, lam: complex, tol: float) -> bool:
    return any(
        abs(m.real) < tol
        for end in ENDS
        for m in problem.spatial_eigenvalues(lam, end)
    )


def _continuous_mask(problem: SpectralProblem, re: np.ndarray, im: np.ndarray, tol: float) -> np.ndarray:
    mask = np.zeros((len(im), len(re)), dtype=bool)
    for i, y in enumerate(im):
        for j, x in enumerate(re):
            plus, minus = weighted_signature(problem, complex(x, y), 0.0, tol)
            mask[i, j] = plus != minus or plus.n_zero > 0 or minus.n_zero > 0
    return mask


def region_map(
    problem: SpectralProblem,
    window: tuple[float, float, float, float],
    grid: tuple[int, int],
    tol: Optional[float] = None,
) -> RegionMap:
    """
    Label a grid by connected components of the complement of the
    continuous spectrum.

    Args:
        problem: Spectral problem to classify
        window: (re_min, re_max, im_min, im_max)
        grid: (n_re, n_im) sample counts

    Returns:
        RegionMap with the component of the reference point labelled 1

    Raises:
        SpectrumError: If the reference cell lies in the continuous spectrum
    """
    tol = settings.HYPERBOLICITY_TOL if tol is None else tol
    re_min, re_max, im_min, im_max = window
    n_re, n_im = grid
    re = np.linspace(re_min, re_max, n_re)
    im = np.linspace(im_min, im_max, n_im)

    continuous = _continuous_mask(problem, re, im, tol)
    components, count = ndimage.label(~continuous)

    seed = complex(problem.reference_point)
    seed_j = int(np.argmin(np.abs(re - min(max(seed.real, re_min), re_max))))
    seed_i = int(np.argmin(np.abs(im - min(max(seed.imag, im_min), im_max))))
    seed_component = components[seed_i, seed_j]
    if seed_component == 0:
        raise SpectrumError(f"reference cell {re[seed_j]}+{im[seed_i]}i lies in the continuous spectrum")

    labels = np.zeros_like(components)
    labels[components == seed_component] = 1
    next_label = 2
    for component in range(1, count + 1):
        if component == seed_component:
            continue
        labels[components == component] = next_label
        next_label += 1

    log_debug("%s region map: %d regions on %dx%d grid", problem.name, count, n_re, n_im, prefix="SPECTRUM")
    return RegionMap(re=re, im=im, labels=labels, region_count=count)


def classify(
    problem: SpectralProblem,
    lam: complex,
    tol: Optional[float] = None,
    window: Optional[tuple[float, float, float, float]] = None,
    grid: tuple[int, int] = (121, 121),
) -> RegionLabel:
    """
    Continuous spectrum when the asymptotic signatures differ, otherwise the
    region index.

    Region 1 is decided first along the straight segment from the reference
    point to λ: if no sample of it meets the continuous spectrum, λ is in
    region 1. Otherwise a region map over `window` (by default the box
    spanned by both points, padded) assigns the index.

    Raises:
        BoundaryFlag: If a spatial eigenvalue at λ has |Re μ| < tol
    """
    tol = settings.HYPERBOLICITY_TOL if tol is None else tol
    lam = complex(lam)
    if _on_boundary(problem, lam, tol):
        raise BoundaryFlag(f"λ={lam} lies on a dispersion curve", lam)

    plus, minus = weighted_signature(problem, lam, 0.0, tol)
    if plus != minus:
        return RegionLabel(kind="continuous", plus_signature=plus, minus_signature=minus)

    seed = complex(problem.reference_point)
    path = seed + (lam - seed) * np.linspace(0.0, 1.0, 201)
    crosses = False
    for point in path:
        p, m = weighted_signature(problem, complex(point), 0.0, tol)
        if p != m or p.n_zero or m.n_zero:
            crosses = True
            break
    if not crosses:
        return RegionLabel(kind="region", index=1, plus_signature=plus, minus_signature=minus)

    if window is None:
        pad = 0.2 * abs(lam - seed) + 1.0
        window = (
            min(lam.real, seed.real) - pad, max(lam.real, seed.real) + pad,
            min(lam.imag, seed.imag) - pad, max(lam.imag, seed.imag) + pad,
        )
    regions = region_map(problem, window, grid, tol)
    index = regions.label_at(lam)
    if index == 0:
        # λ is off the spectrum but its cell is not: take the nearest labelled cell
        rr, ii = np.meshgrid(regions.re, regions.im)
        distance = np.abs(rr + 1j * ii - lam)
        distance[regions.labels == 0] = np.inf
        i, j = np.unravel_index(int(np.argmin(distance)), distance.shape)
        index = int(regions.labels[i, j])
    return RegionLabel(kind="region", index=index, plus_signature=plus, minus_signature=minus)


def weighted_dispersion_max(problem: SpectralProblem, nu: float, ks: np.ndarray) -> float:
    """
    Largest Re λ over the weighted dispersion curves, i.e. over λ for which
    an asymptotic matrix has eigenvalue ν + ik, k ∈ ks.

    A weight is admissible when the result is negative.
    """
    mu = nu + 1j * np.asarray(ks, dtype=float)
    lambdas = problem.dispersion_lambdas(mu)
    return float(np.nanmax(lambdas.real))


def _signed_gap(problem: SpectralProblem, lam: complex, end: End, pair: int) -> tuple[float, float]:
    mus = problem.spatial_eigenvalues(lam, end)
    a, b = mus[pair - 1], mus[pair]
    re_gap = a.real - b.real
    return re_gap * (1.0 if a.imag >= b.imag else -1.0), re_gap


def _bisect(f, x0: complex, x1: complex, f0: float, tol: float) -> complex:
    while abs(x1 - x0) > tol:
        mid = 0.5 * (x0 + x1)
        fm = f(mid)
        if (fm > 0) == (f0 > 0):
            x0, f0 = mid, fm
        else:
            x1 = mid
    return 0.5 * (x0 + x1)


def absolute_spectrum_scan(
    problem: SpectralProblem,
    window: tuple[float, float, float, float],
    grid: tuple[int, int],
    tol: float = 1e-8,
    accept_tol: Optional[float] = None,
) -> list[BoundaryPoint]:
    """
    Trace where the two spatial eigenvalues straddling the Morse index of
    an asymptotic matrix have equal real parts.

    Each end's eigenvalues are sorted by real part and the pair (k, k+1) is
    watched, k being that end's unstable dimension at the reference point.
    The signed gap (Re μ_k − Re μ_{k+1})·sign(Im μ_k − Im μ_{k+1}) changes
    sign across the absolute spectrum; sign changes between grid neighbours
    are bisected to `tol` and kept when the real-part gap there is below
    `accept_tol`. Curve tips are refined by bisecting along grid rows on
    the predicate "real-part gap below accept_tol".

    Args:
        problem: Spectral problem
        window: (re_min, re_max, im_min, im_max)
        grid: (n_re, n_im)
        tol: Bisection tolerance in λ
        accept_tol: Acceptance threshold for the real-part gap

    Returns:
        Refined points with their end labels (possibly empty), in scan order
    """
    accept_tol = settings.ABSOLUTE_ACCEPT_TOL if accept_tol is None else accept_tol
    re_min, re_max, im_min, im_max = window
    n_re, n_im = grid
    re = np.linspace(re_min, re_max, n_re)
    im = np.linspace(im_min, im_max, n_im)
    seed = complex(problem.reference_point)

    points: list[BoundaryPoint] = []
    for end in ENDS:
        pair = sum(1 for m in problem.spatial_eigenvalues(seed, end) if m.real > 0)
        if pair < 1 or pair >= problem.dimension:
            continue

        signed = np.empty((n_im, n_re))
        re_gap = np.empty((n_im, n_re))
        for i, y in enumerate(im):
            for j, x in enumerate(re):
                signed[i, j], re_gap[i, j] = _signed_gap(problem, complex(x, y), end, pair)

        def f(lam: complex) -> float:
            return _signed_gap(problem, lam, end, pair)[0]

        def accept(lam: complex) -> None:
            gap = _signed_gap(problem, lam, end, pair)[1]
            if gap <= accept_tol:
                points.append(BoundaryPoint(re=lam.real, im=lam.imag, end=end, gap=gap))

        for i in range(n_im):
            for j in range(n_re):
                here = complex(re[j], im[i])
                if j + 1 < n_re and signed[i, j] * signed[i, j + 1] < 0:
                    accept(_bisect(f, here, complex(re[j + 1], im[i]), signed[i, j], tol))
                if i + 1 < n_im and signed[i, j] * signed[i + 1, j] < 0:
                    accept(_bisect(f, here, complex(re[j], im[i + 1]), signed[i, j], tol))

        # rays lying on a grid row have zero gap along the row; keep those
        # cells and refine the tips
        def excess(lam: complex) -> float:
            return _signed_gap(problem, lam, end, pair)[1] - accept_tol

        flat = re_gap <= accept_tol
        for i in range(n_im):
            for j in range(n_re):
                if flat[i, j]:
                    points.append(BoundaryPoint(re=re[j], im=im[i], end=end, gap=re_gap[i, j]))
                if j + 1 < n_re and flat[i, j] != flat[i, j + 1]:
                    a, b = complex(re[j], im[i]), complex(re[j + 1], im[i])
                    tip = _bisect(excess, a, b, excess(a), tol)
                    gap = _signed_gap(problem, tip, end, pair)[1]
                    points.append(BoundaryPoint(re=tip.real, im=tip.imag, end=end, gap=gap))

    if points:
        log_debug("%s absolute spectrum: %d points", problem.name, len(points), prefix="SPECTRUM")
    else:
        logger.info("no absolute-spectrum points found for %s in window %s", problem.name, window)
    return points
