"""
Numerics Service

Closed-form roots of polynomials up to degree three, eigen-decomposition of
2x2 and 3x3 complex matrices, and an adaptive Dormand-Prince 5(4) integrator
for complex non-autonomous systems with cubic Hermite dense output.
"""

import cmath
import logging
import math
from typing import Callable, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from config.settings import settings


logger = logging.getLogger(__name__)

VectorField = Callable[[float, np.ndarray], np.ndarray]


class NumericsError(Exception):
    """Base exception for numerics failures."""
    pass


class DegreeError(NumericsError):
    """Raised when a polynomial has a vanishing leading coefficient."""
    pass


class StiffnessError(NumericsError):
    """Raised when the step size underflows; carries the last accepted state."""

    def __init__(self, message: str, last_z: float, last_y: np.ndarray, partial=None):
        super().__init__(message)
        self.last_z = last_z
        self.last_y = last_y
        self.partial = partial


class BlowupEvent(NumericsError):
    """Raised when the vector field stops returning finite values."""

    def __init__(self, message: str, z: float, y: np.ndarray, partial=None):
        super().__init__(message)
        self.z = z
        self.y = y
        self.partial = partial


class EigenPairs(BaseModel):
    """Eigenvalues sorted by descending real part with unit eigenvectors."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    eigenvalues: list[complex]
    eigenvectors: list[np.ndarray]
    defect_flag: bool = False


class Trajectory(BaseModel):
    """Accepted integration nodes with a cubic Hermite interpolant."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    z: np.ndarray
    y: np.ndarray
    dy: np.ndarray
    direction: int
    rel_tol: float
    abs_tol: float
    accepted_steps: int = 0
    rejected_steps: int = 0
    stopped: bool = False

    @property
    def z_start(self) -> float:
        return float(self.z[0])

    @property
    def z_end(self) -> float:
        return float(self.z[-1])

    @property
    def y_end(self) -> np.ndarray:
        return self.y[-1]

    def covers(self, z: float) -> bool:
        lo, hi = sorted((self.z_start, self.z_end))
        return lo <= z <= hi

    def _locate(self, z: float) -> int:
        if not self.covers(z):
            raise ValueError(f"z={z} outside trajectory span [{self.z_start}, {self.z_end}]")
        if self.direction > 0:
            i = int(np.searchsorted(self.z, z, side="right")) - 1
        else:
            # nodes decrease; search on the negated (increasing) sequence
            i = int(np.searchsorted(-self.z, -z, side="right")) - 1
        return min(max(i, 0), len(self.z) - 2)

    def value(self, z: float) -> np.ndarray:
        """Hermite interpolant at z."""
        if len(self.z) == 1:
            return self.y[0]
        i = self._locate(z)
        z0, z1 = self.z[i], self.z[i + 1]
        h = z1 - z0
        s = (z - z0) / h
        s2 = s * s
        s3 = s2 * s
        return ((2 * s3 - 3 * s2 + 1) * self.y[i]
                + (s3 - 2 * s2 + s) * h * self.dy[i]
                + (-2 * s3 + 3 * s2) * self.y[i + 1]
                + (s3 - s2) * h * self.dy[i + 1])

    def derivative(self, z: float) -> np.ndarray:
        """Derivative of the Hermite interpolant at z."""
        if len(self.z) == 1:
            return self.dy[0]
        i = self._locate(z)
        z0, z1 = self.z[i], self.z[i + 1]
        h = z1 - z0
        s = (z - z0) / h
        return ((6 * s * s - 6 * s) / h * self.y[i]
                + (3 * s * s - 4 * s + 1) * self.dy[i]
                + (-6 * s * s + 6 * s) / h * self.y[i + 1]
                + (3 * s * s - 2 * s) * self.dy[i + 1])


def _horner(coefficients: Sequence[complex], x: complex) -> tuple[complex, complex]:
    value = 0j
    slope = 0j
    for a in coefficients:
        slope = slope * x + value
        value = value * x + a
    return value, slope


def _newton_polish(coefficients: Sequence[complex], root: complex) -> complex:
    value, slope = _horner(coefficients, root)
    if slope == 0 or value == 0:
        return root
    candidate = root - value / slope
    if not cmath.isfinite(candidate):
        return root
    if abs(_horner(coefficients, candidate)[0]) <= abs(value):
        return candidate
    return root


def _quadratic_roots(a: complex, b: complex, c: complex) -> list[complex]:
    root_disc = cmath.sqrt(b * b - 4 * a * c)
    # pick the sign that avoids cancellation
    if abs(b + root_disc) >= abs(b - root_disc):
        q = -(b + root_disc) / 2
    else:
        q = -(b - root_disc) / 2
    if q == 0:
        return [0j, 0j]
    return [q / a, c / q]


def _cube_root(x: complex) -> complex:
    if x == 0:
        return 0j
    return cmath.exp(cmath.log(x) / 3)


def _cubic_roots(a: complex, b: complex, c: complex, d: complex) -> list[complex]:
    B, C, D = b / a, c / a, d / a
    shift = B / 3
    p = C - B * B / 3
    q = 2 * B ** 3 / 27 - B * C / 3 + D
    root_disc = cmath.sqrt((q / 2) ** 2 + (p / 3) ** 3)
    first = -q / 2 + root_disc
    second = -q / 2 - root_disc
    u3 = first if abs(first) >= abs(second) else second
    u = _cube_root(u3)
    omega = complex(-0.5, math.sqrt(3) / 2)
    roots = []
    for k in range(3):
        uk = u * omega ** k
        t = uk - p / (3 * uk) if uk != 0 else 0j
        roots.append(t - shift)
    return roots


def polynomial_roots(coefficients: Sequence[complex]) -> list[complex]:
    """
    Roots of a polynomial of degree at most three.

    Args:
        coefficients: Coefficients from the highest degree down

    Returns:
        Exactly `degree` roots counted with multiplicity, each polished by
        one Newton step

    Raises:
        DegreeError: If the leading coefficient is zero
    """
    coeffs = [complex(a) for a in coefficients]
    degree = len(coeffs) - 1
    if degree < 0 or degree > 3:
        raise DegreeError(f"degree {degree} not supported (expected 0..3)")
    if coeffs[0] == 0:
        raise DegreeError("leading coefficient is zero")
    if degree == 0:
        return []
    if degree == 1:
        return [-coeffs[1] / coeffs[0]]
    if degree == 2:
        roots = _quadratic_roots(*coeffs)
    else:
        roots = _cubic_roots(*coeffs)
    return [_newton_polish(coeffs, r) for r in roots]


def characteristic_coefficients(A: np.ndarray) -> list[complex]:
    """Coefficients of det(μI − A) for n = 2 or 3, highest degree first."""
    n = A.shape[0]
    trace = complex(A[0, 0] + A[1, 1] + (A[2, 2] if n == 3 else 0))
    if n == 2:
        det = complex(A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0])
        return [1, -trace, det]
    minors = complex(
        A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
        + A[0, 0] * A[2, 2] - A[0, 2] * A[2, 0]
        + A[1, 1] * A[2, 2] - A[1, 2] * A[2, 1]
    )
    det = complex(
        A[0, 0] * (A[1, 1] * A[2, 2] - A[1, 2] * A[2, 1])
        - A[0, 1] * (A[1, 0] * A[2, 2] - A[1, 2] * A[2, 0])
        + A[0, 2] * (A[1, 0] * A[2, 1] - A[1, 1] * A[2, 0])
    )
    return [1, -trace, minors, -det]


def _normalize(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    k = int(np.argmax(np.abs(v)))
    return v * (abs(v[k]) / v[k])


def eigen_decompose(A: np.ndarray) -> EigenPairs:
    """
    Eigen-decomposition of a 2x2 or 3x3 complex matrix.

    Eigenvalues come from the closed-form characteristic roots and are
    ordered by descending real part, ties by descending imaginary part.
    Eigenvectors span the numerical null space of A − μI; near-coincident
    eigenvalues share one SVD so that a diagonalizable cluster keeps
    independent vectors.

    Args:
        A: Square complex matrix with n in {2, 3}

    Returns:
        EigenPairs with defect_flag set when eigenvalues nearly coincide
    """
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    if A.shape != (n, n) or n not in (2, 3):
        raise ValueError(f"expected a 2x2 or 3x3 matrix, got shape {A.shape}")

    mus = polynomial_roots(characteristic_coefficients(A))
    mus.sort(key=lambda m: (-m.real, -m.imag))
    radius = max(abs(m) for m in mus)
    gap_tol = 1e-8 * radius

    clusters: list[list[int]] = []
    for i, mu in enumerate(mus):
        if clusters and abs(mu - mus[clusters[-1][-1]]) <= gap_tol:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    defect = any(len(group) > 1 for group in clusters)
    if not defect and n == 3 and radius > 0:
        defect = abs(mus[0] - mus[2]) <= gap_tol

    vectors: list[Optional[np.ndarray]] = [None] * n
    identity = np.eye(n)
    for group in clusters:
        centre = sum(mus[i] for i in group) / len(group)
        _, _, vh = np.linalg.svd(A - centre * identity)
        for rank, i in enumerate(group):
            vectors[i] = _normalize(vh[n - 1 - rank].conj())

    return EigenPairs(eigenvalues=mus, eigenvectors=vectors, defect_flag=defect)


# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40,
)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


def _finite(x: np.ndarray) -> bool:
    return bool(np.all(np.isfinite(x)))


def integrate(
    field: VectorField,
    y0: Sequence[complex],
    z_from: float,
    z_to: float,
    rel_tol: Optional[float] = None,
    abs_tol: Optional[float] = None,
    max_step: float = math.inf,
    stop: Optional[Callable[[float, np.ndarray], bool]] = None,
) -> Trajectory:
    """
    Integrate y' = field(z, y) from z_from to z_to (either direction).

    Steps are accepted when the embedded error estimate satisfies
    ‖err‖ ≤ rel_tol·max(‖y_n‖, ‖y_{n+1}‖) + abs_tol. Every accepted node is
    kept for dense output.

    Args:
        field: Right-hand side, called with a real z and a 1-D array
        y0: Initial state; real input stays real, complex stays complex
        z_from: Initial abscissa
        z_to: Final abscissa (may be smaller than z_from)
        rel_tol: Relative tolerance (defaults to settings.RTOL)
        abs_tol: Absolute tolerance (defaults to settings.ATOL)
        max_step: Upper bound on |h|
        stop: Optional predicate checked after each accepted step; when it
            returns True the integration ends at that node

    Returns:
        Trajectory over [z_from, z_end]

    Raises:
        StiffnessError: If |h| falls below 1e-12 of the span
        BlowupEvent: If the field is non-finite at an accepted state or
            keeps producing non-finite stages as the step shrinks
    """
    rel_tol = settings.RTOL if rel_tol is None else rel_tol
    abs_tol = settings.ATOL if abs_tol is None else abs_tol
    if z_from == z_to:
        raise ValueError("z_from and z_to must differ")

    y = np.array(y0, dtype=complex if np.iscomplexobj(y0) else float).reshape(-1)
    z = float(z_from)
    span = abs(z_to - z_from)
    direction = 1 if z_to > z_from else -1
    h_min = 1e-12 * span

    f = np.asarray(field(z, y))
    if not _finite(f):
        raise BlowupEvent(f"non-finite field at z={z}", z, y)

    zs = [z]
    ys = [y]
    dys = [f]

    norm_y = float(np.linalg.norm(y))
    norm_f = float(np.linalg.norm(f))
    if norm_f > 0:
        h = 0.01 * max(norm_y, 1e-6) / norm_f
    else:
        h = 1e-2 * span
    h = min(h, span, max_step)
    h = max(h, 1e3 * h_min)

    accepted = rejected = 0
    stopped = False

    def _build(stopped_early: bool) -> Trajectory:
        return Trajectory(
            z=np.array(zs),
            y=np.array(ys),
            dy=np.array(dys),
            direction=direction,
            rel_tol=rel_tol,
            abs_tol=abs_tol,
            accepted_steps=accepted,
            rejected_steps=rejected,
            stopped=stopped_early,
        )

    while direction * (z_to - z) > 0:
        remaining = abs(z_to - z)
        last_step = h >= remaining
        if last_step:
            h = remaining
        hs = direction * h

        k1 = f
        k2 = field(z + _C[1] * hs, y + hs * (_A21 * k1))
        k3 = field(z + _C[2] * hs, y + hs * (_A31 * k1 + _A32 * k2))
        k4 = field(z + _C[3] * hs, y + hs * (_A41 * k1 + _A42 * k2 + _A43 * k3))
        k5 = field(z + _C[4] * hs, y + hs * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4))
        k6 = field(z + hs, y + hs * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5))
        y_new = y + hs * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
        z_new = z_to if last_step else z + hs
        k7 = field(z_new, y_new)

        if not (_finite(y_new) and _finite(k7)):
            rejected += 1
            h *= _MIN_FACTOR
            if h < h_min:
                raise BlowupEvent(f"field blew up near z={z}", z, y, partial=_build(False))
            continue

        err = hs * (_E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7)
        err_norm = float(np.linalg.norm(err))
        scale = rel_tol * max(norm_y, float(np.linalg.norm(y_new))) + abs_tol
        ratio = err_norm / scale

        if ratio <= 1.0:
            accepted += 1
            z, y, f = z_new, y_new, np.asarray(k7)
            norm_y = float(np.linalg.norm(y))
            zs.append(z)
            ys.append(y)
            dys.append(f)
            factor = _MAX_FACTOR if ratio == 0 else min(_MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * ratio ** -0.2))
            h = min(h * factor, max_step)
            if stop is not None and stop(z, y):
                stopped = True
                break
        else:
            rejected += 1
            h *= min(1.0, max(_MIN_FACTOR, _SAFETY * ratio ** -0.2))
            if h < h_min:
                raise StiffnessError(f"step size underflow at z={z}", z, y, partial=_build(False))

    if rejected > 10 * max(accepted, 1):
        logger.warning("integration from %s to %s rejected %d of %d steps", z_from, z_to, rejected, accepted + rejected)

    return _build(stopped)


def second_compound(A: np.ndarray) -> np.ndarray:
    """
    Matrix of the induced flow on Plücker coordinates (K12, K13, K23).

    For v' = Av and w' = Aw, K_ij = v_i w_j − v_j w_i obeys K' = (A∧A) K.
    """
    pairs = ((0, 1), (0, 2), (1, 2))
    C = np.zeros((3, 3), dtype=complex)
    for row, (i, j) in enumerate(pairs):
        for col, (k, l) in enumerate(pairs):
            C[row, col] = (
                A[i, k] * (j == l) - A[i, l] * (j == k)
                + A[j, l] * (i == k) - A[j, k] * (i == l)
            )
    return C
