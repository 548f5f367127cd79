"""
Keller-Segel Service

The ε = 0 Keller-Segel front with u_r = 1 and z* = 0: closed-form wave
evaluation in overflow-safe ratio form, the 3x3 linearised matrix with its
coefficients 𝒜, ℬ, 𝒞 and their limits, the dispersion relations, the
Riccati flows on CP2 and Gr(2,3), and the Evans function E12q.
"""

import cmath
import logging
import math
from typing import NamedTuple, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from config.logging_utils import log_debug
from config.settings import settings
from models.params import KsParams
from models.reports import EvansValue
from services.fkpp_service import BranchPointError, DomainError, ModelError
from services.numerics_service import eigen_decompose, second_compound
from services.projective_service import ProjectiveTrack, plucker_from_basis, resident_chart, track_projective
from services.spectrum_service import End, SpectralProblem


logger = logging.getLogger(__name__)

__all__ = [
    "BranchPointError",
    "DomainError",
    "ModelError",
    "KsWaveEval",
    "KsCoefficients",
    "ks_wave_eval",
    "ks_coefficients",
    "ks_matrix",
    "ks_asymptotic",
    "ks_dispersion",
    "ks_riccati_cp2_rhs",
    "ks_riccati_gr23_rhs",
    "ks_evans_e12q",
    "ks_truncation",
    "KsEvans",
    "KsProblem",
]

_LABEL_TOL = 1e-10

# open box 0 < Re λ < 0.3, |Im λ| < 4, minus the disc |λ| ≤ 0.01
DEFAULT_EXCLUSION = (0.0, 0.3, 4.0, 0.01)


class KsWaveEval(BaseModel):
    """Wave values at one z; rho = w/u and q = w'/u are kept for cancellation-free coefficients."""

    model_config = ConfigDict(frozen=True)

    z: float
    u: float
    w: float
    du: float
    dw: float
    ddu: float
    ddw: float
    rho: float
    q: float


class KsCoefficients(NamedTuple):
    A: complex
    B: complex
    C: complex


def ks_wave_eval(params: KsParams, z: float) -> KsWaveEval:
    """
    Closed-form wave u = (1 + σe^{−cz/δ})^{−γ}, w = e^{−cz/δ} u^{β/δ} and
    derivatives.

    With t = cz/δ, ρ = w/u = e^{−t}/(1 + σe^{−t}) and θ = 1/(1 + σe^{−t}) are
    evaluated from e^{−|t|} only, so any real z (including ±inf) is safe.
    """
    alpha, c, delta = params.alpha, params.c, params.delta
    sigma, gamma = params.sigma, params.gamma
    t = c * z / delta
    if t >= 0:
        e = math.exp(-t)
        rho = e / (1.0 + sigma * e)
        theta = 1.0 / (1.0 + sigma * e)
        log_g = math.log1p(sigma * e)
    else:
        e = math.exp(t)
        rho = 1.0 / (e + sigma)
        theta = e * rho
        log_g = -t + math.log(sigma + e)

    u = math.exp(-gamma * log_g)
    w = rho * u
    q = (alpha / c) * rho * rho - (c / delta) * theta * rho
    dq = -(2 * alpha / delta) * theta * rho * rho - (c * c / (delta * delta)) * rho * theta * (1.0 - 2.0 * theta)
    dw = q * u
    return KsWaveEval(
        z=z,
        u=u,
        w=w,
        du=(alpha / c) * w,
        dw=dw,
        ddu=(alpha / c) * dw,
        ddw=u * ((alpha / c) * rho * q + dq),
        rho=rho,
        q=q,
    )


def _coefficients(params: KsParams, lam: complex, rho: float, q: float) -> KsCoefficients:
    alpha, beta, c, delta = params.alpha, params.beta, params.c, params.delta
    s1 = (alpha / c) * rho
    s2 = (alpha / c) * q
    A = (
        (beta * rho / (c * c * delta)) * lam * lam
        + (beta * q / (c * delta) - 2 * beta * rho * s1 / (c * delta)) * lam
        + (2 * beta / delta) * rho * s1 * s1
        - (beta / delta) * rho * s2
        - (beta / delta) * s1 * q
    )
    B = (
        (alpha * beta * rho / (c * c * delta) + 1.0 / delta) * lam
        + (alpha * beta / (c * delta)) * q
        - (2 * alpha * beta / (c * delta)) * rho * s1
        + (beta / delta) * s2
        - (beta / delta) * s1 * s1
    )
    C = -c / delta + alpha * beta * rho / (c * delta) + (beta / delta) * s1
    return KsCoefficients(A, B, C)


def ks_coefficients(params: KsParams, lam: complex, z: float) -> KsCoefficients:
    """(𝒜, ℬ, 𝒞) at z; z = ±inf gives the asymptotic limits."""
    wave = ks_wave_eval(params, z)
    return _coefficients(params, complex(lam), wave.rho, wave.q)


def _assemble(params: KsParams, lam: complex, coefficients: KsCoefficients) -> np.ndarray:
    return np.array([
        [lam / params.c, params.alpha / params.c, 0.0],
        [0.0, 0.0, 1.0],
        [coefficients.A, coefficients.B, coefficients.C],
    ], dtype=complex)


def ks_matrix(params: KsParams, lam: complex, z: float) -> np.ndarray:
    """𝔸(z, λ) with rows (λ/c, α/c, 0), (0, 0, 1), (𝒜, ℬ, 𝒞)."""
    lam = complex(lam)
    return _assemble(params, lam, ks_coefficients(params, lam, z))


def ks_asymptotic(params: KsParams, lam: complex, end: End) -> np.ndarray:
    return ks_matrix(params, lam, math.inf if end == "plus" else -math.inf)


def ks_truncation(params: KsParams) -> float:
    """Half-width L of the shooting domain, e^{−cL/δ} = 10^{−decades}."""
    return settings.KS_TRUNCATION_DECADES * params.delta / params.c * math.log(10.0)


def _minus_quadratic(params: KsParams, mu):
    """Coefficients (a2, a1, a0) of the −∞ dispersion relation as a quadratic in λ."""
    alpha, beta, c, delta = params.alpha, params.beta, params.c, params.delta
    c_minus = c * (beta + delta) / (delta * (beta - delta))
    a = (2 * delta - beta) / (delta * (beta - delta))
    b = beta * c * c / (delta * (beta - delta) ** 2)
    return 1.0 / (c * delta), a * mu - mu * mu / c, mu ** 3 - c_minus * mu * mu + b * mu


def ks_dispersion(params: KsParams, k: float) -> tuple[complex, complex, complex, complex]:
    """
    λ with spatial eigenvalue ik: the two plus-end curves −δk² + ick and
    ick, then the minus-end pair λ± = (−δ(β−δ)k² + ic(β−2δ)k ± √Δ)/(2(β−δ)).
    """
    beta, c, delta = params.beta, params.c, params.delta
    gap = beta - delta
    discriminant = complex(
        delta ** 2 * gap ** 2 * k ** 4 + beta * c * c * (4 * delta - 5 * beta) * k ** 2,
        2 * beta * c * delta * gap * k ** 3 - 4 * beta * c ** 3 * k,
    )
    root = cmath.sqrt(discriminant)
    centre = complex(-delta * gap * k * k, c * (beta - 2 * delta) * k)
    return (
        complex(-delta * k * k, c * k),
        complex(0.0, c * k),
        (centre + root) / (2 * gap),
        (centre - root) / (2 * gap),
    )


def ks_riccati_cp2_rhs(coords: Sequence[complex], z: float, lam: complex, params: KsParams) -> np.ndarray:
    """
    Riccati flow on the CP2 chart q ≠ 0 with (η3, η4) = (p/q, r/q):
    η3' = (λ/c)η3 + α/c − η3η4, η4' = 𝒜η3 + ℬ + 𝒞η4 − η4².
    """
    eta3, eta4 = coords
    A, B, C = ks_coefficients(params, lam, z)
    return np.array([
        (lam / params.c) * eta3 + params.alpha / params.c - eta3 * eta4,
        A * eta3 + B + C * eta4 - eta4 * eta4,
    ])


def ks_riccati_gr23_rhs(coords: Sequence[complex], z: float, lam: complex, params: KsParams) -> np.ndarray:
    """
    Riccati flow on the Gr(2,3) chart K12 ≠ 0 with κ5 = −K23/K12, κ6 = K13/K12:
    κ5' = 𝒜 + (𝒞 − λ/c)κ5 − κ5κ6, κ6' = ℬ − (α/c)κ5 + 𝒞κ6 − κ6².
    """
    kappa5, kappa6 = coords
    A, B, C = ks_coefficients(params, lam, z)
    return np.array([
        A + (C - lam / params.c) * kappa5 - kappa5 * kappa6,
        B - (params.alpha / params.c) * kappa5 + C * kappa6 - kappa6 * kappa6,
    ])


def kappa_from_plucker(k) -> tuple[complex, complex]:
    """(κ5, κ6) = (−K23/K12, K13/K12)."""
    k12, k13, k23 = k
    return -k23 / k12, k13 / k12


class KsProblem(SpectralProblem):
    """Keller-Segel linearisation as a spectral problem."""

    name = "ks"
    dimension = 3
    unstable_dimension = 2
    reference_point = 10.0

    def __init__(self, params: KsParams):
        self.params = params

    def matrix(self, z: float, lam: complex) -> np.ndarray:
        return ks_matrix(self.params, lam, z)

    def asymptotic(self, lam: complex, end: End) -> np.ndarray:
        return ks_asymptotic(self.params, lam, end)

    def dispersion_lambdas(self, mu: np.ndarray) -> np.ndarray:
        mu = np.asarray(mu, dtype=complex)
        c, delta = self.params.c, self.params.delta
        a2, a1, a0 = _minus_quadratic(self.params, mu)
        root = np.sqrt(a1 * a1 - 4 * a2 * a0)
        return np.stack([
            c * mu,
            delta * mu * mu + c * mu,
            (-a1 + root) / (2 * a2),
            (-a1 - root) / (2 * a2),
        ], axis=-1)


class KsEvans:
    """
    Evaluator of E12q(λ) = η4^s − κ6^u − η3^s κ5^u at the matching point.

    The stable line is tracked backward on CP2 from the right end, the
    unstable plane forward on Gr(2,3) (Plücker coordinates) from the left
    end. The value is assembled from homogeneous representatives,
    D = s1·K23 − s2·K13 + s3·K12 and E12q = D/(K12·s2), which equals the
    chart formula whenever both objects sit in the canonical charts.
    """

    name = "ks"
    canonical_residency = (0, 1)

    def __init__(
        self,
        params: KsParams,
        exclusion: Optional[tuple[float, float, float, float]] = DEFAULT_EXCLUSION,
        matching_point: Optional[float] = None,
        rel_tol: Optional[float] = None,
        abs_tol: Optional[float] = None,
        decay: Optional[float] = None,
    ):
        self.params = params
        self.exclusion = exclusion
        self.matching_point = settings.MATCHING_POINT if matching_point is None else matching_point
        self.rel_tol = rel_tol
        self.abs_tol = abs_tol
        self.decay = settings.SHOOTING_DECAY if decay is None else decay
        self.truncation = ks_truncation(params)

    def branch_points(self) -> list[complex]:
        return []

    def excluded(self, lam: complex) -> bool:
        if self.exclusion is None:
            return False
        re_lo, re_hi, im_abs, radius = self.exclusion
        return (
            re_lo < lam.real < re_hi
            and abs(lam.imag) < im_abs
            and abs(lam) > radius * (1 + 1e-6)
        )

    def _reach(self, gap: float) -> float:
        if gap > 0:
            return min(self.truncation, self.decay / gap)
        return self.truncation

    def unstable_labels(self, lam: complex, reference: Optional[Sequence[complex]] = None) -> list[complex]:
        """
        The two spatial eigenvalues of 𝔸₋(λ) spanning the unstable plane:
        the two largest real parts, or the nearest matches to `reference`.

        Raises:
            BranchPointError: If the straddling real parts coincide and no
                reference resolves the labels
        """
        mus = list(eigen_decompose(ks_asymptotic(self.params, lam, "minus")).eigenvalues)
        if reference is None:
            if abs(mus[1].real - mus[2].real) < _LABEL_TOL:
                raise BranchPointError(f"unstable labels at −∞ are ambiguous at λ={lam}", lam)
            return mus[:2]
        chosen = []
        for target in reference:
            best = min((m for m in mus if m not in chosen), key=lambda m: abs(m - complex(target)))
            chosen.append(best)
        return chosen

    def _matrix(self, lam: complex):
        params = self.params

        def matrix(z: float) -> np.ndarray:
            return ks_matrix(params, lam, z)

        return matrix

    def track_unstable(self, lam: complex, reference: Optional[Sequence[complex]] = None) -> tuple[ProjectiveTrack, list[complex]]:
        """Unstable plane as Plücker coordinates, from the left end to the matching point."""
        lam = complex(lam)
        labels = self.unstable_labels(lam, reference)
        mus = eigen_decompose(ks_asymptotic(self.params, lam, "minus")).eigenvalues
        remaining = [m for m in mus if m not in labels][0]
        gap = min(m.real for m in labels) - remaining.real
        z0 = self.matching_point - self._reach(gap)

        frozen = eigen_decompose(ks_matrix(self.params, lam, z0))
        picked = []
        for target in labels:
            i = min(
                (i for i in range(3) if i not in picked),
                key=lambda i: abs(frozen.eigenvalues[i] - target),
            )
            picked.append(i)
        start = plucker_from_basis(frozen.eigenvectors[picked[0]], frozen.eigenvectors[picked[1]])

        matrix = self._matrix(lam)
        track = track_projective(
            "GR23", lambda z: second_compound(matrix(z)), start.coordinates,
            z0, self.matching_point, rel_tol=self.rel_tol, abs_tol=self.abs_tol,
        )
        return track, labels

    def track_stable(self, lam: complex) -> ProjectiveTrack:
        """Stable line on CP2 from the right end back to the matching point."""
        lam = complex(lam)
        mus = eigen_decompose(ks_asymptotic(self.params, lam, "plus")).eigenvalues
        z0 = self.matching_point + self._reach(mus[1].real - mus[2].real)
        frozen = eigen_decompose(ks_matrix(self.params, lam, z0))
        return track_projective(
            "CP2", self._matrix(lam), frozen.eigenvectors[2],
            z0, self.matching_point, rel_tol=self.rel_tol, abs_tol=self.abs_tol,
        )

    def evaluate(self, lam: complex, reference: Optional[Sequence[complex]] = None) -> EvansValue:
        lam = complex(lam)
        if self.excluded(lam):
            raise BranchPointError(f"λ={lam} lies in the excluded region around the absolute spectrum", lam)

        unstable, labels = self.track_unstable(lam, reference)
        stable = self.track_stable(lam)
        m = self.matching_point
        k12, k13, k23 = unstable.homogeneous_at(m)
        s1, s2, s3 = stable.homogeneous_at(m)
        determinant = s1 * k23 - s2 * k13 + s3 * k12
        denominator = k12 * s2
        value = determinant / denominator if denominator != 0 else complex(math.inf, math.inf)

        residency = (resident_chart((k12, k13, k23), 0), resident_chart((s1, s2, s3), 1))
        if residency != self.canonical_residency:
            log_debug("λ=%s: non-canonical charts %s at z=%s", lam, residency, m, prefix="EVANS")
        return EvansValue(
            lam=lam,
            value=complex(value),
            residency=residency,
            switches=len(unstable.switch_log) + len(stable.switch_log),
            labels=labels,
        )

    def __call__(self, lam: complex, reference: Optional[Sequence[complex]] = None) -> EvansValue:
        return self.evaluate(lam, reference)


def ks_evans_e12q(
    params: KsParams,
    lam: complex,
    reference: Optional[Sequence[complex]] = None,
) -> tuple[complex, EvansValue]:
    """E12q(λ) with its diagnostics."""
    result = KsEvans(params).evaluate(lam, reference)
    return result.value, result
