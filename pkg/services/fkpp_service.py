"""
F-KPP Service

The Fisher/KPP front u_t = δu_xx + u(1 − u): wave construction by
phase-plane shooting, the linearised 2x2 system, closed-form spatial
eigenvalues, the Riccati flow on the η = q/p and τ = p/q charts, the Evans
functions E_η and E_τ, the real-λ crossing counter, the absolute-spectrum
rays and the weighted-space edge.
"""

import cmath
import logging
import math
from typing import Literal, NamedTuple, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.optimize import brentq

from config.logging_utils import log_debug, log_success
from config.settings import settings
from models.params import FkppParams
from models.reports import EvansValue
from services.numerics_service import Trajectory, integrate
from services.projective_service import ProjectiveTrack, resident_chart, track_projective
from services.spectrum_service import End, SpectralProblem


logger = logging.getLogger(__name__)

_BRANCH_EPS = 1e-12
_DEGENERATE_SLOPE = 1e-10


class ModelError(Exception):
    """Base exception for travelling-wave model failures."""
    pass


class DomainError(ModelError):
    """Raised when a computation needs more domain than its budget allows."""
    pass


class BranchPointError(ModelError):
    """Raised when λ sits at (or too close to) a branch point of the spatial eigenvalues."""

    def __init__(self, message: str, lam: complex):
        super().__init__(message)
        self.lam = lam


class WaveProfile(BaseModel):
    """Interpolable (u, u') on [z_min, z_max], clamped to the end states outside."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    trajectory: Trajectory
    left_state: tuple[float, float]
    right_state: tuple[float, float]

    @property
    def z_min(self) -> float:
        return self.trajectory.z_start

    @property
    def z_max(self) -> float:
        return self.trajectory.z_end

    def value(self, z: float) -> np.ndarray:
        if z <= self.z_min:
            return np.array(self.left_state)
        if z >= self.z_max:
            return np.array(self.right_state)
        return self.trajectory.value(z)

    def derivative(self, z: float) -> np.ndarray:
        if z <= self.z_min or z >= self.z_max:
            return np.zeros(2)
        return self.trajectory.derivative(z)

    def u(self, z: float) -> float:
        return float(self.value(z)[0])


class FkppWave(BaseModel):
    """Front connecting (1, 0) at −∞ to (0, 0) at +∞, with u(0) = 1/2."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    params: FkppParams
    profile: WaveProfile
    normalization: float = 0.5
    tail_tol: float

    @property
    def left_span(self) -> float:
        return -self.profile.z_min

    @property
    def right_span(self) -> float:
        return self.profile.z_max

    def u(self, z: float) -> float:
        return self.profile.u(z)


class SpatialEigs(NamedTuple):
    unstable: complex
    stable: complex
    branch: bool


class CrossingCount(NamedTuple):
    lam: float
    count: int
    degenerate: bool


class AbsoluteRays(NamedTuple):
    plus_endpoint: float
    minus_endpoint: float


class WeightedEdge(NamedTuple):
    edge: float
    admissible: bool


def _wave_field(params: FkppParams):
    c, delta = params.c, params.delta

    def field(_z: float, y: np.ndarray) -> np.ndarray:
        u, v = y
        return np.array([v, -(c * v + u * (1.0 - u)) / delta])

    return field


def fkpp_wave(params: FkppParams, tail_tol: Optional[float] = None) -> FkppWave:
    """
    Shoot the heteroclinic front out of the saddle (1, 0).

    The start point is (1, 0) − ε·ξ with ξ the unit unstable eigenvector
    (1, μ_u)/‖·‖ of the saddle. The orbit is integrated until
    max(|u|, |u'|) < tail_tol, shifted so that u(0) = 1/2, and extended to
    the left along the linear unstable manifold until it is within
    tail_tol of (1, 0).

    Raises:
        ModelError: If u' turns positive for a front with c ≥ 2√δ
        DomainError: If the tail is not reached within the z-budget
    """
    tail_tol = settings.WAVE_TAIL_TOL if tail_tol is None else tail_tol
    c, delta = params.c, params.delta
    eps = settings.WAVE_SHOOTING_EPSILON

    mu_u = (-c + math.sqrt(c * c + 4 * delta)) / (2 * delta)
    xi = np.array([1.0, mu_u]) / math.hypot(1.0, mu_u)
    start = np.array([1.0, 0.0]) - eps * xi

    def reached_tail(_z: float, y: np.ndarray) -> bool:
        return bool(max(abs(y[0]), abs(y[1])) < tail_tol)

    log_debug("shooting F-KPP front c=%s delta=%s", c, delta, prefix="WAVE")
    shot = integrate(
        _wave_field(params), start, 0.0, settings.WAVE_Z_BUDGET,
        max_step=settings.WAVE_MAX_STEP, stop=reached_tail,
    )
    if not shot.stopped:
        raise DomainError(f"tail tolerance {tail_tol} not reached within z-budget {settings.WAVE_Z_BUDGET}")

    u, v = shot.y[:, 0], shot.y[:, 1]
    if params.monotone and np.any(v[:-1] >= 0):
        raise ModelError(f"shooting produced a non-monotone front for c={c} ≥ 2√δ")

    below = np.nonzero(u < 0.5)[0]
    if len(below) == 0:
        raise ModelError("front never crosses u = 1/2")
    i = int(below[0])
    z_half = brentq(lambda z: shot.value(z)[0] - 0.5, shot.z[i - 1], shot.z[i])

    # linear unstable-manifold tail: deviation ε·e^{μ_u z} for z < 0
    z_left = math.log(tail_tol / eps) / mu_u if tail_tol < eps else 0.0
    tail_z = np.arange(z_left, 0.0, settings.WAVE_MAX_STEP) if z_left < 0 else np.empty(0)
    decay = eps * np.exp(mu_u * tail_z)
    tail_y = np.array([1.0, 0.0]) - decay[:, None] * xi
    tail_dy = -(mu_u * decay)[:, None] * xi

    profile = Trajectory(
        z=np.concatenate([tail_z, shot.z]) - z_half,
        y=np.concatenate([tail_y.reshape(-1, 2), shot.y]),
        dy=np.concatenate([tail_dy.reshape(-1, 2), shot.dy]),
        direction=1,
        rel_tol=shot.rel_tol,
        abs_tol=shot.abs_tol,
        accepted_steps=shot.accepted_steps,
        rejected_steps=shot.rejected_steps,
    )
    log_success(f"F-KPP front on [{profile.z_start:.2f}, {profile.z_end:.2f}]", prefix="WAVE")
    return FkppWave(
        params=params,
        profile=WaveProfile(trajectory=profile, left_state=(1.0, 0.0), right_state=(0.0, 0.0)),
        tail_tol=tail_tol,
    )


def fkpp_matrix(params: FkppParams, wave: FkppWave, z: float, lam: complex) -> np.ndarray:
    """Coefficient matrix [[0, 1], [(λ − 1 + 2û)/δ, −c/δ]]."""
    u = wave.u(z)
    return np.array([[0.0, 1.0], [(lam - 1.0 + 2.0 * u) / params.delta, -params.c / params.delta]], dtype=complex)


def fkpp_asymptotic(params: FkppParams, lam: complex, end: End) -> np.ndarray:
    u = 0.0 if end == "plus" else 1.0
    return np.array([[0.0, 1.0], [(lam - 1.0 + 2.0 * u) / params.delta, -params.c / params.delta]], dtype=complex)


def _frozen_eigs(params: FkppParams, lam: complex, u: float) -> SpatialEigs:
    c, delta = params.c, params.delta
    disc = c * c + 4 * delta * (lam - 1.0 + 2.0 * u)
    root = cmath.sqrt(disc)
    return SpatialEigs(
        unstable=(-c + root) / (2 * delta),
        stable=(-c - root) / (2 * delta),
        branch=abs(disc) < _BRANCH_EPS,
    )


def fkpp_spatial_eigs(params: FkppParams, lam: complex, end: End) -> SpatialEigs:
    """
    μ^{u,s} = (−c ± √(c² + 4δ(λ ∓ 1)))/(2δ) with the principal root.

    The + root is labelled unstable everywhere, which continues the labels
    analytically into the continuous spectrum.
    """
    return _frozen_eigs(params, complex(lam), 0.0 if end == "plus" else 1.0)


def fkpp_riccati_rhs(
    chart: Literal["eta", "tau"],
    value: complex,
    u: float,
    lam: complex,
    params: FkppParams,
) -> complex:
    """
    η' = (λ − 1 + 2û)/δ − (c/δ)η − η² on the η chart and
    τ' = 1 + (c/δ)τ − ((λ − 1 + 2û)/δ)τ² on the τ chart.
    """
    forcing = (lam - 1.0 + 2.0 * u) / params.delta
    drift = params.c / params.delta
    if chart == "eta":
        return forcing - drift * value - value * value
    return 1.0 + drift * value - forcing * value * value


def fkpp_dispersion(params: FkppParams, k: float) -> tuple[complex, complex]:
    """λ = −δk² ± 1 + ick: the plus-end curve first, then the minus-end curve."""
    base = complex(-params.delta * k * k, params.c * k)
    return base + 1.0, base - 1.0


def fkpp_absolute_spectrum(params: FkppParams) -> AbsoluteRays:
    """Right endpoints of the rays λ ≤ 1 − c²/(4δ) and λ ≤ −1 − c²/(4δ)."""
    shift = params.c ** 2 / (4 * params.delta)
    return AbsoluteRays(plus_endpoint=1.0 - shift, minus_endpoint=-1.0 - shift)


def fkpp_weighted_edge(params: FkppParams, nu: float) -> WeightedEdge:
    """
    Rightmost point 1 + cν + δν² of the continuous spectrum in the space
    weighted by e^{νz}; the weight is admissible when it is negative.
    """
    edge = 1.0 + params.c * nu + params.delta * nu * nu
    return WeightedEdge(edge=edge, admissible=edge < 0)


class FkppProblem(SpectralProblem):
    """F-KPP linearisation as a spectral problem."""

    name = "fkpp"
    dimension = 2
    unstable_dimension = 1
    reference_point = 10.0

    def __init__(self, params: FkppParams, wave: Optional[FkppWave] = None):
        self.params = params
        self.wave = wave

    def matrix(self, z: float, lam: complex) -> np.ndarray:
        if self.wave is None:
            raise ModelError("the coefficient matrix needs a computed wave")
        return fkpp_matrix(self.params, self.wave, z, lam)

    def asymptotic(self, lam: complex, end: End) -> np.ndarray:
        return fkpp_asymptotic(self.params, lam, end)

    def spatial_eigenvalues(self, lam: complex, end: End) -> list[complex]:
        eigs = fkpp_spatial_eigs(self.params, lam, end)
        return sorted([eigs.unstable, eigs.stable], key=lambda m: (-m.real, -m.imag))

    def dispersion_lambdas(self, mu: np.ndarray) -> np.ndarray:
        mu = np.asarray(mu, dtype=complex)
        base = self.params.delta * mu * mu + self.params.c * mu
        return np.stack([base + 1.0, base - 1.0], axis=-1)


class FkppEvans:
    """
    Evans-function evaluator for a fixed F-KPP wave.

    η^u is tracked forward from the left end and η^s backward from the
    right end, both on CP1 with chart switching; the two lines are compared
    at the matching point. Instances are picklable so contour samples can
    be evaluated in worker processes.
    """

    name = "fkpp"
    canonical_residency = (0, 0)

    def __init__(
        self,
        params: FkppParams,
        wave: FkppWave,
        at_branch_ok: bool = False,
        matching_point: Optional[float] = None,
        rel_tol: Optional[float] = None,
        abs_tol: Optional[float] = None,
        max_span: Optional[float] = None,
        decay: Optional[float] = None,
    ):
        self.params = params
        self.wave = wave
        self.at_branch_ok = at_branch_ok
        self.matching_point = settings.MATCHING_POINT if matching_point is None else matching_point
        self.rel_tol = rel_tol
        self.abs_tol = abs_tol
        self.max_span = settings.FKPP_MAX_SPAN if max_span is None else max_span
        self.decay = settings.SHOOTING_DECAY if decay is None else decay

    def branch_points(self) -> list[complex]:
        rays = fkpp_absolute_spectrum(self.params)
        return [complex(rays.plus_endpoint), complex(rays.minus_endpoint)]

    def _matrix(self, lam: complex):
        params, wave = self.params, self.wave
        c_over_delta = params.c / params.delta

        def matrix(z: float) -> np.ndarray:
            return np.array([[0.0, 1.0], [(lam - 1.0 + 2.0 * wave.u(z)) / params.delta, -c_over_delta]])

        return matrix

    def _reach(self, available: float, gap: float) -> float:
        reach = min(available, self.max_span)
        if gap > 0:
            reach = min(reach, self.decay / gap)
        return reach

    def unstable_start(self, lam: complex) -> float:
        gap = fkpp_spatial_eigs(self.params, lam, "minus")
        reach = self._reach(self.matching_point + self.wave.left_span, (gap.unstable - gap.stable).real)
        return self.matching_point - reach

    def stable_start(self, lam: complex) -> float:
        gap = fkpp_spatial_eigs(self.params, lam, "plus")
        reach = self._reach(self.wave.right_span - self.matching_point, (gap.unstable - gap.stable).real)
        return self.matching_point + reach

    def track_unstable(self, lam: complex, z_end: Optional[float] = None) -> ProjectiveTrack:
        """Unstable line from its frozen eigendirection at the left end up to z_end."""
        lam = complex(lam)
        z0 = self.unstable_start(lam)
        mu = _frozen_eigs(self.params, lam, self.wave.u(z0)).unstable
        z_end = self.matching_point if z_end is None else z_end
        return track_projective(
            "CP1", self._matrix(lam), np.array([1.0, mu]), z0, z_end,
            rel_tol=self.rel_tol, abs_tol=self.abs_tol,
        )

    def track_stable(self, lam: complex) -> ProjectiveTrack:
        """Stable line from its frozen eigendirection at the right end back to the matching point."""
        lam = complex(lam)
        z0 = self.stable_start(lam)
        mu = _frozen_eigs(self.params, lam, self.wave.u(z0)).stable
        return track_projective(
            "CP1", self._matrix(lam), np.array([1.0, mu]), z0, self.matching_point,
            rel_tol=self.rel_tol, abs_tol=self.abs_tol,
        )

    def _check_branch(self, lam: complex) -> bool:
        at_branch = False
        for end in ("plus", "minus"):
            if fkpp_spatial_eigs(self.params, lam, end).branch:
                if not self.at_branch_ok:
                    raise BranchPointError(f"λ={lam} is a branch point of the {end}-end spatial eigenvalues", lam)
                at_branch = at_branch or end == "plus"
        return at_branch

    def evaluate(self, lam: complex, chart: Literal["eta", "tau"] = "eta") -> EvansValue:
        """
        E_η = η^s − η^u (or E_τ = τ^u − τ^s) at the matching point, assembled
        from homogeneous representatives so it is chart independent.

        With at_branch_ok, the plus-end branch point λ̃ = 1 − c²/(4δ) returns
        E_η = 0 without shooting: there μ₊^s = μ₊^u, and the unstable line,
        which tends to μ₊^u, is then also a connection into μ₊^s.
        """
        lam = complex(lam)
        if self._check_branch(lam) and chart == "eta":
            # μ₊^s and μ₊^u coincide, so the unstable line meets the stable one
            log_debug("λ=%s is the plus-end branch point, E_η set to 0", lam, prefix="EVANS")
            return EvansValue(lam=lam, value=0j, residency=(0, 0), switches=0, connection="branch")

        unstable = self.track_unstable(lam)
        stable = self.track_stable(lam)
        m = self.matching_point
        p_u, q_u = unstable.homogeneous_at(m)
        p_s, q_s = stable.homogeneous_at(m)
        if chart == "eta":
            denominator = p_u * p_s
            numerator = q_s * p_u - q_u * p_s
        else:
            denominator = q_u * q_s
            numerator = p_u * q_s - p_s * q_u
        value = numerator / denominator if denominator != 0 else complex(math.inf, math.inf)
        return EvansValue(
            lam=lam,
            value=complex(value),
            residency=(resident_chart((p_u, q_u), 0), resident_chart((p_s, q_s), 0)),
            switches=len(unstable.switch_log) + len(stable.switch_log),
        )

    def __call__(self, lam: complex, reference=None) -> EvansValue:
        return self.evaluate(lam)


def fkpp_evans_eta(
    params: FkppParams,
    wave: FkppWave,
    lam: complex,
    at_branch_ok: bool = False,
) -> tuple[complex, EvansValue]:
    """E_η(λ) with its diagnostics."""
    result = FkppEvans(params, wave, at_branch_ok=at_branch_ok).evaluate(lam, chart="eta")
    return result.value, result


def fkpp_evans_tau(
    params: FkppParams,
    wave: FkppWave,
    lam: complex,
    at_branch_ok: bool = False,
) -> tuple[complex, EvansValue]:
    """E_τ(λ) = τ^u − τ^s with its diagnostics."""
    result = FkppEvans(params, wave, at_branch_ok=at_branch_ok).evaluate(lam, chart="tau")
    return result.value, result


def fkpp_crossing_count(params: FkppParams, wave: FkppWave, lam: float) -> CrossingCount:
    """
    Number of times the real unstable line ℓ(z) passes the direction of
    μ₊^s(λ) on RP1 while z runs over the whole wave.

    The angle θ = atan2(q, p) is unwrapped modulo π and passages through
    atan(μ₊^s) + kπ are counted. A passage where the crossing speed 2û/δ
    falls below 1e-10 marks the count degenerate.

    Raises:
        ModelError: If c < 2√δ or λ is not a real number ≥ 0
    """
    if not params.monotone:
        raise ModelError(f"crossing count needs c ≥ 2√δ (c={params.c}, δ={params.delta})")
    if isinstance(lam, complex) and lam.imag != 0:
        raise ModelError(f"crossing count needs real λ, got {lam}")
    lam = float(lam.real if isinstance(lam, complex) else lam)
    if lam < 0:
        raise ModelError(f"crossing count needs λ ≥ 0, got {lam}")

    delta, c = params.delta, params.c

    def matrix(z: float) -> np.ndarray:
        return np.array([[0.0, 1.0], [(lam - 1.0 + 2.0 * wave.u(z)) / delta, -c / delta]])

    z0, z1 = wave.profile.z_min, wave.profile.z_max
    start = _frozen_eigs(params, lam, wave.u(z0)).unstable.real
    track = track_projective("CP1", matrix, np.array([1.0, start]), z0, z1)

    nodes = track.nodes()
    zs = np.array([z for z, _, _ in nodes])
    theta = np.array([math.atan2(h[1].real, h[0].real) for _, _, h in nodes])
    theta = np.unwrap(2.0 * theta) / 2.0
    target = math.atan(fkpp_spatial_eigs(params, lam, "plus").stable.real)
    level = np.floor((theta - target) / math.pi)

    count = 0
    degenerate = False
    for i in range(len(level) - 1):
        passed = int(abs(level[i + 1] - level[i]))
        if passed:
            count += passed
            if 2.0 * wave.u(zs[i + 1]) / delta < _DEGENERATE_SLOPE:
                degenerate = True
    log_debug("crossings at λ=%s: %d%s", lam, count, " (degenerate)" if degenerate else "", prefix="WAVE")
    return CrossingCount(lam=lam, count=count, degenerate=degenerate)
