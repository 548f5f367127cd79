import math

import numpy as np
import pytest
from pydantic import ValidationError

from models.contour import ContourSpec
from models.params import KsParams
from services.evans_service import build_contour, winding
from services.ks_service import (
    BranchPointError,
    KsEvans,
    KsProblem,
    kappa_from_plucker,
    ks_asymptotic,
    ks_coefficients,
    ks_dispersion,
    ks_evans_e12q,
    ks_matrix,
    ks_riccati_cp2_rhs,
    ks_riccati_gr23_rhs,
    ks_truncation,
    ks_wave_eval,
)
from services.numerics_service import integrate, second_compound
from services.projective_service import chart_riccati
from services.spectrum_service import signature


def line_distance(h, y):
    """Largest 2×2 minor of [h y], scaled; zero when h and y span one line."""
    return np.abs(np.outer(h, y) - np.outer(y, h)).max() / (np.linalg.norm(h) * np.linalg.norm(y))



class TestWave:
    def test_values_at_origin(self, ks_params):
        point = ks_wave_eval(ks_params, 0.0)
        assert point.u == pytest.approx(0.8, rel=1e-14)
        assert point.w == pytest.approx(0.64, rel=1e-14)

    def test_u_derivative_identity(self, ks_params):
        for z in np.linspace(-15, 15, 61):
            point = ks_wave_eval(ks_params, float(z))
            assert point.du == pytest.approx(ks_params.alpha / ks_params.c * point.w, rel=1e-12, abs=1e-300)

    def test_derivatives_match_finite_differences(self, ks_params):
        h = 1e-5
        for z in np.linspace(-6, 6, 25):
            left = ks_wave_eval(ks_params, float(z) - h)
            right = ks_wave_eval(ks_params, float(z) + h)
            point = ks_wave_eval(ks_params, float(z))
            assert point.dw == pytest.approx((right.w - left.w) / (2 * h), abs=1e-8)
            assert point.ddu == pytest.approx((right.du - left.du) / (2 * h), abs=1e-8)
            assert point.ddw == pytest.approx((right.dw - left.dw) / (2 * h), abs=1e-8)

    def test_travelling_wave_equation_residual(self, ks_params):
        alpha, beta, c, delta = ks_params.alpha, ks_params.beta, ks_params.c, ks_params.delta
        for z in np.linspace(-20.0, 20.0, 1001):
            p = ks_wave_eval(ks_params, float(z))
            residual = (
                delta * p.ddw
                + alpha * beta / c * (p.du * p.w ** 2 / p.u ** 2 - 2.0 * p.w * p.dw / p.u)
                + c * p.dw
            )
            assert abs(residual) <= 1e-8

    def test_far_field_is_finite(self, ks_params):
        for z in (-1e6, -math.inf, 1e6, math.inf):
            point = ks_wave_eval(ks_params, z)
            assert all(math.isfinite(x) for x in (point.u, point.w, point.rho, point.q))

    def test_truncation_matches_decades(self, ks_params):
        L = ks_truncation(ks_params)
        assert math.exp(-ks_params.c * L / ks_params.delta) == pytest.approx(1e-14, rel=1e-9)

    def test_invalid_diffusion_rejected(self):
        with pytest.raises(ValidationError, match="0 < delta < beta"):
            KsParams(alpha=1.0, beta=1.0, c=2.0, delta=1.0)


class TestMatrix:
    def test_matrix_converges_to_limits(self, ks_params):
        lam = 0.5 + 1.0j
        assert np.allclose(ks_matrix(ks_params, lam, 40.0), ks_asymptotic(ks_params, lam, "plus"), atol=1e-12)
        assert np.allclose(ks_matrix(ks_params, lam, -40.0), ks_asymptotic(ks_params, lam, "minus"), atol=1e-12)

    def test_plus_end_is_block_triangular(self, ks_params):
        A, B, C = ks_coefficients(ks_params, 1.0, math.inf)
        assert A == 0
        assert B == pytest.approx(1.0 / ks_params.delta)
        assert C == pytest.approx(-ks_params.c / ks_params.delta)

    def test_cp2_flow_is_chart_flow(self, ks_params):
        coords = np.array([0.3 - 0.1j, -1.2 + 0.4j])
        lam, z = 2.0 + 1.0j, 0.7
        expected = chart_riccati(ks_matrix(ks_params, lam, z), 1, coords)
        assert np.allclose(ks_riccati_cp2_rhs(coords, z, lam, ks_params), expected)

    def test_gr23_flow_is_plucker_chart_flow(self, ks_params):
        kappa5, kappa6 = 0.2 + 0.3j, -0.5 + 0.1j
        lam, z = 1.0 - 2.0j, -0.4
        generic = np.array([kappa6, -kappa5])
        d_generic = chart_riccati(second_compound(ks_matrix(ks_params, lam, z)), 0, generic)
        d_kappa = ks_riccati_gr23_rhs((kappa5, kappa6), z, lam, ks_params)
        assert d_kappa[0] == pytest.approx(-d_generic[1])
        assert d_kappa[1] == pytest.approx(d_generic[0])

    def test_kappa_from_plucker(self):
        assert kappa_from_plucker((2.0, 4.0, 6.0)) == (-3.0, 2.0)


class TestDispersion:
    def test_curves_make_asymptotic_matrices_singular(self, ks_params):
        rng = np.random.default_rng(1)
        for k in rng.uniform(-10, 10, 1000):
            for lam in ks_dispersion(ks_params, k):
                residual = min(
                    abs(np.linalg.det(ks_asymptotic(ks_params, lam, end) - 1j * k * np.eye(3)))
                    for end in ("plus", "minus")
                )
                assert residual <= 1e-10 * (1 + abs(lam)) ** 2 * (1 + abs(k))

    def test_morse_indices_right_of_spectrum(self, ks_params):
        rng = np.random.default_rng(9)
        for _ in range(50):
            lam = complex(rng.uniform(1.1, 20.0), rng.uniform(-20.0, 20.0))
            assert signature(ks_asymptotic(ks_params, lam, "plus")).n_minus == 1
            assert signature(ks_asymptotic(ks_params, lam, "minus")).n_plus == 2

    def test_problem_dispersion_agrees(self, ks_params):
        problem = KsProblem(ks_params)
        for k in (-3.0, 0.5, 7.0):
            found = problem.dispersion(k)
            for expected in ks_dispersion(ks_params, k):
                assert min(abs(f - expected) for f in found) < 1e-9 * (1 + abs(expected))


class TestEvans:
    def test_excluded_region_raises(self, ks_params):
        with pytest.raises(BranchPointError):
            ks_evans_e12q(ks_params, 0.1 + 1.0j)

    def test_exclusion_boundaries(self, ks_params):
        evaluator = KsEvans(ks_params)
        assert evaluator.excluded(0.1 + 1.0j)
        assert not evaluator.excluded(0.3 + 1.0j)
        assert not evaluator.excluded(0.01j)
        assert not evaluator.excluded(0.005 + 0.001j)
        assert not KsEvans(ks_params, exclusion=None).excluded(0.1 + 1.0j)

    def test_real_lambda_gives_real_value(self, ks_params):
        result = KsEvans(ks_params)(5.0)
        assert len(result.labels) == 2
        assert abs(result.value.imag) <= 1e-10 * abs(result.value)

    def test_conjugate_symmetry(self, ks_params):
        evaluator = KsEvans(ks_params)
        for lam in (1.0 + 2.0j, 4.0 + 0.5j, 0.5 + 5.0j):
            a = evaluator(lam).value
            b = evaluator(lam.conjugate()).value
            assert abs(b - a.conjugate()) <= 1e-8 * abs(a)

    @pytest.mark.slow
    def test_conjugate_symmetry_random(self, ks_params):
        evaluator = KsEvans(ks_params)
        rng = np.random.default_rng(11)
        for _ in range(50):
            lam = complex(rng.uniform(0.5, 5.0), rng.uniform(0.1, 5.0))
            a = evaluator(lam).value
            b = evaluator(lam.conjugate()).value
            assert abs(b - a.conjugate()) <= 1e-8 * abs(a)

    def test_stable_track_matches_linear_system(self, ks_params):
        evaluator = KsEvans(ks_params)
        rng = np.random.default_rng(5)
        for _ in range(20):
            lam = complex(rng.uniform(0.5, 5.0), rng.uniform(-5.0, 5.0))
            track = evaluator.track_stable(lam)
            z0 = track.z_start
            linear = integrate(
                lambda z, y, lam=lam: ks_matrix(ks_params, lam, z) @ y,
                np.asarray(track.homogeneous_at(z0), dtype=complex), z0, evaluator.matching_point,
            )
            for z, y in zip(linear.z, linear.y):
                assert line_distance(track.homogeneous_at(float(z)), y) < 1e-6

    def test_unstable_track_matches_linear_system(self, ks_params):
        evaluator = KsEvans(ks_params)
        rng = np.random.default_rng(6)
        for _ in range(20):
            lam = complex(rng.uniform(0.5, 5.0), rng.uniform(-5.0, 5.0))
            track, _ = evaluator.track_unstable(lam)
            z0 = track.z_start
            linear = integrate(
                lambda z, y, lam=lam: second_compound(ks_matrix(ks_params, lam, z)) @ y,
                np.asarray(track.homogeneous_at(z0), dtype=complex), z0, evaluator.matching_point,
            )
            for z, y in zip(linear.z, linear.y):
                assert line_distance(track.homogeneous_at(float(z)), y) < 1e-6

    def test_unstable_labels_follow_reference(self, ks_params):
        evaluator = KsEvans(ks_params)
        labels = evaluator.unstable_labels(3.0 + 1.0j)
        nudged = evaluator.unstable_labels(3.0 + 1.01j, reference=labels)
        assert all(abs(a - b) < 0.1 for a, b in zip(labels, nudged))

    @pytest.mark.slow
    def test_zero_of_multiplicity_two_at_origin(self, ks_params):
        contour = build_contour(ContourSpec(kind="circle", center=0j, radius=1e-2))
        report = winding(KsProblem(ks_params), KsEvans(ks_params), contour)
        assert report.winding == 2
        assert abs(report.total_argument - 4 * math.pi) <= 0.3

    @pytest.mark.slow
    def test_no_winding_on_shifted_half_disc(self, ks_params):
        contour = build_contour(ContourSpec(kind="shifted_half_disc", radius=4.0, shift=0.3))
        report = winding(KsProblem(ks_params), KsEvans(ks_params), contour)
        assert report.winding == 0

    @pytest.mark.slow
    def test_no_winding_on_right_half_annulus(self, ks_params):
        contour = build_contour(ContourSpec(kind="right_half_annulus", r_in=4.0, r_out=1e7))
        report = winding(KsProblem(ks_params), KsEvans(ks_params), contour, workers=4)
        assert report.winding == 0
