import cmath
import math

import numpy as np
import pytest

from models.params import FkppParams
from services.evans_service import build_contour, winding
from models.contour import ContourSpec
from services.fkpp_service import (
    BranchPointError,
    FkppEvans,
    FkppProblem,
    ModelError,
    fkpp_absolute_spectrum,
    fkpp_asymptotic,
    fkpp_crossing_count,
    fkpp_dispersion,
    fkpp_evans_eta,
    fkpp_evans_tau,
    fkpp_matrix,
    fkpp_riccati_rhs,
    fkpp_spatial_eigs,
    fkpp_wave,
    fkpp_weighted_edge,
)
from services.numerics_service import integrate


class TestWave:
    """Shooting of the heteroclinic front."""

    def test_normalization_and_monotonicity(self, wave_c3):
        assert wave_c3.u(0.0) == pytest.approx(0.5, abs=1e-9)
        zs = np.linspace(-10.0, 10.0, 201)
        slopes = [wave_c3.profile.value(z)[1] for z in zs]
        assert max(slopes) < 0

    def test_tails_reach_end_states(self, wave_c3):
        left = wave_c3.profile.trajectory.y[0]
        right = wave_c3.profile.trajectory.y[-1]
        assert abs(left[0] - 1.0) < 1e-8
        assert max(abs(right[0]), abs(right[1])) < 1e-9

    def test_travelling_wave_residual(self, wave_c3, fkpp_c3):
        trajectory = wave_c3.profile.trajectory
        mids = 0.5 * (trajectory.z[:-1] + trajectory.z[1:])
        for z in mids[:: max(1, len(mids) // 200)]:
            u, v = wave_c3.profile.value(z)
            dv = wave_c3.profile.derivative(z)[1]
            residual = fkpp_c3.delta * dv + fkpp_c3.c * v + u * (1.0 - u)
            assert abs(residual) < 1e-5

    def test_slow_front_is_not_monotone(self):
        wave = fkpp_wave(FkppParams(delta=1.0, c=1.0))
        assert wave.u(0.0) == pytest.approx(0.5, abs=1e-9)
        assert min(wave.u(z) for z in np.linspace(0.0, 30.0, 301)) < 0


class TestLinearization:
    def test_matrix_limits(self, fkpp_c3, wave_c3):
        lam = 0.7 + 0.2j
        far_right = fkpp_matrix(fkpp_c3, wave_c3, wave_c3.profile.z_max + 1.0, lam)
        assert np.allclose(far_right, fkpp_asymptotic(fkpp_c3, lam, "plus"))

    def test_spatial_eigenvalues_solve_quadratic(self, fkpp_c3):
        for lam in (0.0, 2.0 + 1j, -5.0 + 0.1j):
            for end, shift in (("plus", -1.0), ("minus", 1.0)):
                eigs = fkpp_spatial_eigs(fkpp_c3, lam, end)
                for mu in (eigs.unstable, eigs.stable):
                    assert abs(fkpp_c3.delta * mu * mu + fkpp_c3.c * mu - (lam + shift)) < 1e-12

    def test_stable_fixed_point_forcing_is_lambda_independent(self, fkpp_c3):
        rng = np.random.default_rng(5)
        for u in (0.1, 0.5, 1.0):
            values = []
            for _ in range(10):
                radius = 100 * rng.random()
                lam = radius * cmath.exp(1j * rng.uniform(-math.pi, math.pi))
                mu = fkpp_spatial_eigs(fkpp_c3, lam, "plus").stable
                values.append(fkpp_riccati_rhs("eta", mu, u, lam, fkpp_c3))
            assert max(abs(a - b) for a in values for b in values) <= 1e-10
            assert values[0].real > 0
            assert values[0] == pytest.approx(2 * u / fkpp_c3.delta, abs=1e-10)

    def test_imaginary_part_sign(self, fkpp_c3):
        rng = np.random.default_rng(9)
        for _ in range(1000):
            lam = complex(rng.normal() * 10, rng.normal() * 10)
            eta = rng.normal() * 10
            u = rng.random()
            slope = fkpp_riccati_rhs("eta", eta, u, lam, fkpp_c3)
            assert np.sign(slope.imag) == np.sign(lam.imag)

    def test_tau_chart_is_eta_chart_inverted(self, fkpp_c3):
        eta, lam, u = 0.7 - 0.3j, 1.0 + 2.0j, 0.4
        tau = 1 / eta
        d_eta = fkpp_riccati_rhs("eta", eta, u, lam, fkpp_c3)
        d_tau = fkpp_riccati_rhs("tau", tau, u, lam, fkpp_c3)
        assert d_tau == pytest.approx(-d_eta / eta ** 2, rel=1e-12)


class TestSpectrumFacts:
    def test_dispersion_points_are_eigen(self, fkpp_c3):
        for k in np.linspace(-10, 10, 41):
            plus, minus = fkpp_dispersion(fkpp_c3, k)
            for lam, end in ((plus, "plus"), (minus, "minus")):
                A = fkpp_asymptotic(fkpp_c3, lam, end)
                residual = abs(np.linalg.det(A - 1j * k * np.eye(2)))
                assert residual <= 1e-12 * (1 + abs(lam))

    def test_problem_dispersion_matches(self, fkpp_c3):
        problem = FkppProblem(fkpp_c3)
        assert problem.dispersion(1.5) == pytest.approx(list(fkpp_dispersion(fkpp_c3, 1.5)))

    def test_absolute_rays(self, fkpp_c24):
        rays = fkpp_absolute_spectrum(fkpp_c24)
        assert rays.plus_endpoint == pytest.approx(-0.44)
        assert rays.minus_endpoint == pytest.approx(-2.44)

    def test_weighted_edge(self, fkpp_c3):
        assert not fkpp_weighted_edge(fkpp_c3, 0.0).admissible
        edge = fkpp_weighted_edge(fkpp_c3, -1.5)
        assert edge.edge == pytest.approx(-1.25)
        assert edge.admissible
        low = (-3 - math.sqrt(5)) / 2
        high = (-3 + math.sqrt(5)) / 2
        assert not fkpp_weighted_edge(fkpp_c3, low - 1e-6).admissible
        assert fkpp_weighted_edge(fkpp_c3, low + 1e-6).admissible
        assert fkpp_weighted_edge(fkpp_c3, high - 1e-6).admissible
        assert not fkpp_weighted_edge(fkpp_c3, high + 1e-6).admissible


class TestEvans:
    def test_no_connection_at_two(self, fkpp_c24, wave_c24):
        value, diagnostics = fkpp_evans_eta(fkpp_c24, wave_c24, 2.0)
        assert abs(value) > 0.1
        assert diagnostics.connection == "shooting"

    def test_real_axis_values_are_real(self, fkpp_c24, wave_c24):
        value, _ = fkpp_evans_eta(fkpp_c24, wave_c24, 3.0)
        assert abs(value.imag) <= 1e-10 * abs(value)

    def test_conjugate_symmetry(self, fkpp_c24, wave_c24):
        evaluator = FkppEvans(fkpp_c24, wave_c24)
        rng = np.random.default_rng(2)
        for _ in range(50):
            lam = complex(rng.uniform(0.1, 5.0), rng.uniform(0.1, 5.0))
            a = evaluator(lam).value
            b = evaluator(lam.conjugate()).value
            assert abs(b - a.conjugate()) <= 1e-8 * abs(a)

    def test_tau_chart_relation(self, fkpp_c24, wave_c24):
        lam = 1.0 + 1.0j
        evaluator = FkppEvans(fkpp_c24, wave_c24)
        eta_u = evaluator.track_unstable(lam).coords_at(0.0, 0)[0]
        eta_s = evaluator.track_stable(lam).coords_at(0.0, 0)[0]
        e_eta, _ = fkpp_evans_eta(fkpp_c24, wave_c24, lam)
        e_tau, _ = fkpp_evans_tau(fkpp_c24, wave_c24, lam)
        assert e_eta == pytest.approx(eta_s - eta_u, rel=1e-10)
        assert e_tau == pytest.approx(e_eta / (eta_u * eta_s), rel=1e-8)

    @pytest.mark.parametrize("side", ["unstable", "stable"])
    def test_riccati_track_matches_linear_system(self, fkpp_c24, wave_c24, side):
        evaluator = FkppEvans(fkpp_c24, wave_c24)
        rng = np.random.default_rng(4)
        for _ in range(20):
            lam = complex(rng.uniform(0.5, 5.0), rng.uniform(-5.0, 5.0))
            track = evaluator.track_unstable(lam) if side == "unstable" else evaluator.track_stable(lam)
            z0 = track.z_start
            start = track.homogeneous_at(z0)

            def field(z, y, lam=lam):
                return fkpp_matrix(fkpp_c24, wave_c24, z, lam) @ y

            linear = integrate(field, np.asarray(start, dtype=complex), z0, evaluator.matching_point)
            for z, y in zip(linear.z, linear.y):
                h = track.homogeneous_at(float(z))
                cross = abs(h[0] * y[1] - h[1] * y[0]) / (np.linalg.norm(h) * np.linalg.norm(y))
                assert cross < 1e-6

    def test_branch_point_rejected_by_default(self, fkpp_c24, wave_c24):
        lam = 1.0 - fkpp_c24.c ** 2 / (4 * fkpp_c24.delta)
        with pytest.raises(BranchPointError):
            fkpp_evans_eta(fkpp_c24, wave_c24, lam)

    def test_branch_point_zero(self, fkpp_c24, wave_c24):
        lam = 1.0 - fkpp_c24.c ** 2 / (4 * fkpp_c24.delta)
        value, diagnostics = fkpp_evans_eta(fkpp_c24, wave_c24, lam, at_branch_ok=True)
        assert abs(value) <= 1e-4
        assert diagnostics.connection == "branch"

    def test_branch_point_zero_ignores_tracks(self, monkeypatch, fkpp_c24, wave_c24):
        lam = 1.0 - fkpp_c24.c ** 2 / (4 * fkpp_c24.delta)
        evaluator = FkppEvans(fkpp_c24, wave_c24, at_branch_ok=True)

        def off_connection(*args, **kwargs):
            raise AssertionError("tracks are not consulted at the branch point")

        monkeypatch.setattr(evaluator, "track_unstable", off_connection)
        monkeypatch.setattr(evaluator, "track_stable", off_connection)
        result = evaluator.evaluate(lam)
        assert result.value == 0
        assert result.connection == "branch"

    @pytest.mark.parametrize("c", [2.0001, 3.0, 5.0])
    def test_branch_point_zero_for_every_speed(self, c):
        params = FkppParams(delta=1.0, c=c)
        lam = 1.0 - c ** 2 / 4.0
        result = FkppEvans(params, None, at_branch_ok=True).evaluate(lam)
        assert result.value == 0
        assert result.connection == "branch"

    def test_minus_end_branch_point_is_not_zeroed(self, fkpp_c24, wave_c24):
        lam = -1.0 - fkpp_c24.c ** 2 / (4 * fkpp_c24.delta)
        result = FkppEvans(fkpp_c24, wave_c24, at_branch_ok=True).evaluate(lam)
        assert result.connection == "shooting"

    def test_slow_front_real_axis_near_branch(self):
        params = FkppParams(delta=1.0, c=1.8)
        wave = fkpp_wave(params)
        branch = 1.0 - params.c ** 2 / (4 * params.delta)
        assert branch == pytest.approx(0.19)
        evaluator = FkppEvans(params, wave)
        assert evaluator.branch_points()[0] == pytest.approx(branch)
        assert fkpp_spatial_eigs(params, branch, "plus").branch

        with pytest.raises(BranchPointError):
            fkpp_evans_eta(params, wave, branch)
        value, result = fkpp_evans_eta(params, wave, branch, at_branch_ok=True)
        assert value == 0
        assert result.connection == "branch"

        above = [evaluator(branch + step).value for step in (0.005, 0.01, 0.05, 0.3)]
        for e in above:
            assert abs(e.imag) <= 1e-10 * abs(e)
        # the one-sided limit is finite and nonzero, so the zero at λ̃ is isolated
        assert abs(above[0] - above[1]) < 0.05
        assert abs(above[0]) > 1.0

    @pytest.mark.slow
    def test_no_winding_on_right_half_disc(self, fkpp_c24, wave_c24):
        contour = build_contour(ContourSpec(kind="right_half_disc", radius=1e6, indent=0.5))
        evaluator = FkppEvans(fkpp_c24, wave_c24)
        report = winding(FkppProblem(fkpp_c24, wave_c24), evaluator, contour)
        assert report.winding == 0


class TestCrossings:
    @pytest.mark.parametrize("lam", [0.0, 0.5, 1.0, 5.0, 25.0])
    def test_no_crossings_for_stable_front(self, fkpp_c3, wave_c3, lam):
        result = fkpp_crossing_count(fkpp_c3, wave_c3, lam)
        assert result.count == 0

    def test_slow_speed_rejected(self):
        params = FkppParams(delta=1.0, c=1.8)
        with pytest.raises(ModelError):
            fkpp_crossing_count(params, None, 0.0)

    def test_negative_lambda_rejected(self, fkpp_c3, wave_c3):
        with pytest.raises(ModelError):
            fkpp_crossing_count(fkpp_c3, wave_c3, -1.0)
