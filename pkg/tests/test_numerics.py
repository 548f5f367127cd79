import math

import numpy as np
import pytest

from services.numerics_service import (
    BlowupEvent,
    DegreeError,
    StiffnessError,
    eigen_decompose,
    integrate,
    polynomial_roots,
    second_compound,
)
from services.fkpp_service import fkpp_asymptotic
from services.ks_service import ks_asymptotic


def _sorted(values):
    return sorted(values, key=lambda m: (-m.real, -m.imag))


def test_quadratic_roots():
    roots = _sorted(polynomial_roots([1, 0, -1]))
    assert roots[0] == pytest.approx(1.0)
    assert roots[1] == pytest.approx(-1.0)


def test_cubic_roots_factorable():
    roots = _sorted(polynomial_roots([1, -6, 11, -6]))
    for root, expected in zip(roots, [3.0, 2.0, 1.0]):
        assert abs(root - expected) < 1e-10


def test_root_residuals_after_polish():
    rng = np.random.default_rng(7)
    for _ in range(50):
        coeffs = rng.normal(size=4) + 1j * rng.normal(size=4)
        for root in polynomial_roots(coeffs):
            residual = abs(np.polyval(coeffs, root))
            assert residual <= 1e-10 * max(1.0, np.abs(coeffs).max() * max(1.0, abs(root)) ** 3)


def test_leading_zero_raises():
    with pytest.raises(DegreeError):
        polynomial_roots([0, 1, 2])


def test_eigen_decompose_diagonal():
    pairs = eigen_decompose(np.diag([2.0, -1.0, 0.0]))
    assert [m.real for m in pairs.eigenvalues] == pytest.approx([2.0, 0.0, -1.0])
    for mu, v in zip(pairs.eigenvalues, pairs.eigenvectors):
        assert abs(np.abs(v).max() - 1.0) < 1e-12
        assert np.linalg.norm(np.diag([2.0, -1.0, 0.0]) @ v - mu * v) < 1e-12
    assert not pairs.defect_flag


def test_fkpp_plus_eigenvalues_at_zero(fkpp_c3):
    pairs = eigen_decompose(fkpp_asymptotic(fkpp_c3, 0.0, "plus"))
    expected = [(-3 + math.sqrt(5)) / 2, (-3 - math.sqrt(5)) / 2]
    assert [m.real for m in pairs.eigenvalues] == pytest.approx(expected, abs=1e-12)


def test_ks_plus_eigenvalues_block_triangular(ks_params):
    A = ks_asymptotic(ks_params, 1.0, "plus")
    pairs = eigen_decompose(A)
    expected = [0.5, math.sqrt(2) - 1, -1 - math.sqrt(2)]
    assert [m.real for m in pairs.eigenvalues] == pytest.approx(expected, abs=1e-12)
    for mu, v in zip(pairs.eigenvalues, pairs.eigenvectors):
        assert np.linalg.norm(A @ v - mu * v) <= 1e-10 * np.linalg.norm(A)


def test_defect_flag_on_jordan_block():
    pairs = eigen_decompose(np.array([[1.0, 1.0], [0.0, 1.0]]))
    assert pairs.defect_flag


def test_exponential_decay():
    trajectory = integrate(lambda z, y: -y, [1.0], 0.0, 1.0)
    assert abs(trajectory.y_end[0] - math.exp(-1)) < 1e-9
    assert trajectory.z_end == 1.0


def test_tanh_riccati():
    trajectory = integrate(lambda z, y: -(y - 1.0) * (y + 1.0), [0.0], 0.0, 3.0)
    for z in (0.3, 1.1, 2.7):
        assert abs(trajectory.value(z)[0] - math.tanh(z)) < 1e-7


def test_tolerance_reduces_error():
    def error(rel_tol):
        trajectory = integrate(lambda z, y: 1.0 - y * y, [0.0], 0.0, 3.0, rel_tol=rel_tol, abs_tol=1e-16)
        return abs(trajectory.y_end[0] - math.tanh(3.0))

    assert error(1e-10) < error(1e-6)


def test_backward_integration():
    trajectory = integrate(lambda z, y: y, [math.e], 1.0, 0.0)
    assert trajectory.direction == -1
    assert np.all(np.diff(trajectory.z) < 0)
    assert abs(trajectory.y_end[0] - 1.0) < 1e-9


def test_backward_then_forward_returns():
    field = lambda z, y: np.array([y[1], -y[0] + 0.1j * y[1]])
    forward = integrate(field, np.array([1.0 + 0j, 0.5j]), 0.0, 2.0)
    back = integrate(field, forward.y_end, 2.0, 0.0)
    assert np.linalg.norm(back.y_end - np.array([1.0, 0.5j])) < 1e-8


def test_hermite_reproduces_nodes():
    trajectory = integrate(lambda z, y: np.cos(z) * y, [1.0], 0.0, 4.0)
    for z, y, dy in zip(trajectory.z, trajectory.y, trajectory.dy):
        assert np.allclose(trajectory.value(z), y, atol=1e-14)
        assert np.allclose(trajectory.derivative(z), dy, atol=1e-12)


def test_stop_predicate_ends_early():
    trajectory = integrate(lambda z, y: y, [1.0], 0.0, 10.0, stop=lambda z, y: y[0] > 5.0)
    assert trajectory.stopped
    assert trajectory.z_end < 10.0


def test_blowup_is_reported():
    with pytest.raises((BlowupEvent, StiffnessError)) as info:
        integrate(lambda z, y: y * y, [1.0], 0.0, 2.0)
    assert info.value.partial is not None
    assert info.value.partial.z_end < 1.0 + 1e-6


def test_second_compound_drives_plucker():
    rng = np.random.default_rng(3)
    A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    v = rng.normal(size=3) + 1j * rng.normal(size=3)
    w = rng.normal(size=3) + 1j * rng.normal(size=3)

    def wedge(a, b):
        return np.array([a[0] * b[1] - a[1] * b[0], a[0] * b[2] - a[2] * b[0], a[1] * b[2] - a[2] * b[1]])

    derivative = wedge(A @ v, w) + wedge(v, A @ w)
    assert np.allclose(second_compound(A) @ wedge(v, w), derivative, atol=1e-12)
