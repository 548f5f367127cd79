"""
Reproduction script for the Evans-function toolkit.
Runs the full set of stability computations for both models, including the
long contour windings that the pytest suite skips by default.
"""

import math
import time

import numpy as np


def _banner(title: str) -> None:
    print("\n" + "=" * 60)
    print(title)
    print("=" * 60)


def test_ks_wave():
    """Closed-form K-S wave at the origin and its truncation length."""
    _banner("Test 1: Keller-Segel travelling wave")

    from models.params import KsParams
    from services.ks_service import ks_truncation, ks_wave_eval

    params = KsParams()
    point = ks_wave_eval(params, 0.0)
    span = ks_truncation(params)

    print(f"\nu(0) = {point.u:.15f}  (expected 0.8)")
    print(f"w(0) = {point.w:.15f}  (expected 0.64)")
    print(f"truncation L = {span:.4f}")

    return abs(point.u - 0.8) < 1e-14 and abs(point.w - 0.64) < 1e-14


def test_fkpp_crossings():
    """No crossings for the c = 3 front at any real λ ≥ 0."""
    _banner("Test 2: F-KPP crossing counts (δ=1, c=3)")

    from models.params import FkppParams
    from services.fkpp_service import fkpp_crossing_count, fkpp_wave

    params = FkppParams(delta=1.0, c=3.0)
    wave = fkpp_wave(params)
    ok = True
    for lam in (0.0, 0.5, 1.0, 5.0, 25.0):
        result = fkpp_crossing_count(params, wave, lam)
        flag = " (degenerate)" if result.degenerate else ""
        print(f"   λ = {lam:5.1f}: N = {result.count}{flag}")
        ok = ok and result.count == 0
    return ok


def test_fkpp_weights():
    """Admissible weight interval for c = 3."""
    _banner("Test 3: F-KPP exponential weights (δ=1, c=3)")

    from models.params import FkppParams
    from services.fkpp_service import fkpp_weighted_edge

    params = FkppParams(delta=1.0, c=3.0)
    low = (-3 - math.sqrt(5)) / 2
    high = (-3 + math.sqrt(5)) / 2
    admissible = [nu for nu in np.arange(-3.0, 0.5, 0.05) if fkpp_weighted_edge(params, float(nu)).admissible]

    print(f"\nadmissible ν on the sweep: [{min(admissible):.2f}, {max(admissible):.2f}]")
    print(f"expected interval: ({low:.4f}, {high:.4f})")
    print(f"edge at ν = -1.5: {fkpp_weighted_edge(params, -1.5).edge}")

    return min(admissible) > low and max(admissible) < high and not fkpp_weighted_edge(params, 0.0).admissible


def test_fkpp_evans_values():
    """E at λ = 2 and the zero at the branch point (c = 2.4)."""
    _banner("Test 4: F-KPP Evans values (δ=1, c=2.4)")

    from models.params import FkppParams
    from services.fkpp_service import fkpp_evans_eta, fkpp_evans_tau, fkpp_wave

    params = FkppParams(delta=1.0, c=2.4)
    wave = fkpp_wave(params)

    e_eta, diagnostics = fkpp_evans_eta(params, wave, 2.0)
    e_tau, _ = fkpp_evans_tau(params, wave, 2.0)
    print(f"\nE_η(2) = {e_eta:.10g}  charts {diagnostics.residency}, {diagnostics.switches} switches")
    print(f"E_τ(2) = {e_tau:.10g}")

    branch = 1.0 - params.c ** 2 / (4 * params.delta)
    value, result = fkpp_evans_eta(params, wave, branch, at_branch_ok=True)
    print(f"E_η({branch:.2f}) = {value}  connection: {result.connection}")

    return abs(e_eta) > 0.1 and abs(value) <= 1e-4 and result.connection == "branch"


def test_fkpp_no_winding():
    """Winding 0 on the indented right half-disc of radius 10⁶."""
    _banner("Test 5: F-KPP winding on the right half-disc (c=2.4)")

    from cli.dependencies import get_evaluator, get_problem, get_wave, resolve_config
    from services.evans_service import build_contour, winding

    config = resolve_config(preset="fkpp-no-winding")
    wave = get_wave(config)
    report = winding(get_problem(config, wave), get_evaluator(config, wave), build_contour(config.contour))

    print(f"\nwinding = {report.winding} from {len(report.samples)} samples ({report.refinements} refinements)")
    for warning in report.warnings:
        print(f"   warning: {warning}")
    return report.winding == 0


def test_ks_windings():
    """Multiplicity-two zero at the origin, none on the outer contours."""
    _banner("Test 6: K-S windings")

    from cli.dependencies import get_evaluator, get_problem, resolve_config
    from services.evans_service import build_contour, winding

    expected = {"ks-origin": 2, "ks-shifted-half-disc": 0, "ks-annulus": 0}
    ok = True
    for preset, target in expected.items():
        config = resolve_config(preset=preset)
        started = time.time()
        report = winding(
            get_problem(config),
            get_evaluator(config),
            build_contour(config.contour),
            workers=4 if preset == "ks-annulus" else 1,
        )
        elapsed = time.time() - started
        print(f"   {preset:22s} winding = {report.winding} (expected {target}), "
              f"{len(report.samples)} samples, {elapsed:.1f}s")
        ok = ok and report.winding == target
    return ok


def test_ks_weights():
    """No exponential weight moves the K-S continuous spectrum into Re λ < 0."""
    _banner("Test 7: K-S weighted spectrum sweep")

    from models.params import KsParams
    from services.ks_service import KsProblem
    from services.spectrum_service import weighted_dispersion_max

    problem = KsProblem(KsParams())
    ks = np.linspace(-50, 50, 2001)
    edges = [weighted_dispersion_max(problem, float(nu), ks) for nu in np.arange(-10.0, 10.0 + 1e-9, 0.05)]

    print(f"\nsmallest weighted edge over ν ∈ [-10, 10]: {min(edges):.6g}")
    return min(edges) > 0


def main():
    """Main function to run all scenarios."""
    print("=" * 60)
    print("Evans-function toolkit reproduction")
    print("Riccati tracking for F-KPP and Keller-Segel fronts")
    print("=" * 60)

    try:
        from config.settings import settings
        print(f"✓ {settings.APP_NAME} {settings.APP_VERSION} settings loaded")
    except Exception as e:
        print(f"✗ Initialization error: {e}")
        return

    tests = [
        ("K-S Wave", test_ks_wave),
        ("F-KPP Crossings", test_fkpp_crossings),
        ("F-KPP Weights", test_fkpp_weights),
        ("F-KPP Evans Values", test_fkpp_evans_values),
        ("F-KPP Winding", test_fkpp_no_winding),
        ("K-S Windings", test_ks_windings),
        ("K-S Weights", test_ks_weights),
    ]

    passed = 0
    failed = 0

    for test_name, test_func in tests:
        try:
            if test_func():
                passed += 1
                print(f"\n✓ {test_name} - PASSED")
            else:
                failed += 1
                print(f"\n✗ {test_name} - FAILED")
        except Exception as e:
            failed += 1
            print(f"\n✗ {test_name} - FAILED: {e}")
            import traceback
            traceback.print_exc()

    print("\n" + "=" * 60)
    print(f"Test Results: {passed} passed, {failed} failed")
    print("=" * 60)


if __name__ == "__main__":
    main()
