"""
Evans Command

Evaluates E along a list of λ, winds it around a contour, or exports the
tracked unstable/stable objects for one λ.
"""

import sys
from typing import Literal

import numpy as np

from cli.dependencies import ConfigError, get_evaluator, get_problem, get_wave
from config.logging_utils import log_step, log_success
from config.settings import settings
from models.run_config import RunConfig
from services.evans_service import build_contour, eigenvalue_report, evaluate_path, winding
from services.output_service import output_service


EvansView = Literal["eval", "wind", "track"]

# |E| below this is reported as an eigenvalue of the extended problem
_ROOT_THRESHOLD = 1e-4

_SAMPLE_COLUMNS = ["re_lambda", "im_lambda", "re_E", "im_E", "arg_E", "chart_unstable", "chart_stable", "switches"]


def _path(config: RunConfig) -> list[complex]:
    if config.lambdas:
        return [complex(lam) for lam in config.lambdas]
    if config.contour is not None:
        contour = build_contour(config.contour)
        n = settings.INITIAL_SAMPLES * len(contour.segments)
        return [contour.point(s) for s in np.linspace(0.0, len(contour.segments), n, endpoint=False)]
    raise ConfigError("evans eval needs `lambdas` or a `contour`")


def _eval(config: RunConfig) -> int:
    lambdas = _path(config)
    log_step(f"evaluating E at {len(lambdas)} points", 1, 2)
    evaluator = get_evaluator(config)
    results = evaluate_path(evaluator, lambdas)

    values = np.array([r.value for r in results])
    argument = np.unwrap(np.angle(values)) if len(values) else values.real
    rows = [
        (r.lam.real, r.lam.imag, r.value.real, r.value.imag, arg, r.residency[0], r.residency[1], r.switches)
        for r, arg in zip(results, argument)
    ]
    for r in results:
        if r.connection == "branch" or abs(r.value) <= _ROOT_THRESHOLD:
            print(
                f"λ={r.lam}: |E|={abs(r.value):.3e} ({r.connection}), eigenvalue of the extended problem",
                file=sys.stderr,
            )

    log_step("writing samples", 2, 2)
    output_service.write(config, _SAMPLE_COLUMNS, rows, report=results)
    return 0


def _wind(config: RunConfig, count_poles: bool = False) -> int:
    if config.contour is None:
        raise ConfigError("evans wind needs a `contour`")
    contour = build_contour(config.contour)
    wave = get_wave(config) if config.model == "fkpp" else None
    problem = get_problem(config, wave)
    evaluator = get_evaluator(config, wave)
    options = dict(
        theta_max=config.tolerances.theta_max,
        max_depth=config.tolerances.max_depth,
        workers=config.workers,
    )

    log_step(f"winding {config.model} Evans function around {config.contour.kind}", 1, 2)
    if count_poles:
        summary = eigenvalue_report(problem, evaluator, contour, **options)
        report = summary.report
    else:
        report = winding(problem, evaluator, contour, **options)
        summary = report

    if config.out is not None:
        rows = [
            (s.lam.real, s.lam.imag, s.value.real, s.value.imag, s.argument, s.residency[0], s.residency[1], s.switches)
            for s in report.samples
        ]
        output_service.write(config, _SAMPLE_COLUMNS, rows, report=summary)

    log_step("done", 2, 2)
    sys.stdout.write(f"{summary.zero_count if count_poles else report.winding}\n")
    log_success(f"winding {report.winding}, {len(report.samples)} samples, {len(report.warnings)} warnings", prefix="EVANS")
    return 0


def _track(config: RunConfig) -> int:
    if not config.lambdas:
        raise ConfigError("evans track needs one λ in `lambdas`")
    lam = complex(config.lambdas[0])
    evaluator = get_evaluator(config)

    if config.model == "fkpp":
        tracks = [evaluator.track_unstable(lam), evaluator.track_stable(lam)]
    else:
        unstable, _ = evaluator.track_unstable(lam)
        tracks = [unstable, evaluator.track_stable(lam)]

    rows = []
    for index, track in enumerate(tracks):
        nodes = sorted(track.nodes(), key=lambda node: node[0])
        for z, chart, point in nodes:
            coords = []
            for x in point:
                coords.extend((x.real, x.imag))
            rows.append((z, index, chart, *coords))

    width = len(tracks[0].final.homogeneous)
    columns = ["z", "object", "chart"]
    for i in range(width):
        columns.extend((f"re_h{i}", f"im_h{i}"))
    output_service.write(config, columns, rows)
    log_success(f"tracked objects at λ={lam}: {len(rows)} nodes", prefix="EVANS")
    return 0


def cmd_evans(config: RunConfig, view: EvansView, count_poles: bool = False) -> int:
    """Run one of the Evans views and return the exit code."""
    if view == "eval":
        return _eval(config)
    if view == "wind":
        return _wind(config, count_poles)
    return _track(config)
