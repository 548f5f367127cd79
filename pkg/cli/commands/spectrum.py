"""
Spectrum Command

Continuous-spectrum curves, absolute-spectrum boundary points, region maps
and weight sweeps.
"""

from typing import Literal

import numpy as np

from cli.dependencies import get_problem
from config.logging_utils import log_success
from models.run_config import RunConfig
from services.fkpp_service import fkpp_weighted_edge
from services.output_service import output_service
from services.spectrum_service import absolute_spectrum_scan, region_map, weighted_dispersion_max


SpectrumView = Literal["continuous", "absolute", "regions", "weighted"]

_END_ID = {"plus": 0, "minus": 1}


def _continuous(config: RunConfig):
    problem = get_problem(config)
    rows = []
    for k in np.linspace(-config.k_max, config.k_max, config.output_points):
        for branch, lam in enumerate(problem.dispersion(float(k))):
            rows.append((k, lam.real, lam.imag, branch))
    return ["k", "re_lambda", "im_lambda", "branch"], rows


def _absolute(config: RunConfig):
    problem = get_problem(config)
    points = absolute_spectrum_scan(problem, config.window.bounds, config.window.grid)
    rows = [(p.re, p.im, _END_ID[p.end], p.gap) for p in points]
    return ["re_lambda", "im_lambda", "end", "gap"], rows


def _regions(config: RunConfig):
    problem = get_problem(config)
    regions = region_map(problem, config.window.bounds, config.window.grid, config.tolerances.hyperbolicity_tol)
    rows = [
        (x, y, regions.labels[i, j])
        for i, y in enumerate(regions.im)
        for j, x in enumerate(regions.re)
    ]
    return ["re_lambda", "im_lambda", "region"], rows


def _weighted(config: RunConfig):
    sweep = config.weights
    nus = np.arange(sweep.nu_min, sweep.nu_max + 0.5 * sweep.nu_step, sweep.nu_step)
    rows = []
    if config.model == "fkpp":
        for nu in nus:
            edge = fkpp_weighted_edge(config.fkpp, float(nu))
            rows.append((nu, edge.edge, int(edge.admissible)))
    else:
        problem = get_problem(config)
        ks = np.linspace(-sweep.k_max, sweep.k_max, sweep.k_points)
        for nu in nus:
            edge = weighted_dispersion_max(problem, float(nu), ks)
            rows.append((nu, edge, int(edge < 0)))
    admissible = sum(row[2] for row in rows)
    log_success(f"{admissible} of {len(rows)} weights admissible", prefix="SPECTRUM")
    return ["nu", "edge", "admissible"], rows


_VIEWS = {
    "continuous": _continuous,
    "absolute": _absolute,
    "regions": _regions,
    "weighted": _weighted,
}


def cmd_spectrum(config: RunConfig, view: SpectrumView) -> int:
    """Write the requested spectral data set."""
    columns, rows = _VIEWS[view](config)
    output_service.write(config, columns, rows)
    log_success(f"spectrum {view}: {len(rows)} rows", prefix="SPECTRUM")
    return 0
