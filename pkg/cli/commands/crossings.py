"""
Crossings Command

Tabulates F-KPP crossing counts N(λ) for real λ ≥ 0 and the eigenvalue
bounds |N_i − N_j| between pairs of them.
"""

import itertools

from cli.dependencies import ConfigError, get_wave
from config.logging_utils import log_progress, log_success
from models.run_config import RunConfig
from services.fkpp_service import ModelError, fkpp_crossing_count
from services.output_service import output_service


def cmd_crossings(config: RunConfig) -> int:
    """Write (λ, N, degenerate) rows; the JSON form adds the pairwise differences."""
    if config.model != "fkpp":
        raise ConfigError("crossings is only defined for the fkpp model")
    if not config.lambdas:
        raise ConfigError("crossings needs `lambdas`")
    if not config.fkpp.monotone:
        raise ModelError(f"crossing counts need c ≥ 2√δ (c={config.fkpp.c}, δ={config.fkpp.delta})")

    wave = get_wave(config)
    counts = []
    for i, lam in enumerate(config.lambdas):
        counts.append(fkpp_crossing_count(config.fkpp, wave, lam))
        log_progress(i + 1, len(config.lambdas), f"λ={lam}", prefix="WAVE")

    rows = [(c.lam, c.count, int(c.degenerate)) for c in counts]
    pairwise = [
        {"lam_i": a.lam, "lam_j": b.lam, "eigenvalues": abs(a.count - b.count)}
        for a, b in itertools.combinations(counts, 2)
    ]
    report = {
        "counts": [{"lam": c.lam, "count": c.count, "degenerate": c.degenerate} for c in counts],
        "pairwise": pairwise,
    }
    output_service.write(config, ["lambda", "count", "degenerate"], rows, report=report)

    flagged = sum(1 for c in counts if c.degenerate)
    most = max((p["eigenvalues"] for p in pairwise), default=0)
    log_success(f"{len(counts)} counts, {flagged} degenerate, largest |N_i − N_j| = {most}", prefix="WAVE")
    return 0
