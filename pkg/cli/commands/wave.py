"""
Wave Command

Emits the travelling-wave profile on a uniform grid over [−L, L].
"""

import numpy as np

from cli.dependencies import get_wave
from config.logging_utils import log_step, log_success
from models.run_config import RunConfig
from services.ks_service import ks_truncation, ks_wave_eval
from services.output_service import output_service


def cmd_wave(config: RunConfig) -> int:
    """Write z, u, u′ (F-KPP) or z, u, w, u′, w′ (K-S)."""
    n = config.output_points
    if config.model == "fkpp":
        log_step("shooting F-KPP front", 1, 2)
        wave = get_wave(config)
        span = min(wave.left_span, wave.right_span)
        zs = np.linspace(-span, span, n)
        rows = [(z, *wave.profile.value(z)) for z in zs]
        columns = ["z", "u", "du"]
    else:
        log_step("evaluating closed-form K-S wave", 1, 2)
        span = ks_truncation(config.ks)
        zs = np.linspace(-span, span, n)
        rows = []
        for z in zs:
            point = ks_wave_eval(config.ks, float(z))
            rows.append((z, point.u, point.w, point.du, point.dw))
        columns = ["z", "u", "w", "du", "dw"]

    log_step("writing profile", 2, 2)
    output_service.write(config, columns, rows)
    log_success(f"{config.model} profile on [{-span:.3f}, {span:.3f}] ({n} points)", prefix="CLI")
    return 0
