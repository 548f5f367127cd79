"""Settings configuration using pydantic-settings for numerical defaults."""

import math

from pydantic_settings import BaseSettings, SettingsConfigDict
from dotenv import load_dotenv

load_dotenv(override=True)


class Settings(BaseSettings):
    """Numerical defaults, overridable from the environment or a .env file."""

    APP_NAME: str = "evans-riccati"
    APP_VERSION: str = "1.0.0"
    DEBUG: bool = False

    RTOL: float = 1e-10
    ATOL: float = 1e-12

    SWITCH_THRESHOLD: float = 10.0
    HYPERBOLICITY_TOL: float = 1e-9

    THETA_MAX: float = math.pi / 3
    MAX_DEPTH: int = 24
    ZERO_RELATIVE_TOL: float = 1e-12
    CLOSURE_TOL: float = 0.05
    BRANCH_DISTANCE_TOL: float = 1e-3
    INITIAL_SAMPLES: int = 64
    WORKERS: int = 1

    WAVE_TAIL_TOL: float = 1e-10
    WAVE_SHOOTING_EPSILON: float = 1e-8
    WAVE_Z_BUDGET: float = 1000.0
    WAVE_MAX_STEP: float = 0.05
    FKPP_MAX_SPAN: float = 60.0
    KS_TRUNCATION_DECADES: float = 14.0
    SHOOTING_DECAY: float = 40.0
    MATCHING_POINT: float = 0.0

    ABSOLUTE_ACCEPT_TOL: float = 1e-5
    OUTPUT_GRID_POINTS: int = 401

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore"
    )


settings = Settings()
