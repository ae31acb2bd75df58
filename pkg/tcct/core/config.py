"""Application configuration loaded from environment variables."""

from typing import List

from pydantic_settings import BaseSettings, SettingsConfigDict


def _parse_floats(raw: str) -> List[float]:
    """Split a comma-separated setting into floats, skipping blanks."""
    return [float(v) for v in raw.split(",") if v.strip()]


class Settings(BaseSettings):
    """Pydantic settings for reproducibility, experiment defaults, and test tuning.

    Every value has a default and can be overridden from the environment or a
    .env file using the TCCT_ prefix (e.g. TCCT_DEFAULT_SEED=7).
    """
    # --- Project Metadata ---
    PROJECT_NAME: str = "tcct"
    VERSION: str = "1.0.0"  # Build identifier embedded in every report

    # --- Reproducibility ---
    DEFAULT_SEED: int = 20220509

    # --- Experiment Defaults ---
    N_TESTS: int = 100
    SAMPLE_SIZE: int = 100
    EFFECT_SIZE: float = 0.25
    RHO_GRID: str = "0,0.3,0.6,0.9"
    DESK_ALPHA_LEVELS: str = "0.05,0.01"
    FULL_ALPHA_LEVELS: str = "0.05,0.01,0.001,0.0001"
    DESK_REPLICATIONS: int = 2000
    FULL_TYPE_I_REPLICATIONS: int = 100_000
    FULL_POWER_REPLICATIONS: int = 10_000
    FIGURE_LEVEL: float = 0.05
    C_GRID: str = "0,0.05,0.1,0.15,0.2,0.25,0.3,0.35,0.4,0.45"
    SHAPE_GRID: str = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0,1.1,1.2,1.3,1.4,1.5,1.6,1.7,1.8,1.9,2.0"

    # --- Elementary Tests ---
    LOGIT_MAX_ITER: int = 50
    LOGIT_TOLERANCE: float = 1e-8  # Max absolute score component at convergence
    SEPARATION_BOUND: float = 15.0
    MIN_NONZERO: int = 3  # Smallest part-2 subsample with a slope t-test

    # --- Execution ---
    WORKERS: int = 1
    BLOCK_SIZE: int = 1000  # Replications per unit of work

    # --- Application Settings ---
    LOG_LEVEL: str = "INFO"

    model_config = SettingsConfigDict(env_file=".env", env_prefix="TCCT_", case_sensitive=True)

    @property
    def rho_grid(self) -> List[float]:
        return _parse_floats(self.RHO_GRID)

    @property
    def desk_alpha_levels(self) -> List[float]:
        return _parse_floats(self.DESK_ALPHA_LEVELS)

    @property
    def full_alpha_levels(self) -> List[float]:
        return _parse_floats(self.FULL_ALPHA_LEVELS)

    @property
    def c_grid(self) -> List[float]:
        return _parse_floats(self.C_GRID)

    @property
    def shape_grid(self) -> List[float]:
        return _parse_floats(self.SHAPE_GRID)

settings = Settings()
