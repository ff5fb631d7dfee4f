"""
Application configuration settings.
"""

import os
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Application settings"""

    # API configuration
    API_PREFIX: str = "/api/v1"
    APP_NAME: str = "leakguard - leakage-robust persuasion toolkit"
    TOOL_VERSION: str = "0.1.0"

    # Logging
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")

    # Parallelism (1 = serial)
    WORKER_COUNT: int = int(os.getenv("WORKER_COUNT", "1"))

    # Size caps
    TABLE_MAX_N: int = 12  # LP and explicit-table materialization
    CHECKER_MAX_N: int = 14
    CHECKER_MAX_K: int = 3  # enforced only above n = 10
    PROFILE_CAP: int = 2 ** 16  # product of alphabet sizes
    EXACT_PATTERN_CAP: int = 10 ** 6
    BRUTEFORCE_INFOSET_CAP: int = 10 ** 6
    BRUTEFORCE_PROFILE_CAP: int = 10 ** 8

    # Monte Carlo
    DEFAULT_SEED: int = int(os.getenv("DEFAULT_SEED", "0"))
    DEFAULT_MC_SAMPLES: int = 100_000

    # Human-readable output
    DECIMAL_DIGITS: int = 6

    class Config:
        """Pydantic config"""
        env_prefix = ""
        case_sensitive = True


# Create global settings instance
settings = Settings()
