"""
StairKit Configuration
Loads environment variables and provides toolkit settings
"""

import logging
from typing import List

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Toolkit settings loaded from STAIRKIT_* environment variables"""

    model_config = SettingsConfigDict(
        env_prefix="STAIRKIT_",
        env_file=".env",
        case_sensitive=True,
        extra="ignore",
    )

    # Application
    APP_NAME: str = "StairKit"
    APP_VERSION: str = "2.0.0"
    ENVIRONMENT: str = "development"
    LOG: str = "INFO"

    # Detection / clustering
    CONF_THRESHOLD: float = 0.5
    ASSIGN_TOLERANCE_PX: float = 10.0
    DEDUPE_TOLERANCE_PX: float = 4.0

    # Geometry
    OMEGA_M: float = 0.05
    MAX_STEPS: int = 3

    # Simulation
    SEED: int = 0

    # CORS - production origins (comma-separated)
    ALLOWED_ORIGINS: str = ""

    @property
    def allowed_origins_list(self) -> List[str]:
        """Convert ALLOWED_ORIGINS string to list"""
        if not self.ALLOWED_ORIGINS:
            return []
        return [origin.strip() for origin in self.ALLOWED_ORIGINS.split(",") if origin.strip()]

    @property
    def is_production(self) -> bool:
        """Check if running in production environment"""
        return self.ENVIRONMENT.lower() in ["production", "prod"]

    @property
    def log_level(self) -> int:
        """Numeric logging level, INFO when STAIRKIT_LOG is not a level name"""
        level = logging.getLevelName(self.LOG.upper())
        return level if isinstance(level, int) else logging.INFO


# Global settings instance
settings = Settings()
