from functools import lru_cache
from pathlib import Path
from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict

from ..utils.exceptions import ConfigurationError


class ForgeSettings(BaseSettings):
    """Toolkit settings loaded from ``FORGE_*`` environment variables or ``.env``."""

    model_config = SettingsConfigDict(
        env_prefix="FORGE_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Operational settings
    LOG_LEVEL: str = "WARNING"
    LOG_FILE: Optional[Path] = None
    JSON_LOGS: bool = False

    # Paths
    OUTPUT_DIR: Path = Path("output")

    # Reproducibility
    DEFAULT_SEED: int = 0
    SIGNATURE_INCEPTION: int = 1704067200   # 2024-01-01T00:00:00Z
    SIGNATURE_EXPIRATION: int = 2019686400  # 2034-01-01T00:00:00Z

    # Scanner
    SCAN_RATE_LIMIT: float = 50.0
    SCAN_TIMEOUT: float = 3.0
    SCAN_RETRIES: int = 2
    SCAN_CONCURRENCY: int = 8
    PER_NAMESERVER_CONCURRENCY: int = 2
    SCAN_NAMESERVER: Optional[str] = None

    def ensure_directories(self, output_dir: Optional[Path] = None) -> Path:
        """Create the artifact directory, ``OUTPUT_DIR`` unless overridden.

        Raises:
            ConfigurationError: the directory cannot be created.
        """
        target = self.OUTPUT_DIR if output_dir is None else Path(output_dir)
        try:
            target.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigurationError(f"Cannot create output directory {target}: {exc}", config_key="OUTPUT_DIR") from exc
        return target


@lru_cache()
def get_settings() -> ForgeSettings:
    return ForgeSettings()
