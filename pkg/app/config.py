"""Configuration management for svddcap."""

import os
from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings


def default_threads() -> int:
    """Worker threads when SVDDCAP_THREADS is unset."""
    return max(1, os.cpu_count() or 1)


class Settings(BaseSettings):
    """Application settings.

    Every field can be overridden with an ``SVDDCAP_``-prefixed environment variable,
    e.g. ``SVDDCAP_THREADS=4``.
    """

    # Service Configuration
    service_name: str = "svddcap"
    environment: str = "development"
    debug: bool = False
    log_level: str = "INFO"

    # API Configuration
    api_prefix: str = "/api/v1"
    host: str = "0.0.0.0"
    port: int = 8001

    # Parallelism (caps worker count, never changes results)
    threads: int = Field(default_factory=default_threads, ge=1)

    # Dual solver
    kkt_tolerance: float = 1e-6
    max_iterations_cap: int = 10_000_000
    default_outlier_fraction: float = 1e-6

    # Monte Carlo
    default_n_es: int = 1_000_000
    default_seed: int = 20170101
    mc_block_size: int = 65536  # rows per random-stream block
    score_chunk_rows: int = 4096

    # Plotting
    grid_resolution: int = 200

    # Model store (HTTP service)
    model_store_path: str = "/tmp/svddcap/models"

    # Monitoring
    enable_metrics: bool = True

    class Config:
        """Pydantic config."""

        env_prefix = "SVDDCAP_"
        env_file = ".env"
        env_file_encoding = "utf-8"
        case_sensitive = False


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


# Create a global settings instance
settings = get_settings()
