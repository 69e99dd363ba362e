"""Toolkit configuration settings."""
from pydantic_settings import BaseSettings
from typing import Optional


class Settings(BaseSettings):
    """Toolkit settings loaded from environment variables."""

    # Engine
    default_strategy: str = "compilation"  # convention, interpretation or compilation
    propagation_round_limit: int = 10000  # batches per external mutation
    capture_interpretation_locals: bool = True  # expand `aexpr` call sites with a locals record

    # Constraints
    constraint_tolerance: float = 1e-9

    # Layers
    implicit_layer_mode: str = "reactive"  # reactive (trigger based) or polling (re-check per call)

    # Benchmark protocol
    bench_iterations: int = 100
    bench_measured_iterations: int = 30  # median over the final N iterations
    bench_seed: int = 20170403

    # Benchmark scenario sizes
    bench_construction_count: int = 1000
    bench_update_count: int = 100000
    bench_sort_size: int = 10000
    bench_scaling_size: int = 1000
    bench_scaling_callbacks: int = 10

    # Application
    environment: str = "development"
    log_level: str = "WARNING"
    log_json: bool = False
    log_file: Optional[str] = None

    class Config:
        env_file = ".env"
        case_sensitive = False
        extra = "ignore"  # Ignore extra env vars not in this class


# Global settings instance
settings = Settings()
