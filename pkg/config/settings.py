"""
Application configuration settings for the rainfall forecasting benchmark.
"""

import os
import json
from functools import lru_cache
from typing import List, Optional

from pydantic_settings import BaseSettings
from pydantic import ConfigDict
from dotenv import load_dotenv

# Load environment variables from .env file if it exists
load_dotenv()


class Settings(BaseSettings):
    """Application configuration settings loaded from environment variables."""

    # --- Application Core Settings ---
    APP_ID: str = os.getenv("APP_ID", "rainfall-forecast-bench")
    APP_ENV: str = os.getenv("APP_ENV", "development")
    PROJECT_NAME: str = os.getenv("PROJECT_NAME", "Rainfall Forecast Bench")
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")

    # --- MARS Settings ---
    MARS_MAX_BASIS_FUNCTIONS: int = int(os.getenv("MARS_MAX_BASIS_FUNCTIONS", "15"))
    MARS_MIN_SPAN: int = int(os.getenv("MARS_MIN_SPAN", "1"))
    MARS_MAX_DEGREE: int = int(os.getenv("MARS_MAX_DEGREE", "1"))
    # None picks 2 for additive models and 3 when interactions are enabled
    MARS_GCV_PENALTY: Optional[float] = (
        float(os.environ["MARS_GCV_PENALTY"]) if os.getenv("MARS_GCV_PENALTY") else None
    )
    MARS_IMPROVEMENT_TOLERANCE: float = float(
        os.getenv("MARS_IMPROVEMENT_TOLERANCE", "1e-12")
    )
    MARS_EXHAUSTIVE_PRUNE_LIMIT: int = int(os.getenv("MARS_EXHAUSTIVE_PRUNE_LIMIT", "10"))

    # --- Neural Network Settings ---
    ANN_HIDDEN_SIZES: List[int] = json.loads(os.getenv("ANN_HIDDEN_SIZES", "[12, 12]"))
    ANN_EPOCHS: int = int(os.getenv("ANN_EPOCHS", "600"))
    ANN_TRAINER: str = os.getenv("ANN_TRAINER", "scg")
    ANN_LEARNING_RATE: float = float(os.getenv("ANN_LEARNING_RATE", "0.05"))
    ANN_MOMENTUM: float = float(os.getenv("ANN_MOMENTUM", "0.9"))
    ANN_GRADIENT_FLOOR: float = float(os.getenv("ANN_GRADIENT_FLOOR", "1e-8"))
    ANN_MSE_FLOOR: float = float(os.getenv("ANN_MSE_FLOOR", "1e-12"))
    ANN_LOG_EVERY: int = int(os.getenv("ANN_LOG_EVERY", "100"))  # epochs between DEBUG lines

    # --- Optimizer Constants ---
    SCG_SIGMA: float = float(os.getenv("SCG_SIGMA", "1e-4"))
    SCG_LAMBDA_INIT: float = float(os.getenv("SCG_LAMBDA_INIT", "1e-6"))
    SCG_LAMBDA_MAX: float = float(os.getenv("SCG_LAMBDA_MAX", "1e25"))
    CG_LINE_SEARCH_TOL: float = float(os.getenv("CG_LINE_SEARCH_TOL", "1e-4"))
    CG_LINE_SEARCH_MAX_EVALS: int = int(os.getenv("CG_LINE_SEARCH_MAX_EVALS", "20"))

    # --- Benchmark Settings ---
    BENCH_TRAIN_YEARS: int = int(os.getenv("BENCH_TRAIN_YEARS", "40"))
    BENCH_N_LAGS: int = int(os.getenv("BENCH_N_LAGS", "12"))
    BENCH_MAX_BASIS_SWEEP: List[int] = json.loads(
        os.getenv(
            "BENCH_MAX_BASIS_SWEEP",
            "[5, 10, 15, 20, 25, 30, 35, 40, 45, 50]"
        )
    )
    BENCH_SEED: int = int(os.getenv("BENCH_SEED", "7"))
    BENCH_OUTPUT_DIR: str = os.getenv("BENCH_OUTPUT_DIR", "./results")
    BENCH_MAX_WORKERS: int = int(os.getenv("BENCH_MAX_WORKERS", "2"))
    BENCH_RECORD_TIMINGS: bool = os.getenv("BENCH_RECORD_TIMINGS", "False").lower() in ("true", "1", "t")

    # --- Logging Settings ---
    LOG_FORMAT: str = os.getenv(
        "LOG_FORMAT",
        "%(asctime)s.%(msecs)03d - %(name)s:%(funcName)s:%(lineno)d - %(levelname)s - [%(run_id)s] %(message)s"
    )
    LOG_DATE_FORMAT: str = os.getenv("LOG_DATE_FORMAT", "%Y-%m-%d %H:%M:%S")
    LOG_TO_FILE: bool = os.getenv("LOG_TO_FILE", "True").lower() in ("true", "1", "t")
    LOG_FILE: str = os.getenv("LOG_FILE", "./logs/rainbench.log")
    LOG_MAX_SIZE: int = int(os.getenv("LOG_MAX_SIZE", "104857600"))  # 100MB
    LOG_BACKUP_COUNT: int = int(os.getenv("LOG_BACKUP_COUNT", "10"))
    LOG_ENABLE_COMPRESSION: bool = os.getenv("LOG_ENABLE_COMPRESSION", "True").lower() in ("true", "1", "t")

    model_config = ConfigDict(case_sensitive=True)


@lru_cache()
def get_settings() -> Settings:
    """
    Returns a cached instance of the Settings object.
    Ensures settings are loaded only once during application lifetime.

    Returns:
        Settings: The application settings instance
    """
    return Settings()


# Global settings instance for convenience
settings = get_settings()
