"""Configuration management for CRSS."""

import os
from dotenv import load_dotenv

load_dotenv()


class Config:
    """Application configuration."""

    # Run ledger
    DATABASE_URL = os.getenv("DATABASE_URL", "sqlite:///./crss_runs.db")
    RECORD_RUNS = os.getenv("RECORD_RUNS", "true").lower() == "true"

    # API
    API_HOST = os.getenv("API_HOST", "127.0.0.1")
    API_PORT = int(os.getenv("API_PORT", "8000"))
    API_KEY = os.getenv("API_KEY", "dev-key-change-in-production")

    # Numerics
    BAND_LIMIT = int(os.getenv("CRSS_BAND_LIMIT", "12"))
    MAX_BAND_LIMIT = int(os.getenv("CRSS_MAX_BAND_LIMIT", "64"))
    TAIL_FRACTION = float(os.getenv("CRSS_TAIL_FRACTION", "1e-6"))

    # Experiments
    OUTPUT_DIR = os.getenv("CRSS_OUTPUT_DIR", "results")
    SEED = int(os.getenv("CRSS_SEED", "2024"))
    STARTS = int(os.getenv("CRSS_STARTS", "5"))

    # Logging
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")


config = Config()
