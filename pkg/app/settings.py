# app/settings.py
import os
from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

ROOT = Path(__file__).resolve().parents[1]


class Settings:
    # Env is read at import time; fine for simple configs
    app_env = os.getenv("APP_ENV", "dev")
    log_level = os.getenv("LOG_LEVEL", "WARNING").upper()

    # Quadrature / norms
    tol = float(os.getenv("WACHS_TOL", "1e-7"))
    tol_tight = float(os.getenv("WACHS_TOL_TIGHT", "1e-8"))
    cell_cap = int(os.getenv("WACHS_CELL_CAP", "200000"))

    # Sweeps
    sweep_workers = int(os.getenv("WACHS_SWEEP_WORKERS", "1"))
    sweep_config = Path(os.getenv("WACHS_SWEEP_CONFIG", str(ROOT / "data" / "sweep_grids.yaml")))


@lru_cache
def get_settings() -> Settings:
    return Settings()
