import os
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field

PACKAGE_ROOT = Path(__file__).resolve().parent
PROJECT_ROOT = PACKAGE_ROOT.parent
DEFAULTS_FILE = PACKAGE_ROOT / "data" / "defaults.json"


class Settings(BaseModel):
    """Process-level settings read from the environment"""
    out_dir: Path = Field(Path("out"), description="Directory for CSV/JSON outputs")
    seed: Optional[int] = Field(None, description="Master seed overriding the config file")
    log_level: str = "INFO"
    parallelism: Optional[int] = Field(None, ge=1)
    defaults_file: Path = DEFAULTS_FILE


def load_settings() -> Settings:
    """Load .env files, then read LOOPSIM_* variables"""
    load_dotenv(PROJECT_ROOT / ".env")
    load_dotenv()

    seed = os.getenv("LOOPSIM_SEED")
    parallelism = os.getenv("LOOPSIM_PARALLELISM")
    return Settings(
        out_dir=Path(os.getenv("LOOPSIM_OUT_DIR", "out")),
        seed=int(seed) if seed else None,
        log_level=os.getenv("LOOPSIM_LOG_LEVEL", "INFO").upper(),
        parallelism=int(parallelism) if parallelism else None,
        defaults_file=Path(os.getenv("LOOPSIM_DEFAULTS", str(DEFAULTS_FILE))),
    )
