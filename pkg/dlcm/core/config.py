import os
from typing import Callable, Optional, TypeVar
from dotenv import load_dotenv

load_dotenv()

"""
Runtime configuration
"""

T = TypeVar("T")

# Every CLI flag can be overridden through DLCM_<FLAG_NAME>
ENV_PREFIX = "DLCM_"

# Read from environment variable, fallback to SQLite for local runs
DATABASE_URL = os.getenv("DLCM_DATABASE_URL", "sqlite:///./dlcm_runs.db")
LOG_LEVEL = os.getenv("DLCM_LOG_LEVEL", "INFO")

# Training protocol defaults
DEFAULT_BATCH_SIZE = 256
DEFAULT_LR = 1.0
DEFAULT_DECAY = 0.8
DEFAULT_CLIP_NORM = 5.0
DEFAULT_SIGMA = 0.1
DEFAULT_MAX_ITERS = 10000
DEFAULT_CUTOFFS = (1, 3, 5, 10)
DEFAULT_PERMUTATIONS = 100000

# Desk profile
DESK_BATCH_SIZE = 16
DESK_LIST_SIZE = 10


def env_name(flag: str) -> str:
    """Environment variable name for a CLI flag such as --max-iters"""
    return ENV_PREFIX + flag.lstrip("-").replace("-", "_").upper()


def env_default(flag: str, fallback: Optional[T] = None, cast: Callable[[str], T] = str) -> Optional[T]:
    """Default for a flag: DLCM_<FLAG> if set, else the fallback"""
    raw = os.getenv(env_name(flag))
    if raw is None or raw == "":
        return fallback
    return cast(raw)


def env_flag(flag: str) -> bool:
    """Boolean switch default from the environment"""
    raw = os.getenv(env_name(flag), "false")
    return raw.lower() in ("1", "true", "yes", "on")
