import os
from dotenv import load_dotenv
from pathlib import Path

# Loading .env file
BASE_DIR = Path(__file__).resolve().parent

# Reads and injects them into the environment
load_dotenv(BASE_DIR / ".env")


def _float(name: str, default: float) -> float:
    return float(os.getenv(name, default))


def _int(name: str, default: int) -> int:
    return int(os.getenv(name, default))


# Logging
LOG_LEVEL = os.getenv("TRANSVERSE_LOG_LEVEL", "INFO").upper()

# Paths
DATA_DIR = Path(os.getenv("TRANSVERSE_DATA_DIR", BASE_DIR / "data"))
REPORTS_DIR = DATA_DIR / "reports"

# Tolerances
DEFAULT_TAU = _float("TRANSVERSE_TAU", 1e-7)
DEFAULT_TAU_NEWTON = _float("TRANSVERSE_TAU_NEWTON", 1e-10)
DEFAULT_DELTA = _float("TRANSVERSE_DELTA", 0.01)

# Resolutions
DEFAULT_NODES_PER_AXIS = _int("TRANSVERSE_NODES_PER_AXIS", 256)
DEFAULT_SEEDS_PER_AXIS = _int("TRANSVERSE_SEEDS_PER_AXIS", 16)
DEFAULT_CENTERS_PER_AXIS = _int("TRANSVERSE_CENTERS_PER_AXIS", 25)

# Diagnostics
DEFAULT_TRIALS = _int("TRANSVERSE_TRIALS", 100)
DEFAULT_DICHOTOMY_INSTANCES = _int("TRANSVERSE_DICHOTOMY_INSTANCES", 1000)
DEFAULT_SEED = _int("TRANSVERSE_SEED", 0)

# Module minimums
MIN_NODES_PER_AXIS = 4
MIN_SEEDS_PER_AXIS = 1
MIN_CENTERS_PER_AXIS = 4

# Basic sanity check

def validate_config():
    problems = []
    if LOG_LEVEL not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        problems.append(f"TRANSVERSE_LOG_LEVEL={LOG_LEVEL!r}")
    for name, value in (("TAU", DEFAULT_TAU), ("TAU_NEWTON", DEFAULT_TAU_NEWTON), ("DELTA", DEFAULT_DELTA)):
        if not value > 0:
            problems.append(f"TRANSVERSE_{name} must be positive")
    if DEFAULT_NODES_PER_AXIS < MIN_NODES_PER_AXIS:
        problems.append(f"TRANSVERSE_NODES_PER_AXIS must be >= {MIN_NODES_PER_AXIS}")
    if DEFAULT_SEEDS_PER_AXIS < MIN_SEEDS_PER_AXIS:
        problems.append(f"TRANSVERSE_SEEDS_PER_AXIS must be >= {MIN_SEEDS_PER_AXIS}")
    if DEFAULT_CENTERS_PER_AXIS < MIN_CENTERS_PER_AXIS:
        problems.append(f"TRANSVERSE_CENTERS_PER_AXIS must be >= {MIN_CENTERS_PER_AXIS}")
    if DEFAULT_TRIALS < 1 or DEFAULT_DICHOTOMY_INSTANCES < 1:
        problems.append("TRANSVERSE_TRIALS and TRANSVERSE_DICHOTOMY_INSTANCES must be >= 1")
    if problems:
        raise RuntimeError(f"Invalid configuration: {', '.join(problems)}")

    # To Ensure directories exist
    REPORTS_DIR.mkdir(parents=True, exist_ok=True)
