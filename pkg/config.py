"""Configuration constants for the hypergeometric regulator toolkit."""

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

# Project paths
PROJECT_ROOT = Path(__file__).parent
DATA_DIR = PROJECT_ROOT / "data"
DB_DIR = PROJECT_ROOT / "db"
ENGINE_DIR = PROJECT_ROOT / "engine"
SCRIPTS_DIR = PROJECT_ROOT / "scripts"

# Data files
GOLDEN_TABLES_FILE = DATA_DIR / "golden_tables.json"
TABLE_REPORT_FILE = DATA_DIR / "table_report.json"

# Precision (decimal digits)
DEFAULT_PRECISION = 40
MIN_PRECISION = 20
GUARD_DIGITS = 10
PRECISION_ENV_VAR = "HGREG_PREC"

# Series evaluation
MAX_SERIES_TERMS = 10**7
SERIES_TAIL_EXTRA_DIGITS = 5

# Quadrature
QUAD_MAX_DEGREE = 12

# Rational reconstruction
RECON_QMAX = 10**5
RECON_TOL = 1e-8
CONSTRAINT_QMAX = 10**6
RATIONALITY_QMAX = 10**3

# L-functions
ROOT_NUMBER_DELTA = 0.1
ROOT_NUMBER_CUTOFF = 1.2
LSERIES_EXTRA_DIGITS = 3

# Finite-difference derivative checks
FD_STEP = 1e-8
FD_TOL = 1e-8

# CLI defaults
DEFAULT_OUTPUT_FORMAT = "text"
# table and verify write reports, which default to JSON
REPORT_OUTPUT_FORMAT = "json"
REPORT_COMMANDS = ("table", "verify")
OUTPUT_FORMATS = ("json", "csv", "text")
DEFAULT_SEED = 1
DEFAULT_IDENTITY_COUNT = 20  # instances per check kind
FAMILIES = ("legendre", "family2", "family3")


def default_precision() -> int:
    """Return the working precision P, honouring the HGREG_PREC override."""
    raw = os.environ.get(PRECISION_ENV_VAR)
    if raw is None or not raw.strip():
        return DEFAULT_PRECISION
    try:
        return int(raw)
    except ValueError:
        # Imported lazily so config stays importable on its own
        from engine.errors import ConfigError
        raise ConfigError(f"{PRECISION_ENV_VAR} must be an integer, got {raw!r}")


@dataclass(frozen=True)
class Settings:
    """Run-time knobs shared by the CLI and the batch scripts."""

    precision: int = DEFAULT_PRECISION
    max_series_terms: int = MAX_SERIES_TERMS
    qmax: int = RECON_QMAX
    recon_tol: float = RECON_TOL
    output: str = DEFAULT_OUTPUT_FORMAT
    seed: int = DEFAULT_SEED
    jobs: Optional[int] = None

    def __post_init__(self):
        from engine.errors import ConfigError

        if self.precision < MIN_PRECISION:
            raise ConfigError(f"precision must be at least {MIN_PRECISION}, got {self.precision}")
        if self.max_series_terms <= 0 or self.qmax <= 0 or self.recon_tol <= 0:
            raise ConfigError("max_series_terms, qmax and recon_tol must be positive")
        if self.output not in OUTPUT_FORMATS:
            raise ConfigError(f"output must be one of {', '.join(OUTPUT_FORMATS)}, got {self.output!r}")
        if self.jobs is not None and self.jobs <= 0:
            raise ConfigError(f"jobs must be positive, got {self.jobs}")

    @classmethod
    def from_env(cls, **overrides) -> "Settings":
        """Build settings with the precision taken from the environment."""
        values = {"precision": default_precision()}
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)
