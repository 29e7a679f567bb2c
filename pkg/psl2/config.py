"""
PSL2 Subgroups Configuration

Runtime settings for table caching, table size caps, the oracle and logging.
Values come from the environment (optionally a .env file).

Author: PSL2 Subgroups Team
License: MIT
"""

import os
from pathlib import Path
from typing import List, Optional
from dataclasses import dataclass
from dotenv import load_dotenv

load_dotenv()


FAMILIES = ("all", "fi", "crfree", "free", "frfi")


@dataclass
class CacheSettings:
    """Binary table cache configuration"""
    directory: Path
    enabled: bool = True


@dataclass
class TableLimits:
    """Size caps for the exact counting tables"""
    bivariate_cap: int = 128
    univariate_cap: int = 1000
    oracle_max_size: int = 8


def _env_flag(name: str, default: str) -> bool:
    return os.getenv(name, default).strip().lower() in ("1", "true", "yes", "on")


class PSL2Config:
    """Main configuration class"""

    def __init__(self):
        # Table cache
        self.cache = CacheSettings(
            directory=Path(os.getenv("PSL2_CACHE_DIR", str(Path.home() / ".cache" / "psl2"))),
            enabled=_env_flag("PSL2_CACHE_ENABLED", "true"),
        )

        # Table limits
        self.limits = TableLimits(
            bivariate_cap=int(os.getenv("PSL2_BIVARIATE_CAP", "128")),
            univariate_cap=int(os.getenv("PSL2_UNIVARIATE_CAP", "1000")),
            oracle_max_size=int(os.getenv("PSL2_ORACLE_MAX_SIZE", "8")),
        )

        # Sampling
        seed = os.getenv("PSL2_DEFAULT_SEED")
        self.default_seed: Optional[int] = int(seed) if seed else None

        # Logging
        self.log_level = os.getenv("LOG_LEVEL", "INFO")

    def validate_config(self) -> List[str]:
        """Validate configuration and return list of errors"""
        errors = []

        if self.limits.bivariate_cap < 1:
            errors.append("PSL2_BIVARIATE_CAP must be positive")

        if self.limits.univariate_cap < self.limits.bivariate_cap:
            errors.append("PSL2_UNIVARIATE_CAP must be at least PSL2_BIVARIATE_CAP")

        if not 1 <= self.limits.oracle_max_size <= 8:
            errors.append("PSL2_ORACLE_MAX_SIZE must lie in [1, 8]")

        if self.default_seed is not None and not 0 <= self.default_seed < 2 ** 64:
            errors.append("PSL2_DEFAULT_SEED must be a 64-bit unsigned integer")

        if self.log_level.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            errors.append(f"Unknown LOG_LEVEL {self.log_level}")

        return errors


# Global configuration instance
config = PSL2Config()
