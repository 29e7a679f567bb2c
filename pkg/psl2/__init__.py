"""
PSL2 Subgroups Core Module

Shared plumbing for the stallings, counting, sampling and oracle packages:
- Environment-driven configuration
- Exception hierarchy
- Pydantic schemas for graph files and reports
- Command-line interface (psl2.cli)

Author: PSL2 Subgroups Team
License: MIT
"""

__version__ = "1.0.0"
__author__ = "PSL2 Subgroups Team"

from .config import FAMILIES, PSL2Config, config
from .exceptions import (
    PSL2Error,
    InvalidWordError,
    InvalidGraphError,
    InvalidSizeError,
    UnknownFamilyError,
    NotRealizableError,
    DegenerateSpeciesError,
    TableCorruptionError,
)

__all__ = [
    "FAMILIES",
    "PSL2Config",
    "config",
    "PSL2Error",
    "InvalidWordError",
    "InvalidGraphError",
    "InvalidSizeError",
    "UnknownFamilyError",
    "NotRealizableError",
    "DegenerateSpeciesError",
    "TableCorruptionError",
]
