"""
PSL2 Subgroups Counting Module

Exact and asymptotic enumeration of subgroups of PSL2(Z):
- SET(S) species engine (recurrences, saddle points, rate functions)
- Big-integer counting tables with a binary on-disk cache
- Asymptotic equivalents and exact-vs-asymptotic diagnostics

Author: PSL2 Subgroups Team
License: MIT
"""

__version__ = "1.0.0"
__author__ = "PSL2 Subgroups Team"

from .species import (
    SpeciesSpec,
    TAU2,
    TAU3,
    TAU3_FI,
    TAU2_FREE,
    TAU3_FREE,
    TAU3_FREE_FI,
    count_sequence,
    saddle_point,
    asymptotic_estimate,
    expected_components,
    rate_function,
    sample_multiset,
    bender_coefficients,
)
from .cache import TableCache
from .tables import COUNT_COLUMNS, CountTable, CountingEngine, ExpectedType
from .asymptotics import (
    AsymptoticFormula,
    DeviationBound,
    BenderReport,
    FORMULAS,
    asymp_coefficient,
    h_bounds,
    ratio_table,
    expected_type,
    deviation_exponent,
    bender_diagnostic,
    probability_reports,
    connectivity_report,
)

__all__ = [
    "SpeciesSpec",
    "TAU2",
    "TAU3",
    "TAU3_FI",
    "TAU2_FREE",
    "TAU3_FREE",
    "TAU3_FREE_FI",
    "count_sequence",
    "saddle_point",
    "asymptotic_estimate",
    "expected_components",
    "rate_function",
    "sample_multiset",
    "bender_coefficients",
    "TableCache",
    "COUNT_COLUMNS",
    "CountTable",
    "CountingEngine",
    "ExpectedType",
    "AsymptoticFormula",
    "DeviationBound",
    "BenderReport",
    "FORMULAS",
    "asymp_coefficient",
    "h_bounds",
    "ratio_table",
    "expected_type",
    "deviation_exponent",
    "bender_diagnostic",
    "probability_reports",
    "connectivity_report",
]
