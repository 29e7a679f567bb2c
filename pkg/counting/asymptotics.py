"""
Asymptotic equivalents and exact-vs-asymptotic diagnostics

Every equivalent is evaluated in natural-log scale: coefficients like
n^(n/6) leave the double range around n = 200.

Author: PSL2 Subgroups Team
License: MIT
"""

import logging
import math
from dataclasses import dataclass, asdict
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from psl2.exceptions import InvalidSizeError, UnknownFamilyError
from .species import (
    TAU2, TAU3, TAU3_FI, TAU3_FREE, SpeciesSpec,
    bender_coefficients, rate_function, tail_thresholds,
)
from .tables import CountingEngine

logger = logging.getLogger(__name__)

LOG_2 = math.log(2)
LOG_6 = math.log(6)


def _any(n: int) -> bool:
    return n >= 1


def _even(n: int) -> bool:
    return n >= 2 and n % 2 == 0


def _multiple_of_six(n: int) -> bool:
    return n >= 6 and n % 6 == 0


def _log_t2(n):
    return -0.25 - math.log(2 * math.sqrt(math.pi * n)) - (n / 2) * math.log(n) + n / 2 + math.sqrt(n)


def _log_t3(n):
    return (-2 / 9 - 0.5 * math.log(6 * math.pi * n) - (n / 3) * math.log(n)
            + n / 3 + n ** (2 / 3) + n ** (1 / 3) / 3)


def _log_t3_fi(n):
    return -0.5 * math.log(6 * math.pi * n) - (n / 3) * math.log(n) + n / 3 + n ** (1 / 3)


def _log_gpr(n):
    return (-17 / 36 - 0.5 * math.log(12 * math.pi * n) + (n / 6) * math.log(n)
            - n / 6 + n ** (2 / 3) + math.sqrt(n) + n ** (1 / 3) / 3)


def _log_gfi(n):
    return (-0.25 - 0.5 * math.log(12 * math.pi * n) + (n / 6) * math.log(n)
            - n / 6 + math.sqrt(n) + n ** (1 / 3))


def _log_hfi(n):
    return _log_gfi(n) + math.log(n)


def _log_h_lower(n):
    return _log_gpr(n) + math.log(n)


# free family: sizes are 2h
def _log_t20(n):
    h = n / 2
    return -0.5 * math.log(2 * math.pi * h) - h * math.log(h) + (1 - LOG_2) * h


def _free_exponent(h: float) -> float:
    return 2 ** (2 / 3) * h ** (2 / 3) - (2 ** (4 / 3) / 3) * h ** (1 / 3)


def _log_t30(n):
    h = n / 2
    return (4 / 9 - 0.5 * math.log(12 * math.pi * h) - (2 / 3) * h * math.log(h)
            + (2 / 3) * (1 - LOG_2) * h + _free_exponent(h))


def _log_g0(n):
    h = n / 2
    return (4 / 9 - 0.5 * math.log(6 * math.pi) + (1 / 3) * h * math.log(h)
            - (1 / 3) * (1 - LOG_2) * h + _free_exponent(h) - 0.5 * math.log(h))


def _log_hcrfr(n):
    return _log_g0(n) + math.log(n)


# free finite index: sizes are 6h
def _log_gff(n):
    h = n / 6
    return -0.5 * math.log(2 * math.pi * h) + h * math.log(h) - (1 - LOG_6) * h


# H^fr-fi_{6h} = 6h [z^{6h}] G^fr-fi ~ 6h (2 pi h)^{-1/2} exp(h log h - (1 - log 6) h)
def _log_hfrfi(n):
    return _log_gff(n) + math.log(n)


@dataclass(frozen=True)
class AsymptoticFormula:
    """Closed-form equivalent of a coefficient, in log scale"""
    family: str
    evaluator: Callable[[int], float]
    valid: Callable[[int], bool]
    description: str
    # exact side: "egf" compares n! [z^n] tables, "count" compares integer counts
    scale: str = "egf"

    def log_value(self, n: int) -> float:
        if not self.valid(n):
            raise InvalidSizeError(f"{self.family} equivalent is not defined at n={n}")
        return self.evaluator(n)


FORMULAS: Dict[str, AsymptoticFormula] = {f.family: f for f in [
    AsymptoticFormula("t2", _log_t2, _any, "[z^n] T2"),
    AsymptoticFormula("t3", _log_t3, _any, "[z^n] T3"),
    AsymptoticFormula("t3fi", _log_t3_fi, _any, "[z^n] T3 permutational"),
    AsymptoticFormula("gpr_tilde", _log_gpr, _any, "[z^n] G~pr"),
    AsymptoticFormula("gpr", _log_gpr, _any, "[z^n] Gpr"),
    AsymptoticFormula("h", _log_h_lower, _any, "V_n = n [z^n] Gpr, with V_n < H_n < 2 V_n", "count"),
    AsymptoticFormula("gfi_tilde", _log_gfi, _any, "[z^n] G~fi"),
    AsymptoticFormula("gfi", _log_gfi, _any, "[z^n] Gfi"),
    AsymptoticFormula("hfi", _log_hfi, _any, "H^fi_n", "count"),
    AsymptoticFormula("t20", _log_t20, _even, "[z^n] T2 loop-free"),
    AsymptoticFormula("t30", _log_t30, _even, "[z^n] T3 loop-free"),
    AsymptoticFormula("g0_tilde", _log_g0, _even, "[z^n] G~(0)"),
    AsymptoticFormula("g0", _log_g0, _even, "[z^n] G(0)"),
    AsymptoticFormula("hcrfr", _log_hcrfr, _even, "H^cr-fr_n", "count"),
    AsymptoticFormula("gff", _log_gff, _multiple_of_six, "[z^n] G^fr-fi"),
    AsymptoticFormula("hfrfi", _log_hfrfi, _multiple_of_six, "H^fr-fi_n = n [z^n] G^fr-fi", "count"),
]}


def _formula(family: str) -> AsymptoticFormula:
    try:
        return FORMULAS[family]
    except KeyError:
        raise UnknownFamilyError(
            f"No asymptotic formula for {family!r}; expected one of {', '.join(FORMULAS)}"
        ) from None


def asymp_coefficient(family: str, n: int) -> float:
    """Log of the displayed equivalent at n"""
    return _formula(family).log_value(n)


def h_bounds(n: int) -> Tuple[float, float]:
    """(log V_n, log 2 V_n): H_n lies between V_n and 2 V_n"""
    lower = asymp_coefficient("h", n)
    return lower, lower + LOG_2


def exact_log_value(engine: CountingEngine, family: str, n: int) -> float:
    """Log of the exact counterpart of a formula"""
    exact = {
        "t2": lambda: engine.t2(n)[n],
        "t3": lambda: engine.t3(n)[n],
        "t3fi": lambda: engine.t3_fi(n)[n],
        "gpr_tilde": lambda: engine.gpr_tilde(n)[n],
        "gpr": lambda: engine.gpr(n)[n],
        "h": lambda: engine.count_subgroups(n)[1],
        "gfi_tilde": lambda: engine.gfi_tilde(n)[n],
        "gfi": lambda: engine.gfi(n)[n],
        "hfi": lambda: engine.count_finite_index(n),
        "t20": lambda: engine.t2_free(n)[n],
        "t30": lambda: engine.t3_free(n)[n],
        "g0_tilde": lambda: engine.g0_tilde(n)[n],
        "g0": lambda: engine.g0(n)[n],
        "hcrfr": lambda: engine.count_free(n)[0],
        "gff": lambda: engine.g_free_fi(n)[n],
        "hfrfi": lambda: engine.count_free_finite_index(n),
    }
    formula = _formula(family)
    if not formula.valid(n):
        raise InvalidSizeError(f"{family} is not defined at n={n}")
    value = exact[family]()
    if value <= 0:
        return -math.inf
    log_value = math.log(value)
    if formula.scale == "egf":
        log_value -= math.lgamma(n + 1)
    return log_value


def ratio(engine: CountingEngine, family: str, n: int) -> float:
    """exact / asymptotic"""
    return math.exp(exact_log_value(engine, family, n) - asymp_coefficient(family, n))


def ratio_table(engine: CountingEngine, family: str, sizes: Iterable[int]) -> pd.DataFrame:
    """Columns n, log_exact, log_asymptotic, ratio over the valid sizes"""
    formula = _formula(family)
    rows = []
    for n in sizes:
        if not formula.valid(n):
            continue
        exact = exact_log_value(engine, family, n)
        asym = formula.log_value(n)
        rows.append({"n": n, "log_exact": exact, "log_asymptotic": asym, "ratio": math.exp(exact - asym)})
    return pd.DataFrame(rows, columns=["n", "log_exact", "log_asymptotic", "ratio"])


# ---------------------------------------------------------------------------
# Expected isomorphism type and large deviations
# ---------------------------------------------------------------------------

class TypePrediction(NamedTuple):
    """Leading-order predictions of E[l2], E[l3], E[k3], E[r]"""
    l2: float
    l3: float
    k3: float
    r: float


def expected_type(family: str, n: int) -> TypePrediction:
    """
    Leading-order mean isomorphism type of a size-n subgroup

    For the free family n is the (even) size itself and the rank
    prediction is (n - n^(2/3)) / 6.
    """
    if n < 1:
        raise InvalidSizeError(f"size must be positive, got {n}")
    if family == "all":
        return TypePrediction(math.sqrt(n), n ** (1 / 3), n ** (2 / 3), n / 6 - n ** (2 / 3) / 3)
    if family in ("fi", "finite_index"):
        return TypePrediction(math.sqrt(n), n ** (1 / 3), 0.0, n / 6 - math.sqrt(n) / 2)
    if family == "free":
        return TypePrediction(0.0, 0.0, n ** (2 / 3), (n - n ** (2 / 3)) / 6)
    raise UnknownFamilyError(f"No expected type for family {family!r}")


# (species, component size) behind each statistic, per family
_STATISTICS: Dict[Tuple[str, str], Tuple[SpeciesSpec, int]] = {
    ("all", "l2"): (TAU2, 1),
    ("all", "l3"): (TAU3, 1),
    ("all", "k3"): (TAU3, 2),
    ("fi", "l2"): (TAU2, 1),
    ("fi", "l3"): (TAU3_FI, 1),
    ("free", "k3"): (TAU3_FREE, 2),
}


@dataclass(frozen=True)
class DeviationBound:
    """P(X <= r E) or P(X >= r E) = O(gamma^scale) with gamma = exp(f(r))"""
    family: str
    statistic: str
    side: str
    r: float
    f: float
    gamma: float
    scale: float
    thresholds: Tuple[float, float]

    @property
    def log_bound(self) -> float:
        return self.f * self.scale

    def to_dict(self) -> Dict:
        return asdict(self)


def deviation_exponent(family: str, statistic: str, side: str, r: float, n: int) -> DeviationBound:
    """
    Large-deviation bound for l2, l3 or k3 below (side "lower", 0 < r < 1)
    or above (side "upper", r > 1) r times its mean
    """
    key = ("fi" if family == "finite_index" else family, statistic)
    if key not in _STATISTICS:
        raise UnknownFamilyError(f"No deviation bound for statistic {statistic!r} in family {family!r}")
    if side == "lower" and not 0 < r < 1:
        raise ValueError(f"lower deviations need 0 < lambda < 1, got {r}")
    if side == "upper" and not r > 1:
        raise ValueError(f"upper deviations need mu > 1, got {r}")
    if side not in ("lower", "upper"):
        raise ValueError(f"side must be 'lower' or 'upper', got {side!r}")

    spec, t = _STATISTICS[key]
    f = rate_function(spec, t, r)
    return DeviationBound(
        family=key[0], statistic=statistic, side=side, r=r, f=f,
        gamma=math.exp(f), scale=n ** (t / spec.degree),
        thresholds=tail_thresholds(spec, t),
    )


# ---------------------------------------------------------------------------
# Bender transfer diagnostics
# ---------------------------------------------------------------------------

@dataclass
class BenderReport:
    family: str
    n: int
    s: int
    coefficients: List[Fraction]
    exact: float
    truncation: float
    normalized_residual: float

    def to_dict(self) -> Dict:
        data = asdict(self)
        data["coefficients"] = [str(b) for b in self.coefficients]
        return data


def bender_from_tables(tilde: Sequence[int], connected: Sequence[int], n: int, s: int,
                       family: str = "custom") -> BenderReport:
    """
    Compare [z^n] log(1 + A~) with sum_{k<s} b_k A~_{n-k}

    Tables are factorial scaled; the residual is normalized by A~_{n-s}.
    """
    if not 1 <= s <= 4:
        raise ValueError("s must lie in [1, 4]")
    if n - s < 1:
        raise InvalidSizeError(f"need n > s, got n={n}, s={s}")
    A = [Fraction(tilde[k], math.factorial(k)) for k in range(n + 1)]
    b = bender_coefficients(A[1:s])
    truncation = sum(b[k] * A[n - k] for k in range(s))
    exact = Fraction(connected[n], math.factorial(n))
    residual = exact - truncation
    scale = A[n - s]
    normalized = float(residual / scale) if scale else math.nan
    return BenderReport(family, n, s, b, float(exact), float(truncation), normalized)


def bender_diagnostic(engine: CountingEngine, family: str, n: int, s: int) -> BenderReport:
    tables = {
        "gpr": (engine.gpr_tilde, engine.gpr),
        "gfi": (engine.gfi_tilde, engine.gfi),
        "g0": (engine.g0_tilde, engine.g0),
    }
    if family not in tables:
        raise UnknownFamilyError(f"No Bender diagnostic for {family!r}; expected one of {', '.join(tables)}")
    tilde_of, connected_of = tables[family]
    return bender_from_tables(tilde_of(n).values, connected_of(n).values, n, s, family)


# ---------------------------------------------------------------------------
# Probability reports
# ---------------------------------------------------------------------------

def _free_scale(n: int) -> float:
    h = (n + 1) // 2
    value = -math.sqrt(2 * h) - (2 * h) ** (1 / 3)
    if n % 2:
        value -= math.log(h) / 6
    return math.exp(value)


def probability_reports(engine: CountingEngine, sizes: Iterable[int]) -> pd.DataFrame:
    """
    Exact proportions next to their Theta-scale curves (constants unknown)

    fi: H^fi / H; free: H^fr / H; free_not_cr: share of free subgroups whose
    graph is not cyclically reduced; frfi_in_fi: H^fr-fi / H^fi at sizes 6h.
    """
    rows = []
    for n in sizes:
        H = engine.count_subgroups(n)[1]
        Hfi = engine.count_finite_index(n)
        _, Hfr = engine.count_free(n)
        g0 = engine.g0(n)[n]
        ga, gb = engine.one_loop_tables(n)
        g1 = ga[n] + gb[n]
        free_total = g1 + n * g0
        row = {
            "n": n,
            "fi": float(Fraction(Hfi, H)),
            "fi_scale": math.exp(-n ** (2 / 3) - n ** (1 / 3) / 3),
            "free": float(Fraction(Hfr, H)),
            "free_scale": _free_scale(n),
            "free_not_cr": float(Fraction(g1, free_total)) if free_total else np.nan,
        }
        if n % 6 == 0:
            h = n // 6
            row["frfi_in_fi"] = float(Fraction(engine.count_free_finite_index(n), Hfi))
            row["frfi_scale"] = math.exp(-math.sqrt(6 * h) - (6 * h) ** (1 / 3))
        else:
            row["frfi_in_fi"] = np.nan
            row["frfi_scale"] = np.nan
        rows.append(row)
    return pd.DataFrame(rows)


def connectivity_report(engine: CountingEngine, sizes: Iterable[int]) -> pd.DataFrame:
    """Exact p_n beside 1 - n^(-1/6) and (1 - p_n) n^(1/6)"""
    sizes = list(sizes)
    if not sizes:
        return pd.DataFrame(columns=["n", "p", "prediction", "scaled_gap"])
    probabilities = engine.connectivity_probabilities(max(sizes))
    n = np.array(sizes, dtype=float)
    p = np.array([float(probabilities[k]) for k in sizes])
    return pd.DataFrame({
        "n": sizes,
        "p": p,
        "prediction": 1 - n ** (-1 / 6),
        "scaled_gap": (1 - p) * n ** (1 / 6),
    })
