"""
Exact counting tables for subgroups of PSL2(Z)

Factorial-scaled big-integer tables for tau2/tau3 structures, proper
cyclically reduced graphs (all, finite index, free, free finite index),
and the subgroup counts H_n derived from them.

Author: PSL2 Subgroups Team
License: MIT
"""

import logging
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Tuple

import pandas as pd

from psl2.config import FAMILIES, config
from psl2.exceptions import InvalidSizeError, TableCorruptionError, UnknownFamilyError
from .cache import TableCache
from .species import (
    TAU2, TAU3, TAU3_FI, TAU2_FREE, TAU3_FREE_FI,
    count_sequence, connected_transfer, moment_transfer, _poly_mul,
)

logger = logging.getLogger(__name__)

COUNT_COLUMNS = ["size", "all", "finite_index", "cr_free", "free", "free_finite_index"]


@dataclass
class CountTable:
    """
    Memoized table: values[n] is an integer (univariate) or a coefficient
    list in the marker (bivariate). Missing entries are zero.
    """
    family: str
    values: List[Any]
    ndim: int = 1
    frozen: bool = False

    @property
    def max_n(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, index):
        if isinstance(index, tuple):
            value: Any = self.values
            for i in index:
                if i < 0 or not isinstance(value, list) or i >= len(value):
                    return 0
                value = value[i]
            return value
        if 0 <= index < len(self.values):
            return self.values[index]
        return [] if self.ndim > 1 else 0

    def row(self, n: int) -> List[int]:
        return list(self[n]) if self.ndim > 1 else [self[n]]

    def freeze(self) -> "CountTable":
        self.frozen = True
        return self

    def to_frame(self) -> pd.DataFrame:
        if self.ndim == 1:
            return pd.DataFrame({"n": range(len(self.values)), self.family: self.values})
        width = max((len(r) for r in self.values), default=0)
        rows = [list(r) + [0] * (width - len(r)) for r in self.values]
        return pd.DataFrame(rows, columns=[f"l={i}" for i in range(width)]).rename_axis("n")


class ExpectedType(NamedTuple):
    """Exact means over proper cyclically reduced labeled graphs"""
    l2: Fraction
    l3: Fraction
    k3: Fraction
    r: Fraction


def exact_division(numerator: int, denominator: int, what: str) -> int:
    quotient, remainder = divmod(numerator, denominator)
    if remainder:
        raise TableCorruptionError(f"{what}: {numerator} is not divisible by {denominator}")
    return quotient


def _shift(row: List[int], by: int = 1) -> List[int]:
    return [0] * by + list(row) if row else []


def _add_rows(*scaled: Tuple[int, List[int]]) -> List[int]:
    width = max((len(r) for _, r in scaled), default=0)
    out = [0] * width
    for factor, row in scaled:
        if factor:
            for i, x in enumerate(row):
                out[i] += factor * x
    while out and out[-1] == 0:
        out.pop()
    return out


class CountingEngine:
    """
    Builds and memoizes every counting table

    Univariate tables are computed up to ``univariate_cap`` and bivariate
    ones up to ``bivariate_cap``; each table is built once per size and
    optionally persisted through a TableCache.
    """

    def __init__(self, cache: Optional[TableCache] = None, bivariate_cap: Optional[int] = None,
                 univariate_cap: Optional[int] = None):
        self.cache = cache
        self.bivariate_cap = bivariate_cap or config.limits.bivariate_cap
        self.univariate_cap = univariate_cap or config.limits.univariate_cap
        self.tables: Dict[str, CountTable] = {}
        self.logger = logging.getLogger(__name__)

    @classmethod
    def from_config(cls, use_cache: bool = True) -> "CountingEngine":
        cache = TableCache(config.cache.directory) if use_cache and config.cache.enabled else None
        return cls(cache=cache)

    # memoization ----------------------------------------------------------

    def _table(self, name: str, N: int, build: Callable[[int], List[Any]], ndim: int = 1) -> CountTable:
        cap = self.univariate_cap if ndim == 1 else self.bivariate_cap
        if N > cap:
            raise InvalidSizeError(f"{name} requested to n={N}, above the configured cap {cap}")
        if N < 0:
            raise InvalidSizeError(f"negative size {N}")

        table = self.tables.get(name)
        if table is not None and table.max_n >= N:
            return table

        values = self.cache.load(name, N) if self.cache is not None else None
        if values is None or len(values) < N + 1:
            start = time.time()
            values = build(N)
            elapsed = time.time() - start
            if elapsed > 0.5:
                self.logger.info(f"Built {name} up to n={N} in {elapsed:.2f}s")
            else:
                self.logger.debug(f"Built {name} up to n={N} in {elapsed:.3f}s")
            if self.cache is not None:
                self.cache.save(name, N, values, ndim)

        table = CountTable(name, values, ndim).freeze()
        self.tables[name] = table
        return table

    # species sequences -------------------------------------------------------

    def t2(self, N: int) -> CountTable:
        return self._table("t2", N, lambda n: count_sequence(TAU2, n))

    def t3(self, N: int) -> CountTable:
        return self._table("t3", N, lambda n: count_sequence(TAU3, n))

    def t3_fi(self, N: int) -> CountTable:
        return self._table("t3fi", N, lambda n: count_sequence(TAU3_FI, n))

    def t2_free(self, N: int) -> CountTable:
        return self._table("t20", N, lambda n: count_sequence(TAU2_FREE, n))

    def t3_free(self, N: int) -> CountTable:
        """t3^(0)(n) = 2(n-1) t3^(0)(n-2) + (n-1)(n-2) t3^(0)(n-3)"""
        def build(n_max: int) -> List[int]:
            t = [1, 0, 2][:n_max + 1]
            for n in range(3, n_max + 1):
                t.append(2 * (n - 1) * t[n - 2] + (n - 1) * (n - 2) * t[n - 3])
            return t
        return self._table("t30", N, build)

    def t3_free_fi(self, N: int) -> CountTable:
        return self._table("t3ff", N, lambda n: count_sequence(TAU3_FREE_FI, n))

    # bivariate tables ---------------------------------------------------------

    def tau2_table(self, N: int) -> CountTable:
        """t2(n, l): t2(n-1, l-1) + (n-1) t2(n-2, l)"""
        def build(n_max: int) -> List[List[int]]:
            rows = [[1]]
            for n in range(1, n_max + 1):
                prev2 = rows[n - 2] if n >= 2 else []
                rows.append(_add_rows((1, _shift(rows[n - 1])), (n - 1, prev2)))
            return rows
        return self._table("tau2_biv", N, build, ndim=2)

    def tau3_table(self, N: int) -> CountTable:
        """t3(n, l): t3(n-1, l-1) + 2(n-1) t3(n-2, l) + (n-1)(n-2) t3(n-3, l)"""
        def build(n_max: int) -> List[List[int]]:
            rows = [[1]]
            for n in range(1, n_max + 1):
                prev2 = rows[n - 2] if n >= 2 else []
                prev3 = rows[n - 3] if n >= 3 else []
                rows.append(_add_rows((1, _shift(rows[n - 1])), (2 * (n - 1), prev2),
                                      ((n - 1) * (n - 2), prev3)))
            return rows
        return self._table("tau3_biv", N, build, ndim=2)

    def tau3_trivariate(self, N: int) -> List[List[List[int]]]:
        """t3(n, l, k) with k isolated b-edges, indexed [n][l][k]"""
        cap = self.bivariate_cap
        if N > cap:
            raise InvalidSizeError(f"trivariate tau3 requested to n={N}, above the cap {cap}")
        cached = self.tables.get("tau3_triv")
        if cached is not None and cached.max_n >= N:
            return cached.values

        def cell(rows, n, l, k):
            if n < 0 or l < 0 or k < 0 or l >= len(rows[n]) or k >= len(rows[n][l]):
                return 0
            return rows[n][l][k]

        rows: List[List[List[int]]] = [[[1]]]
        for n in range(1, N + 1):
            table = []
            for l in range(n + 1):
                line = []
                for k in range(n // 2 + 1):
                    line.append(cell(rows, n - 1, l - 1, k)
                                + 2 * (n - 1) * (cell(rows, n - 2, l, k - 1) if n >= 2 else 0)
                                + (n - 1) * (n - 2) * (cell(rows, n - 3, l, k) if n >= 3 else 0))
                table.append(line)
            rows.append(table)
        self.tables["tau3_triv"] = CountTable("tau3_triv", rows, ndim=3).freeze()
        return rows

    def gpr_tables(self, N: int) -> Tuple[CountTable, CountTable]:
        """(g~pr(n, l), gpr(n, l)): all tau2 x tau3 pairs and the connected ones"""
        def build_tilde(n_max: int) -> List[List[int]]:
            t2, t3 = self.tau2_table(n_max), self.tau3_table(n_max)
            return [[]] + [_poly_mul(t2[n], t3[n]) for n in range(1, n_max + 1)]

        tilde = self._table("gpr_tilde_biv", N, build_tilde, ndim=2)
        connected = self._table("gpr_biv", N, lambda n: connected_transfer(tilde.values[:n + 1], 1), ndim=2)
        return tilde, connected

    def free_tables(self, N: int) -> Tuple[CountTable, CountTable]:
        """(g~^(0)(n, k), g^(0)(n, k)) marked by isolated b-edges"""
        def build_t30(n_max: int) -> List[List[int]]:
            rows: List[List[int]] = [[1], [], [0, 2]][:n_max + 1]
            for n in range(3, n_max + 1):
                rows.append(_add_rows((2 * (n - 1), _shift(rows[n - 2])), ((n - 1) * (n - 2), rows[n - 3])))
            return rows

        def build_tilde(n_max: int) -> List[List[int]]:
            t30 = self._table("t30_biv", n_max, build_t30, ndim=2)
            t20 = self.t2_free(n_max)
            return [[]] + [[t20[n] * x for x in t30[n]] if t20[n] else [] for n in range(1, n_max + 1)]

        tilde = self._table("g0_tilde_biv", N, build_tilde, ndim=2)
        connected = self._table("g0_biv", N, lambda n: connected_transfer(tilde.values[:n + 1], 1), ndim=2)
        return tilde, connected

    # univariate graph tables ---------------------------------------------------

    def _product(self, name: str, N: int, left: CountTable, right: CountTable) -> CountTable:
        return self._table(name, N, lambda n: [0] + [left[i] * right[i] for i in range(1, n + 1)])

    def gpr_tilde(self, N: int) -> CountTable:
        return self._product("gpr_tilde", N, self.t2(N), self.t3(N))

    def gpr(self, N: int) -> CountTable:
        tilde = self.gpr_tilde(N)
        return self._table("gpr", N, lambda n: connected_transfer(tilde.values[:n + 1]))

    def loop_moment_tables(self, N: int) -> Tuple[CountTable, CountTable]:
        """
        (sum_l l g~pr(n, l), sum_l l gpr(n, l)) from univariate recurrences

        A loop is either a tau2 fixed point or a tau3 fixed point:
        m~(n) = n t2(n-1) t3(n) + n t2(n) t3(n-1).
        """
        t2, t3, tilde = self.t2(N), self.t3(N), self.gpr_tilde(N)
        moment_tilde = self._table(
            "gpr_moment_tilde", N,
            lambda n_max: [0] + [n * (t2[n - 1] * t3[n] + t2[n] * t3[n - 1]) for n in range(1, n_max + 1)],
        )
        moment = self._table("gpr_moment", N,
                             lambda n: moment_transfer(moment_tilde.values[:n + 1], tilde.values))
        return moment_tilde, moment

    def gfi_tilde(self, N: int) -> CountTable:
        return self._product("gfi_tilde", N, self.t2(N), self.t3_fi(N))

    def gfi(self, N: int) -> CountTable:
        tilde = self.gfi_tilde(N)
        return self._table("gfi", N, lambda n: connected_transfer(tilde.values[:n + 1]))

    def g0_tilde(self, N: int) -> CountTable:
        return self._product("g0_tilde", N, self.t2_free(N), self.t3_free(N))

    def g0(self, N: int) -> CountTable:
        tilde = self.g0_tilde(N)
        return self._table("g0", N, lambda n: connected_transfer(tilde.values[:n + 1]))

    def gv(self, N: int) -> CountTable:
        """sum_k k g^(0)(n, k): loop-free graphs with a marked isolated b-edge"""
        t20, t30, tilde = self.t2_free(N), self.t3_free(N), self.g0_tilde(N)
        moment_tilde = self._table(
            "gv_tilde", N,
            lambda n_max: [0] + [t20[n] * n * (n - 1) * t30[n - 2] if n >= 2 else 0
                                 for n in range(1, n_max + 1)],
        )
        return self._table("gv", N, lambda n: moment_transfer(moment_tilde.values[:n + 1], tilde.values))

    def one_loop_tables(self, N: int) -> Tuple[CountTable, CountTable]:
        """
        (g^(a)(n), g^(b)(n)): one-loop free cyclically reduced graphs by loop label

        g^(a)(n) = n g^(v)(n-1) + 2n g^(b)(n-1) and g^(b)(n) = n g^(a)(n-1).
        """
        gv = self.gv(N)

        def build_ga(n_max: int) -> List[int]:
            ga = [0] * (n_max + 1)
            for n in range(2, n_max + 1):
                ga[n] = n * gv[n - 1] + 2 * n * (n - 1) * ga[n - 2]
            return ga

        ga = self._table("ga", N, build_ga)
        gb = self._table("gb", N, lambda n_max: [0] + [n * ga[n - 1] for n in range(1, n_max + 1)])
        return ga, gb

    def g_free_fi(self, N: int) -> CountTable:
        tilde = self._product("gff_tilde", N, self.t2_free(N), self.t3_free_fi(N))
        return self._table("gff", N, lambda n: connected_transfer(tilde.values[:n + 1]))

    # subgroup counts -----------------------------------------------------------

    def count_subgroups(self, n: int) -> Tuple[int, int]:
        """(L_n, H_n) with L_n = n gpr(n) + sum_l l gpr(n, l) and H_n = L_n / n!"""
        if n < 1:
            raise InvalidSizeError(f"size must be positive, got {n}")
        if n == 1:
            return 4, 4
        _, moment = self.loop_moment_tables(n)
        L = n * self.gpr(n)[n] + moment[n]
        return L, exact_division(L, math.factorial(n), f"H_{n}")

    def count_finite_index(self, n: int) -> int:
        if n < 1:
            raise InvalidSizeError(f"size must be positive, got {n}")
        return exact_division(self.gfi(n)[n], math.factorial(n - 1), f"H^fi_{n}")

    def count_free(self, n: int) -> Tuple[int, int]:
        """(H^cr-fr_n, H^fr_n)"""
        if n < 1:
            raise InvalidSizeError(f"size must be positive, got {n}")
        g0 = self.g0(n)[n]
        ga, gb = self.one_loop_tables(n)
        cr = exact_division(g0, math.factorial(n - 1), f"H^cr-fr_{n}")
        fr = exact_division(n * g0 + ga[n] + gb[n], math.factorial(n), f"H^fr_{n}")
        return cr, fr

    def count_free_finite_index(self, n: int) -> int:
        if n < 1:
            raise InvalidSizeError(f"size must be positive, got {n}")
        if n % 6:
            return 0
        return exact_division(self.g_free_fi(n)[n], math.factorial(n - 1), f"H^fr-fi_{n}")

    def family_count(self, family: str, n: int) -> int:
        if family == "all":
            return self.count_subgroups(n)[1]
        if family == "fi":
            return self.count_finite_index(n)
        if family == "crfree":
            return self.count_free(n)[0]
        if family == "free":
            return self.count_free(n)[1]
        if family == "frfi":
            return self.count_free_finite_index(n)
        raise UnknownFamilyError(f"Unknown family {family!r}; expected one of {', '.join(FAMILIES)}")

    def count_row(self, n: int) -> Dict[str, int]:
        cr, fr = self.count_free(n)
        return {
            "size": n,
            "all": self.count_subgroups(n)[1],
            "finite_index": self.count_finite_index(n),
            "cr_free": cr,
            "free": fr,
            "free_finite_index": self.count_free_finite_index(n),
        }

    def count_table(self, max_n: int) -> pd.DataFrame:
        """Counting table with one row per size 1..max_n"""
        rows = [self.count_row(n) for n in range(1, max_n + 1)]
        return pd.DataFrame(rows, columns=COUNT_COLUMNS)

    # probabilities and checks ------------------------------------------------

    def connectivity_probability(self, n: int) -> Fraction:
        """p_n = sum_l gpr(n, l) / sum_l g~pr(n, l)"""
        if n < 1:
            raise InvalidSizeError(f"size must be positive, got {n}")
        return Fraction(self.gpr(n)[n], self.gpr_tilde(n)[n])

    def connectivity_probabilities(self, N: int) -> List[Fraction]:
        """p_1..p_N (index 0 unused)"""
        g, tilde = self.gpr(N), self.gpr_tilde(N)
        return [Fraction(0)] + [Fraction(g[n], tilde[n]) for n in range(1, N + 1)]

    def growth_inequality_holds(self, N: int) -> bool:
        """2(2n+1)(2n+2) g^(0)(2n) <= g^(0)(2n+2) for 2 <= n <= N/2 - 1"""
        g0 = self.g0(N)
        for n in range(2, N // 2):
            if 2 * (2 * n + 1) * (2 * n + 2) * g0[2 * n] > g0[2 * n + 2]:
                self.logger.warning(f"Growth inequality fails at 2n = {2 * n}")
                return False
        return True

    def exact_expected_type(self, family: str, n: int) -> ExpectedType:
        """
        Exact means of l2, l3, k3 and of the rank over the proper cyclically
        reduced labeled graphs of size n in the family
        """
        if n < 2:
            raise InvalidSizeError("expected types are defined for n >= 2")
        if family == "all":
            t2, t3, tilde, total = self.t2(n), self.t3(n), self.gpr_tilde(n), self.gpr(n)
            moments = {
                "l2": lambda m: m * t2[m - 1] * t3[m],
                "l3": lambda m: m * t2[m] * t3[m - 1],
                "k3": lambda m: m * (m - 1) * t2[m] * t3[m - 2] if m >= 2 else 0,
            }
        elif family == "fi":
            t2, t3, tilde, total = self.t2(n), self.t3_fi(n), self.gfi_tilde(n), self.gfi(n)
            moments = {
                "l2": lambda m: m * t2[m - 1] * t3[m],
                "l3": lambda m: m * t2[m] * t3[m - 1],
                "k3": lambda m: 0,
            }
        elif family in ("free", "crfree"):
            if n % 2:
                raise InvalidSizeError("free cyclically reduced graphs have even size")
            total = self.g0(n)
            gv = self.gv(n)
            k3 = Fraction(gv[n], total[n])
            return ExpectedType(Fraction(0), Fraction(0), k3, Fraction(n, 6) - k3 / 3 + 1)
        else:
            raise UnknownFamilyError(f"No expected type for family {family!r}")

        means = {}
        for key, weight in moments.items():
            m_tilde = [0] + [weight(m) for m in range(1, n + 1)]
            means[key] = Fraction(moment_transfer(m_tilde, tilde.values)[n], total[n])
        rank = (n - 2 * means["k3"] - 3 * means["l2"] - 4 * means["l3"]) / 6 + 1
        return ExpectedType(means["l2"], means["l3"], means["k3"], rank)
