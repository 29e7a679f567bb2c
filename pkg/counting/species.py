"""
Labeled classes SET(S) for a polynomial S

Generic engine behind every tau2/tau3 family: exact counting recurrence,
saddle point and coefficient asymptotics, expected component counts,
large-deviation rate functions, uniform sampling by the recursive method,
and the log / exp transfers between all structures and connected ones.

All counts are factorial scaled: a_n = n! [z^n] exp(S(z)).

Author: PSL2 Subgroups Team
License: MIT
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import bisect

from psl2.exceptions import DegenerateSpeciesError, InvalidSizeError, TableCorruptionError

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]
Component = Tuple[int, Tuple[int, ...]]

SADDLE_RTOL = 1e-12


@dataclass(frozen=True)
class SpeciesSpec:
    """
    S(z) = s_1 z + ... + s_d z^d with exact non-negative rational s_i

    ``shape_count(i) = i! * s_i`` is the number of labeled components on a
    given i-element set; it must be an integer.
    """
    coefficients: Tuple[Fraction, ...]
    name: str = ""

    def __post_init__(self):
        coefficients = tuple(Fraction(c) for c in self.coefficients)
        object.__setattr__(self, "coefficients", coefficients)
        if not coefficients or coefficients[-1] <= 0:
            raise DegenerateSpeciesError(f"{self.name or 'species'}: leading coefficient must be positive")
        for i, s in enumerate(coefficients, start=1):
            if s < 0:
                raise DegenerateSpeciesError(f"s_{i} = {s} is negative")
            if (math.factorial(i) * s).denominator != 1:
                raise DegenerateSpeciesError(f"{i}! * s_{i} = {math.factorial(i) * s} is not an integer")

    @classmethod
    def from_terms(cls, terms: Mapping[int, Rational], name: str = "") -> "SpeciesSpec":
        """Build from {degree: coefficient}"""
        if not terms or min(terms) < 1:
            raise DegenerateSpeciesError("degrees must be positive")
        d = max(terms)
        return cls(tuple(Fraction(terms.get(i, 0)) for i in range(1, d + 1)), name)

    @property
    def degree(self) -> int:
        return len(self.coefficients)

    def s(self, i: int) -> Fraction:
        return self.coefficients[i - 1] if 1 <= i <= self.degree else Fraction(0)

    @property
    def support(self) -> List[int]:
        return [i for i in range(1, self.degree + 1) if self.s(i)]

    @property
    def period(self) -> int:
        return reduce(math.gcd, self.support)

    @property
    def aperiodic(self) -> bool:
        return self.period == 1

    def shape_count(self, i: int) -> int:
        return int(math.factorial(i) * self.s(i))

    @property
    def polynomial(self) -> np.polynomial.Polynomial:
        return np.polynomial.Polynomial([0.0] + [float(c) for c in self.coefficients])

    def __str__(self) -> str:
        terms = [f"{c}*z^{i}" for i, c in enumerate(self.coefficients, start=1) if c]
        return " + ".join(terms)


@dataclass(frozen=True)
class ExpansionData:
    """Polynomials R, Q, T of the saddle-point expansion, lowest degree first"""
    R: Tuple[Fraction, ...]
    Q: Tuple[Fraction, ...]
    T: Tuple[Fraction, ...]


def _f(*values) -> Tuple[Fraction, ...]:
    return tuple(Fraction(v) for v in values)


# tabulated instances, keyed by species name
EXPANSIONS: Dict[str, ExpansionData] = {
    "tau2": ExpansionData(R=_f(0, "-1/2", "1/8"), Q=_f(0, "-1/2"), T=_f("-1/4", 1)),
    "tau3": ExpansionData(R=_f(0, "-2/3", "1/9", "2/81"), Q=_f(0, "-1/9", "-2/3"), T=_f("-2/9", "1/3", 1)),
    "tau3_fi": ExpansionData(R=_f(0, 0, "-1/3"), Q=_f(0, "-1/3"), T=_f(0, 1)),
    "tau3_free": ExpansionData(R=_f(0, "-2/3", "4/9", "-16/81"), Q=_f(0, "2/9", "-2/3"), T=_f("4/9", "-2/3", 1)),
}

TAU2 = SpeciesSpec.from_terms({1: 1, 2: Fraction(1, 2)}, "tau2")
TAU3 = SpeciesSpec.from_terms({1: 1, 2: 1, 3: Fraction(1, 3)}, "tau3")
TAU3_FI = SpeciesSpec.from_terms({1: 1, 3: Fraction(1, 3)}, "tau3_fi")
TAU2_FREE = SpeciesSpec.from_terms({2: Fraction(1, 2)}, "tau2_free")
TAU3_FREE = SpeciesSpec.from_terms({2: 1, 3: Fraction(1, 3)}, "tau3_free")
TAU3_FREE_FI = SpeciesSpec.from_terms({3: Fraction(1, 3)}, "tau3_free_fi")


# ---------------------------------------------------------------------------
# Exact counting
# ---------------------------------------------------------------------------

def count_sequence(spec: SpeciesSpec, N: int) -> List[int]:
    """
    a_0..a_N by a_n = sum_i (n-1)^(i-1 falling) * i * s_i * a_{n-i}

    The term equals C(n-1, i-1) * shape_count(i) * a_{n-i}, an integer.
    """
    a = [1] + [0] * N
    shapes = [(i, spec.shape_count(i)) for i in spec.support]
    for n in range(1, N + 1):
        total = 0
        for i, count in shapes:
            if i > n:
                break
            total += math.comb(n - 1, i - 1) * count * a[n - i]
        a[n] = total
    return a


def exponential_series(spec: SpeciesSpec, N: int) -> List[Fraction]:
    """[z^n] exp(S(z)) for n <= N by direct power-series exponentiation"""
    # B' = S' B
    ds = [Fraction(0)] * (N + 1)
    for i in spec.support:
        if i - 1 <= N:
            ds[i - 1] = i * spec.s(i)
    b = [Fraction(1)] + [Fraction(0)] * N
    for n in range(1, N + 1):
        b[n] = sum(ds[k] * b[n - 1 - k] for k in range(n)) / n
    return b


# ---------------------------------------------------------------------------
# Saddle point asymptotics
# ---------------------------------------------------------------------------

def _require_aperiodic(spec: SpeciesSpec, allow_periodic: bool):
    if not spec.aperiodic and not allow_periodic:
        raise DegenerateSpeciesError(
            f"{spec.name or spec} has period {spec.period}; re-index n before estimating"
        )


def saddle_point(spec: SpeciesSpec, n: float) -> float:
    """
    Least positive root c_n of z S'(z) = n

    z S'(z) is increasing on (0, inf) and c_n <= (n / (d s_d))^(1/d),
    so bisection on that interval always converges.
    """
    if n <= 0:
        raise ValueError("saddle point requires n > 0")
    d = spec.degree
    upper = (n / (d * float(spec.s(d)))) ** (1.0 / d)
    zs = spec.polynomial.deriv() * np.polynomial.Polynomial([0.0, 1.0])
    f = lambda z: zs(z) - n
    if f(upper) == 0:
        return upper
    return bisect(f, 0.0, upper, xtol=1e-15 * upper, rtol=SADDLE_RTOL, maxiter=400)


def log_asymptotic_estimate(spec: SpeciesSpec, n: int, allow_periodic: bool = False) -> float:
    """log of e^S(c) / (sqrt(2 pi lambda(c)) c^n), lambda = z^2 S'' + z S'"""
    _require_aperiodic(spec, allow_periodic)
    c = saddle_point(spec, n)
    poly = spec.polynomial
    lam = c * c * poly.deriv(2)(c) + c * poly.deriv()(c)
    return float(poly(c) - n * math.log(c) - 0.5 * math.log(2 * math.pi * lam))


def asymptotic_estimate(spec: SpeciesSpec, n: int, allow_periodic: bool = False) -> float:
    """
    Saddle-point estimate of [z^n] exp(S(z))

    Periodic classes are refused unless ``allow_periodic``; the estimate
    then ignores that the exact coefficient vanishes off the period.
    """
    return math.exp(log_asymptotic_estimate(spec, n, allow_periodic))


def _poly_eval(coefficients: Sequence[Fraction], x: float) -> float:
    return float(np.polynomial.polynomial.polyval(x, [float(c) for c in coefficients]))


def expansion_data(spec: SpeciesSpec) -> ExpansionData:
    try:
        return EXPANSIONS[spec.name]
    except KeyError:
        raise DegenerateSpeciesError(f"No tabulated expansion for {spec.name or spec}") from None


def expansion_saddle_point(spec: SpeciesSpec, n: int) -> float:
    """(n / (d s_d))^(1/d) * (1 + R(n^(-1/d)))"""
    d = spec.degree
    data = expansion_data(spec)
    base = (n / (d * float(spec.s(d)))) ** (1.0 / d)
    return base * (1.0 + _poly_eval(data.R, n ** (-1.0 / d)))


def log_expansion_estimate(spec: SpeciesSpec, n: int) -> float:
    """log of (2 pi d n)^(-1/2) n^(-n/d) exp(n/d (1 + log(d s_d)) + T(n^(1/d)))"""
    _require_aperiodic(spec, False)
    d = spec.degree
    data = expansion_data(spec)
    ds = d * float(spec.s(d))
    return (-0.5 * math.log(2 * math.pi * d * n) - (n / d) * math.log(n)
            + (n / d) * (1 + math.log(ds)) + _poly_eval(data.T, n ** (1.0 / d)))


# ---------------------------------------------------------------------------
# Component statistics
# ---------------------------------------------------------------------------

def _kappa(spec: SpeciesSpec, t: int) -> float:
    st = spec.s(t)
    if st <= 0:
        raise DegenerateSpeciesError(f"s_{t} = 0: no component of size {t}")
    d = spec.degree
    return float(st) * (d * float(spec.s(d))) ** (-t / d)


def expected_components(spec: SpeciesSpec, t: int, n: float) -> float:
    """Asymptotic mean number of size-t components: s_t (d s_d)^(-t/d) n^(t/d)"""
    return _kappa(spec, t) * n ** (t / spec.degree)


def exact_expected_components(spec: SpeciesSpec, t: int, n: int,
                              counts: Optional[Sequence[int]] = None) -> Fraction:
    """Exact mean number of size-t components: C(n, t) (t! s_t) a_{n-t} / a_n"""
    if spec.s(t) <= 0:
        raise DegenerateSpeciesError(f"s_{t} = 0: no component of size {t}")
    a = counts if counts is not None and len(counts) > n else count_sequence(spec, n)
    if a[n] == 0:
        raise ValueError(f"no structure of size {n}")
    if t > n:
        return Fraction(0)
    return Fraction(math.comb(n, t) * spec.shape_count(t) * a[n - t], a[n])


def rate_function(spec: SpeciesSpec, t: int, r: float) -> float:
    """f(r) = (r - 1) s_t (d s_d)^(-t/d) - r log r"""
    if r <= 0:
        raise ValueError("rate function requires r > 0")
    return (r - 1) * _kappa(spec, t) - r * math.log(r)


def tail_thresholds(spec: SpeciesSpec, t: int) -> Tuple[float, float]:
    """
    (lambda_0, mu_0): f < 0 on (0, lambda_0) and on (mu_0, inf)

    f is concave with f(1) = 0; its other root lies below 1 when
    kappa < 1 and above 1 when kappa > 1.
    """
    kappa = _kappa(spec, t)
    f = lambda r: rate_function(spec, t, r)
    peak = math.exp(kappa - 1)
    if abs(kappa - 1) < 1e-12:
        return 1.0, 1.0
    if kappa < 1:
        return bisect(f, 1e-300, peak, rtol=SADDLE_RTOL, maxiter=2000), 1.0
    upper = 2 * peak
    while f(upper) >= 0:
        upper *= 2
    return 1.0, bisect(f, peak, upper, rtol=SADDLE_RTOL, maxiter=2000)


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def sample_multiset(spec: SpeciesSpec, n: int, rng, counts: Optional[Sequence[int]] = None) -> List[Component]:
    """
    Uniform SET(S) structure on {0..n-1}

    Component sizes come from the recursive method, each size-i component
    takes one of its i! s_i shapes uniformly, blocks of consecutive labels
    are then relabeled by a uniform permutation. Returns (shape, labels)
    pairs.
    """
    a = counts if counts is not None and len(counts) > n else count_sequence(spec, n)
    if a[n] == 0:
        raise InvalidSizeError(f"no {spec.name or 'structure'} of size {n}")

    shapes = [(i, spec.shape_count(i)) for i in spec.support]
    blocks: List[Tuple[int, int]] = []
    remaining = n
    while remaining > 0:
        x = rng.uniform_bigint(a[remaining])
        for i, count in shapes:
            if i > remaining:
                raise TableCorruptionError(f"recursive method overran a[{remaining}]")
            weight = math.comb(remaining - 1, i - 1) * count * a[remaining - i]
            if x <= weight:
                blocks.append((i, rng.randbelow(count)))
                remaining -= i
                break
            x -= weight
        else:
            raise TableCorruptionError(f"recursive method overran a[{remaining}]")

    labels = rng.permutation(n)
    components: List[Component] = []
    start = 0
    for size, shape in blocks:
        components.append((shape, tuple(labels[start:start + size])))
        start += size
    return components


# ---------------------------------------------------------------------------
# Bender transfer and connected / all transfers
# ---------------------------------------------------------------------------

def bender_coefficients(A: Sequence[Rational]) -> List[Fraction]:
    """b_0..b_{s-1}: coefficients of 1 / (1 + A_1 z + ... + A_{s-1} z^{s-1})"""
    A = [Fraction(0)] + [Fraction(x) for x in A]
    b = [Fraction(1)]
    for k in range(1, len(A)):
        b.append(-sum(A[j] * b[k - j] for j in range(1, k + 1)))
    return b


def _poly_mul(p: Sequence[int], q: Sequence[int]) -> List[int]:
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        if x:
            for j, y in enumerate(q):
                out[i + j] += x * y
    return out


def _poly_add(p: List[int], q: Sequence[int], scale: int = 1) -> List[int]:
    if len(q) > len(p):
        p = p + [0] * (len(q) - len(p))
    for i, y in enumerate(q):
        p[i] += scale * y
    return p


def _trim_zeros(p: List[int]) -> List[int]:
    while p and p[-1] == 0:
        p.pop()
    return p


def connected_transfer(table: Sequence, markers: int = 0) -> List:
    """
    Factorial-scaled coefficients of log(1 + A~) from those of A~

    g(n) = g~(n) - sum_{m=1}^{n-1} C(n-1, m-1) g(m) g~(n-m); with one marker
    every entry is a coefficient list in the marker and products convolve.
    """
    if markers not in (0, 1):
        raise ValueError("markers must be 0 or 1")
    N = len(table) - 1
    if markers == 0:
        if N >= 0 and table[0]:
            raise ValueError("A~ must have no empty structure")
        g = [0] * (N + 1)
        for n in range(1, N + 1):
            acc = table[n]
            for m in range(1, n):
                if g[m] and table[n - m]:
                    acc -= math.comb(n - 1, m - 1) * g[m] * table[n - m]
            g[n] = acc
        return g

    if N >= 0 and any(table[0]):
        raise ValueError("A~ must have no empty structure")
    g: List[List[int]] = [[] for _ in range(N + 1)]
    for n in range(1, N + 1):
        acc = list(table[n])
        for m in range(1, n):
            acc = _poly_add(acc, _poly_mul(g[m], table[n - m]), -math.comb(n - 1, m - 1))
        g[n] = _trim_zeros(acc)
    return g


def exponential_transfer(table: Sequence, markers: int = 0) -> List:
    """Inverse of connected_transfer: coefficients of exp(A) - 1"""
    if markers not in (0, 1):
        raise ValueError("markers must be 0 or 1")
    N = len(table) - 1
    if markers == 0:
        out = [0] * (N + 1)
        for n in range(1, N + 1):
            acc = table[n]
            for m in range(1, n):
                acc += math.comb(n - 1, m - 1) * table[m] * out[n - m]
            out[n] = acc
        return out

    out: List[List[int]] = [[] for _ in range(N + 1)]
    for n in range(1, N + 1):
        acc = list(table[n])
        for m in range(1, n):
            acc = _poly_add(acc, _poly_mul(table[m], out[n - m]), math.comb(n - 1, m - 1))
        out[n] = _trim_zeros(acc)
    return out


def moment_transfer(moments: Sequence[int], totals: Sequence[int]) -> List[int]:
    """
    Marker-moment counterpart of connected_transfer

    Given m~(n) = sum_l l g~(n, l) and g~(n) = sum_l g~(n, l), returns
    m(n) = sum_l l g(n, l) by m(n) = m~(n) - sum_{j=1}^{n-1} C(n, j) m(j) g~(n-j).
    """
    N = len(moments) - 1
    m = [0] * (N + 1)
    for n in range(1, N + 1):
        acc = moments[n]
        for j in range(1, n):
            if m[j] and totals[n - j]:
                acc -= math.comb(n, j) * m[j] * totals[n - j]
        m[n] = acc
    return m
