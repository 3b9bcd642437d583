"""
Coprimality Constants

Exact-rational pipeline, decimals only at rendering:
- F1, F2 and their starred forms F1*, F2* (multiplicative)
- Generic Euler product C = prod_l (1 - F1(l)) with a certified tail interval
- Closed-form f(d) and the four-case ratio R for Serre pairs
- Extremal search over all admissible level pairs
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, prod
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import mpmath as mp
import numpy as np

from .arith import factor_or_raise, mobius, mobius_table, odd_part, sieve_primes
from .config import get_settings
from .errors import DomainError, NotSerrePair
from .output import log_info

# Sharp ratio bounds over all Serre pairs
RATIO_MIN_PAIR = (70, 210)
RATIO_MAX_PAIR = (6, 10)
RATIO_MIN = Fraction(5014419112, 5014521525)
RATIO_MAX = Fraction(1150648, 1118065)


@lru_cache(maxsize=None)
def _F1_prime(ell: int) -> Fraction:
    return Fraction((ell + 2) * (ell * ell - ell - 1), (ell - 1) ** 3 * (ell + 1) ** 2)


@lru_cache(maxsize=None)
def _F2_prime(ell: int) -> Fraction:
    return Fraction(-(2 * ell + 1), (ell - 1) ** 3 * (ell + 1) ** 2)


def _F1_star_prime(ell: int) -> Fraction:
    f = _F1_prime(ell)
    return f / (1 - f)


def _F2_star_prime(ell: int) -> Fraction:
    return -_F2_prime(ell) / (1 - _F1_prime(ell))


def _squarefree_primes(d: int) -> List[int]:
    if d < 1:
        raise DomainError(f"expected a positive squarefree integer, got {d}")
    if d == 1:
        return []
    fac = factor_or_raise(d)
    if not fac.is_squarefree:
        raise DomainError(f"{d} is not squarefree")
    return fac.primes


def _product(primes: Iterable[int], local: Callable[[int], Fraction]) -> Fraction:
    out = Fraction(1)
    for ell in primes:
        out *= local(ell)
    return out


@lru_cache(maxsize=None)
def F1(d: int) -> Fraction:
    return _product(_squarefree_primes(d), _F1_prime)


@lru_cache(maxsize=None)
def F2(d: int) -> Fraction:
    return _product(_squarefree_primes(d), _F2_prime)


@lru_cache(maxsize=None)
def F1_star(n: int) -> Fraction:
    return _product(_squarefree_primes(n), _F1_star_prime)


@lru_cache(maxsize=None)
def F2_star(n: int) -> Fraction:
    return _product(_squarefree_primes(n), _F2_star_prime)


def star_denominator(ell: int) -> int:
    """l^5 - l^4 - 3l^3 + l^2 + 4l + 1, the common denominator of F1*(l) and F2*(l)."""
    return ell**5 - ell**4 - 3 * ell**3 + ell**2 + 4 * ell + 1


def validate_level(m: int) -> Tuple[int, ...]:
    """Even, at least 6, odd part squarefree, at most 2^3 dividing it. Returns the primes of m."""
    if m < 6 or m % 2:
        raise DomainError(f"level {m} must be even and at least 6")
    if m % 16 == 0:
        raise DomainError(f"level {m} is divisible by 16")
    t = odd_part(m)
    if t == 1:
        return (2,)
    fac = factor_or_raise(t)
    if not fac.is_squarefree:
        raise DomainError(f"level {m} has a non-squarefree odd part")
    return (2, *fac.primes)


@dataclass(frozen=True)
class SerrePairProfile:
    """
    Levels of a Serre pair with m = gcd, M = lcm and m' = M / m.

    The primes of m1 and m2 are kept so that m, m' and M are never factored
    again; the products can outgrow trial division even when each level
    factors.
    """

    m1: int
    m2: int
    m: int
    m_prime: int
    M: int
    four_divides_m1: bool
    four_divides_m2: bool
    primes1: Tuple[int, ...] = ()
    primes2: Tuple[int, ...] = ()

    @classmethod
    def from_levels(cls, m1: int, m2: int) -> "SerrePairProfile":
        primes1 = validate_level(m1)
        primes2 = validate_level(m2)
        if m1 == m2:
            raise NotSerrePair(f"equal adelic levels m1 = m2 = {m1}")
        m = gcd(m1, m2)
        M = m1 * m2 // m
        return cls(m1=m1, m2=m2, m=m, m_prime=M // m, M=M,
                   four_divides_m1=m1 % 4 == 0, four_divides_m2=m2 % 4 == 0,
                   primes1=primes1, primes2=primes2)

    @property
    def both_squarefree(self) -> bool:
        return not (self.four_divides_m1 or self.four_divides_m2)

    @property
    def primes_M(self) -> Tuple[int, ...]:
        return tuple(sorted(set(self.primes1) | set(self.primes2)))

    @property
    def primes_m(self) -> Tuple[int, ...]:
        return tuple(p for p in self.primes_M if self.m % p == 0)

    @property
    def primes_m_prime(self) -> Tuple[int, ...]:
        return tuple(p for p in self.primes_M if self.m_prime % p == 0)

    @property
    def mu_m(self) -> int:
        """Möbius of m from its primes."""
        if any(self.m % (p * p) == 0 for p in self.primes_m):
            return 0
        return -1 if len(self.primes_m) % 2 else 1

    def primes_of(self, d: int) -> List[int]:
        """Primes of a squarefree divisor d of M."""
        if d < 1 or self.M % d:
            raise DomainError(f"d={d} does not divide M={self.M}")
        primes = [p for p in self.primes_M if d % p == 0]
        if any(d % (p * p) == 0 for p in primes):
            raise DomainError(f"{d} is not squarefree")
        return primes

    def squarefree_divisors(self) -> List[int]:
        """Squarefree divisors of M, ascending."""
        divisors = [1]
        for p in self.primes_M:
            divisors += [d * p for d in divisors]
        return sorted(divisors)


@dataclass(frozen=True)
class GenericConstant:
    """P = prod_{l <= cutoff} (1 - F1(l)) and the certified interval [low, high] for C."""

    cutoff: int
    value: mp.mpf
    low: mp.mpf
    high: mp.mpf
    heuristic: mp.mpf
    tail_bound_validated: bool
    digits: int

    @property
    def width(self) -> mp.mpf:
        return self.high - self.low

    def render(self, x: mp.mpf) -> str:
        return mp.nstr(x, self.digits)


def classical_coprime_density() -> mp.mpf:
    return 6 / mp.pi**2


def generic_constant(cutoff: Optional[int] = None, digits: Optional[int] = None) -> GenericConstant:
    """
    Euler product up to cutoff with certified tail.

    F1(l) <= 2/l^2 (checked for every l <= cutoff, and the gap only widens
    beyond), so sum_{l > cutoff} F1(l) < 2/cutoff =: S and
    log(1 - x) >= -2x gives C in [P exp(-2S), P].
    """
    settings = get_settings().constants
    cutoff = cutoff or settings.cutoff
    digits = digits or settings.render_digits
    if cutoff < 11:
        raise DomainError(f"cutoff must be at least 11, got {cutoff}")
    return _generic_constant(cutoff, digits, settings.precision_digits)


@lru_cache(maxsize=8)
def _generic_constant(cutoff: int, digits: int, precision: int) -> GenericConstant:
    mp.mp.dps = precision
    product = mp.mpf(1)
    validated = True
    for ell in sieve_primes(cutoff):
        num = (ell + 2) * (ell * ell - ell - 1)
        den = (ell - 1) ** 3 * (ell + 1) ** 2
        if num * ell * ell > 2 * den:
            validated = False
        product *= mp.mpf(den - num) / den

    tail = mp.mpf(2) / cutoff
    low = product * mp.exp(-2 * tail)
    heuristic = product * mp.exp(-1 / (cutoff * mp.log(cutoff)))
    return GenericConstant(cutoff=cutoff, value=product, low=low, high=product,
                           heuristic=heuristic, tail_bound_validated=validated, digits=digits)


def _local_ratio(primes: Iterable[int]) -> Fraction:
    """F2(n) / F1(n) over the given primes of n."""
    return _product(primes, lambda ell: _F2_prime(ell) / _F1_prime(ell))


def f_closed(d: int, profile: SerrePairProfile) -> Fraction:
    """Closed-form f(d) for squarefree d | M."""
    base = _product(profile.primes_of(d), _F1_prime)
    m1_divides = d % profile.m1 == 0
    m2_divides = d % profile.m2 == 0
    factor = Fraction(1)
    if m1_divides:
        factor += Fraction(2, 5) * _local_ratio(profile.primes1)
    if m2_divides:
        factor += Fraction(2, 5) * _local_ratio(profile.primes2)
    if m1_divides and m2_divides:
        factor += Fraction(1, 4) * _local_ratio(profile.primes_m_prime)
    return factor * base


def ratio_theorem(profile: SerrePairProfile) -> Fraction:
    if profile.four_divides_m1 and profile.four_divides_m2:
        return Fraction(1)
    F2_star_m1 = _product(profile.primes1, _F2_star_prime)
    F2_star_m2 = _product(profile.primes2, _F2_star_prime)
    if profile.four_divides_m2:
        return 1 + Fraction(2, 5) * F2_star_m1
    if profile.four_divides_m1:
        return 1 + Fraction(2, 5) * F2_star_m2
    return (1 + Fraction(2, 5) * F2_star_m1 + Fraction(2, 5) * F2_star_m2
            + Fraction(profile.mu_m, 4) * _product(profile.primes_m, _F1_star_prime)
            * _product(profile.primes_m_prime, _F2_star_prime))


def finite_sum(profile: SerrePairProfile) -> Fraction:
    """sum_{d | M} mu(d) f(d) over the squarefree divisors of M."""
    total = Fraction(0)
    for d in profile.squarefree_divisors():
        sign = -1 if len(profile.primes_of(d)) % 2 else 1
        total += sign * f_closed(d, profile)
    return total


def local_factor(M: int, primes: Optional[Iterable[int]] = None) -> Fraction:
    """prod_{l | M} (1 - F1(l))."""
    if primes is None:
        primes = factor_or_raise(M).primes
    return _product(primes, lambda ell: 1 - _F1_prime(ell))


def ratio_direct(profile: SerrePairProfile) -> Fraction:
    return finite_sum(profile) / local_factor(profile.M, profile.primes_M)


@dataclass(frozen=True)
class ConstantBreakdown:
    profile: SerrePairProfile
    finite_sum: Fraction
    ratio: Fraction
    routes_agree: bool
    generic: GenericConstant

    @property
    def value(self) -> mp.mpf:
        return self._scale(self.generic.value)

    @property
    def low(self) -> mp.mpf:
        return self._scale(self.generic.low)

    @property
    def high(self) -> mp.mpf:
        return self._scale(self.generic.high)

    def _scale(self, x: mp.mpf) -> mp.mpf:
        return x * self.ratio.numerator / self.ratio.denominator


def serre_pair_constant(profile: SerrePairProfile, cutoff: Optional[int] = None) -> ConstantBreakdown:
    ratio = ratio_theorem(profile)
    direct = ratio_direct(profile)
    return ConstantBreakdown(
        profile=profile,
        finite_sum=finite_sum(profile),
        ratio=ratio,
        routes_agree=ratio == direct,
        generic=generic_constant(cutoff),
    )


@dataclass(frozen=True)
class TableConstant:
    M: int
    finite_sum: Fraction
    value: mp.mpf
    low: mp.mpf
    high: mp.mpf


def constant_from_table(table: Dict[int, Fraction], M: int, cutoff: Optional[int] = None) -> TableConstant:
    """(sum_{d | M} mu(d) f(d)) * prod_{l not dividing M} (1 - F1(l)) from user-supplied f."""
    if M < 1:
        raise DomainError(f"M must be positive, got {M}")
    total = Fraction(0)
    for d in factor_or_raise(M).squarefree_divisors():
        if d not in table:
            raise DomainError(f"table is missing f({d})")
        total += mobius(d) * Fraction(table[d])
    generic = generic_constant(cutoff)
    scale = total / local_factor(M)
    num, den = scale.numerator, scale.denominator
    return TableConstant(M=M, finite_sum=total, value=generic.value * num / den,
                         low=min(generic.low * num / den, generic.high * num / den),
                         high=max(generic.low * num / den, generic.high * num / den))


def deviation_terms(profile: SerrePairProfile) -> Fraction:
    """1/rad(m1)^3 + 1/rad(m2)^3 + 1/min(rad m1, rad m2)."""
    r1 = prod(profile.primes1)
    r2 = prod(profile.primes2)
    return Fraction(1, r1**3) + Fraction(1, r2**3) + Fraction(1, min(r1, r2))


def star_bounds_hold(limit: int) -> bool:
    """F1*(l) <= 1/l for 3 <= l <= limit and F2*(l) <= 1/l^3 for 5 <= l <= limit."""
    for ell in sieve_primes(limit):
        if ell >= 3 and F1_star(ell) > Fraction(1, ell):
            return False
        if ell >= 5 and F2_star(ell) > Fraction(1, ell**3):
            return False
    return True


def star_monotone(limit: int) -> bool:
    """F1* and F2* strictly decrease along the primes up to limit."""
    primes = list(sieve_primes(limit))
    for a, b in zip(primes, primes[1:]):
        if not (F1_star(b) < F1_star(a) and F2_star(b) < F2_star(a)):
            return False
    return True


def star_ordering_holds(limit: int) -> bool:
    """
    F*(p t) < F*(q) for primes p > q and squarefree t coprime to p, and
    F*(2t) <= F*(6) for odd squarefree t >= 3, both starred functions,
    with p, q, t <= limit.
    """
    primes = list(sieve_primes(limit))
    mu = mobius_table(limit)
    squarefree = [t for t in range(1, limit + 1) if mu[t] != 0]
    for star in (F1_star, F2_star):
        for i, p in enumerate(primes):
            for q in primes[:i]:
                for t in squarefree:
                    if t % p == 0:
                        continue
                    if not star(p * t) < star(q):
                        return False
        for t in squarefree:
            if t >= 3 and t % 2 == 1 and star(2 * t) > star(6):
                return False
    return True


def admissible_levels(bound: int) -> List[int]:
    """Levels of Serre curves up to bound: 2|D| if D = 1 mod 4 else 4|D|, D squarefree, D != +-1."""
    mu = mobius_table(bound)
    levels = set()
    for t in range(3, bound // 2 + 1, 2):
        if mu[t] != 0:
            levels.add(2 * t)
            if 4 * t <= bound:
                levels.add(4 * t)
    for t in range(1, bound // 8 + 1, 2):
        if mu[t] != 0:
            levels.add(8 * t)
    return sorted(levels)


@dataclass(frozen=True)
class BoundsResult:
    level_bound: int
    pair_count: int
    ratio_one_count: int
    min_ratio: Fraction
    min_pair: Tuple[int, int]
    max_ratio: Fraction
    max_pair: Tuple[int, int]
    outside: Tuple[Tuple[int, int], ...]


@dataclass
class _Extremes:
    count: int = 0
    ones: int = 0
    min_ratio: Optional[Fraction] = None
    min_pair: Tuple[int, int] = (0, 0)
    max_ratio: Optional[Fraction] = None
    max_pair: Tuple[int, int] = (0, 0)
    outside: Tuple[Tuple[int, int], ...] = ()

    def observe(self, pair: Tuple[int, int], r: Fraction):
        self.count += 1
        if r == 1 and pair[0] % 4 == 0 and pair[1] % 4 == 0:
            self.ones += 1
        elif not (RATIO_MIN <= r <= RATIO_MAX):
            self.outside += (pair,)
        self.observe_extreme(pair, r, pair, r)

    def merge(self, other: "_Extremes"):
        self.count += other.count
        self.ones += other.ones
        self.outside += other.outside
        if other.min_ratio is not None:
            self.observe_extreme(other.min_pair, other.min_ratio, other.max_pair, other.max_ratio)

    def observe_extreme(self, min_pair, min_ratio, max_pair, max_ratio):
        if self.min_ratio is None or min_ratio < self.min_ratio or (min_ratio == self.min_ratio and min_pair < self.min_pair):
            self.min_ratio, self.min_pair = min_ratio, min_pair
        if self.max_ratio is None or max_ratio > self.max_ratio or (max_ratio == self.max_ratio and max_pair < self.max_pair):
            self.max_ratio, self.max_pair = max_ratio, max_pair


def _scan_levels(args) -> _Extremes:
    first_levels, levels, bound = args
    arr = np.asarray(levels, dtype=np.int64)
    ext = _Extremes()
    for m1 in first_levels:
        partners = arr[arr > m1]
        partners = partners[np.lcm(m1, partners) <= bound]
        for m2 in partners.tolist():
            ext.observe((m1, m2), ratio_theorem(SerrePairProfile.from_levels(m1, m2)))
    return ext


def bounds_search(level_bound: int, workers: int = 1) -> BoundsResult:
    """Minimum and maximum of R over all admissible pairs with lcm <= level_bound."""
    if level_bound < 210:
        raise DomainError(f"level_bound must be at least 210, got {level_bound}")
    levels = admissible_levels(level_bound)
    log_info(f"bounds search: {len(levels)} admissible levels up to {level_bound}")

    slices = [levels[i::max(workers, 1)] for i in range(max(workers, 1))]
    tasks = [(s, levels, level_bound) for s in slices if s]
    total = _Extremes()
    if workers <= 1:
        for task in tasks:
            total.merge(_scan_levels(task))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_scan_levels, tasks):
                total.merge(part)

    return BoundsResult(
        level_bound=level_bound,
        pair_count=total.count,
        ratio_one_count=total.ones,
        min_ratio=total.min_ratio,
        min_pair=total.min_pair,
        max_ratio=total.max_ratio,
        max_pair=total.max_pair,
        outside=tuple(sorted(total.outside)),
    )
