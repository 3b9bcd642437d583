"""
Elementary Arithmetic

- Segmented odd-only prime sieve (numpy), memory bounded by segment size
- Factorization: trial division plus a deterministic 64-bit primality test
- Möbius function, Jacobi / Kronecker symbols, signed squarefree part
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterator, List, Optional, Tuple, Union

import gmpy2
import numpy as np
from sympy import isprime

from .config import get_settings
from .errors import DomainError, Unfactorable

U64 = 2**64


def simple_sieve(limit: int) -> np.ndarray:
    """All primes <= limit as an int64 array (plain Eratosthenes)."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, int(gmpy2.isqrt(limit)) + 1):
        if is_prime[p]:
            is_prime[p * p: limit + 1: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


@lru_cache(maxsize=8)
def small_primes(bound: int) -> Tuple[int, ...]:
    """Cached primes <= bound, used for trial division."""
    return tuple(simple_sieve(bound).tolist())


def primes_in_range(lo: int, hi: int, segment_size: int = 2**20) -> Iterator[np.ndarray]:
    """
    Yield ascending blocks of the primes p with lo <= p <= hi.

    Each block sieves at most segment_size odd candidates, so memory
    does not grow with hi.
    """
    if segment_size < 1:
        raise DomainError("segment_size must be positive")
    lo = max(lo, 2)
    if hi < lo:
        return
    if lo == 2:
        yield np.array([2], dtype=np.int64)

    base = [p for p in simple_sieve(int(gmpy2.isqrt(hi))).tolist() if p != 2]

    start = lo if lo % 2 == 1 else lo + 1
    start = max(start, 3)
    while start <= hi:
        end = min(start + 2 * (segment_size - 1), hi)
        count = (end - start) // 2 + 1
        mask = np.ones(count, dtype=bool)
        for p in base:
            p2 = p * p
            if p2 > end:
                break
            first = max(p2, ((start + p - 1) // p) * p)
            if first % 2 == 0:
                first += p
            if first > end:
                continue
            mask[(first - start) // 2:: p] = False
        block = start + 2 * np.flatnonzero(mask).astype(np.int64)
        if block.size:
            yield block
        start = end + 2


@dataclass(frozen=True)
class PrimeSieve:
    """Segmented enumeration of the primes <= limit; limit < 2 is simply empty."""

    limit: int
    segment_size: int = 2**20

    def segments(self) -> Iterator[np.ndarray]:
        return primes_in_range(2, self.limit, self.segment_size)

    def __iter__(self) -> Iterator[int]:
        for block in self.segments():
            yield from block.tolist()

    def count(self) -> int:
        return sum(int(block.size) for block in self.segments())


def sieve_primes(limit: int, segment_size: Optional[int] = None) -> PrimeSieve:
    if segment_size is None:
        segment_size = get_settings().arith.segment_size
    return PrimeSieve(limit=limit, segment_size=segment_size)


@dataclass(frozen=True)
class FactoredInteger:
    """sign * prod(p**e) with distinct ascending primes."""

    sign: int
    factors: Tuple[Tuple[int, int], ...] = ()

    @property
    def value(self) -> int:
        out = self.sign
        for p, e in self.factors:
            out *= p**e
        return out

    @property
    def primes(self) -> List[int]:
        return [p for p, _ in self.factors]

    @property
    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    @property
    def squarefree_part(self) -> int:
        out = self.sign
        for p, e in self.factors:
            if e % 2:
                out *= p
        return out

    @property
    def radical(self) -> int:
        out = 1
        for p, _ in self.factors:
            out *= p
        return out

    def divisors(self) -> List[int]:
        """All positive divisors, ascending."""
        divs = [1]
        for p, e in self.factors:
            divs = [d * p**k for d in divs for k in range(e + 1)]
        return sorted(divs)

    def squarefree_divisors(self) -> List[int]:
        primes = self.primes
        out = []
        for k in range(len(primes) + 1):
            for combo in combinations(primes, k):
                d = 1
                for p in combo:
                    d *= p
                out.append(d)
        return sorted(out)


@dataclass(frozen=True)
class Incomplete:
    """Partial factorization; cofactor has no prime factor <= the trial bound and is not a certified prime."""

    n: int
    factors: Tuple[Tuple[int, int], ...]
    cofactor: int


def factorize(n: int, trial_bound: Optional[int] = None) -> Union[FactoredInteger, Incomplete]:
    if n == 0:
        raise DomainError("cannot factor 0")
    if trial_bound is None:
        trial_bound = get_settings().arith.trial_bound

    sign = -1 if n < 0 else 1
    m = abs(int(n))
    factors: List[Tuple[int, int]] = []
    reached_sqrt = False

    for p in small_primes(trial_bound):
        if p * p > m:
            reached_sqrt = True
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors.append((p, e))

    if m > 1:
        if reached_sqrt or m <= trial_bound or m < (trial_bound + 1) ** 2:
            factors.append((m, 1))
        elif m < U64 and isprime(m):
            factors.append((m, 1))
        elif gmpy2.is_square(m) and int(gmpy2.isqrt(m)) < U64 and isprime(int(gmpy2.isqrt(m))):
            factors.append((int(gmpy2.isqrt(m)), 2))
        else:
            return Incomplete(n=n, factors=tuple(factors), cofactor=m)

    return FactoredInteger(sign=sign, factors=tuple(sorted(factors)))


def factor_or_raise(n: int, trial_bound: Optional[int] = None) -> FactoredInteger:
    result = factorize(n, trial_bound)
    if isinstance(result, Incomplete):
        raise Unfactorable(n, result.cofactor)
    return result


def mobius(n: int) -> int:
    if n < 1:
        raise DomainError(f"mobius needs n >= 1, got {n}")
    fac = factor_or_raise(n)
    if not fac.is_squarefree:
        return 0
    return -1 if len(fac.factors) % 2 else 1


def mobius_table(limit: int) -> np.ndarray:
    """μ(0..limit) as an int8 array (μ(0) is set to 0)."""
    mu = np.ones(limit + 1, dtype=np.int8)
    mu[0] = 0
    for p in simple_sieve(limit).tolist():
        mu[p::p] *= -1
        mu[p * p::p * p] = 0
    return mu


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd n >= 1 (gmpy2 reciprocity kernel)."""
    if n < 1 or n % 2 == 0:
        raise DomainError(f"jacobi needs odd positive n, got {n}")
    return int(gmpy2.jacobi(a, n))


def legendre(a: int, p: int) -> int:
    """Legendre symbol for an odd prime p (gmpy2 kernel)."""
    return int(gmpy2.legendre(a, p))


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n) for any integer n."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    acc = 1
    if n < 0:
        n = -n
        if a < 0:
            acc = -acc
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5) and v % 2:
            acc = -acc
    return acc * jacobi(a, n)


def squarefree_part(n: int, trial_bound: Optional[int] = None) -> int:
    if n == 0:
        raise DomainError("squarefree part of 0 is undefined")
    return factor_or_raise(n, trial_bound).squarefree_part


def is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    return factor_or_raise(n).is_squarefree


def radical(n: int) -> int:
    if n == 0:
        raise DomainError("radical of 0 is undefined")
    return factor_or_raise(n).radical


def odd_part(n: int) -> int:
    while n % 2 == 0 and n:
        n //= 2
    return n


def squarefree_divisors(n: int) -> List[int]:
    return factor_or_raise(n).squarefree_divisors()


def prime_factors(n: int) -> List[int]:
    return factor_or_raise(n).primes
