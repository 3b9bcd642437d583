"""
Counts in GL2(Z/nZ) and Delta(Z/nZ) for squarefree n.

Per-prime tables come from full enumeration of GL2(Z/lZ); composite
squarefree moduli are assembled by CRT. The f oracle is built only from
these tables and never from the closed forms in the constants module.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Dict, List, Optional, Tuple

from ..arith import is_squarefree, jacobi, odd_part, prime_factors
from ..constants import F1, F2, validate_level
from ..errors import DomainError
from . import (
    CountTable,
    check_guard,
    delta_order,
    enumerate_gl2,
    units,
)
from .characters import check_psi_level, psi_prime, psi_value


@dataclass(frozen=True)
class PrimeCounts:
    """Matrices mod l with det(I - M) = 0 and det M = alpha, split by psi_l."""

    total: int
    plus: int
    minus: int


@lru_cache(maxsize=None)
def _prime_table(ell: int) -> Dict[int, PrimeCounts]:
    totals: Dict[int, List[int]] = {alpha: [0, 0] for alpha in range(1, ell)}
    for M in enumerate_gl2(ell):
        if M.det_one_minus != 0:
            continue
        slot = 0 if psi_prime(M, ell) == 1 else 1
        totals[M.det][slot] += 1
    return {alpha: PrimeCounts(total=p + m, plus=p, minus=m) for alpha, (p, m) in totals.items()}


@lru_cache(maxsize=None)
def _det_histogram(n: int) -> Tuple[Tuple[int, int], ...]:
    hist: Dict[int, int] = {}
    for M in enumerate_gl2(n):
        hist[M.det] = hist.get(M.det, 0) + 1
    return tuple(sorted(hist.items()))


def _squarefree_primes(n: int) -> List[int]:
    if n < 1 or not is_squarefree(n):
        raise DomainError(f"modulus must be positive squarefree, got {n}")
    return prime_factors(n) if n > 1 else []


def _check_unit(alpha: int, n: int):
    if n > 1 and gcd(alpha, n) != 1:
        raise DomainError(f"alpha={alpha} is not a unit mod {n}")


def delta_order_squarefree(n: int) -> int:
    out = 1
    for ell in _squarefree_primes(n):
        out *= delta_order(ell)
    return out


def delta_order_bruteforce(n: int) -> int:
    """#{(M1, M2) in GL2(Z/nZ)^2 : det M1 = det M2} from the determinant histogram."""
    return sum(c * c for _, c in _det_histogram(n))


def delta_pairs_bruteforce(n: int, guard: Optional[int] = None) -> int:
    """Direct pair enumeration; only sensible for n in {2, 3, 6}."""
    check_guard(n * n, guard)
    mats = list(enumerate_gl2(n))
    return sum(1 for M1 in mats for M2 in mats if M1.det == M2.det)


def count_X_alpha(n: int, alpha: int) -> int:
    """#{M in GL2(Z/nZ) : det(I - M) = 0, det M = alpha}, by CRT over the primes of n."""
    primes = _squarefree_primes(n)
    _check_unit(alpha, n)
    out = 1
    for ell in primes:
        out *= _prime_table(ell)[alpha % ell].total
    return out


def x_alpha_table(n: int) -> CountTable:
    return CountTable(n=n, counts={alpha: count_X_alpha(n, alpha) for alpha in units(n)})


def x_alpha_table_bruteforce(n: int) -> CountTable:
    """Same table straight from enumerating GL2(Z/nZ), no CRT."""
    _squarefree_primes(n)
    counts: Dict[int, int] = {alpha: 0 for alpha in units(n)}
    for M in enumerate_gl2(n):
        if M.det_one_minus == 0:
            counts[M.det] += 1
    return CountTable(n=n, counts=counts)


def count_B(ell: int) -> int:
    """|B_l| = #{(M1, M2) in Delta(Z/lZ) : det(I - M1) = det(I - M2) = 0}."""
    return sum(c.total ** 2 for c in _prime_table(ell).values())


def count_B_pairs(ell: int, guard: Optional[int] = None) -> int:
    """|B_l| by enumerating pairs outright."""
    check_guard(ell * ell, guard)
    fixed = [M for M in enumerate_gl2(ell) if M.det_one_minus == 0]
    return sum(1 for M1 in fixed for M2 in fixed if M1.det == M2.det)


def _psi_plus(primes: List[int], alpha: int) -> int:
    plus_minus = 1
    plus_or_minus = 1
    for ell in primes:
        counts = _prime_table(ell)[alpha % ell]
        plus_or_minus *= counts.total
        plus_minus *= counts.plus - counts.minus
    return (plus_or_minus + plus_minus) // 2


def count_psi_plus_X_alpha(n: int, alpha: int) -> int:
    """#(psi_n^{-1}(+1) meet X_n^alpha)."""
    check_psi_level(n)
    _check_unit(alpha, n)
    return _psi_plus(prime_factors(n), alpha)


def count_psi_plus_X_alpha_bruteforce(n: int, alpha: int) -> int:
    check_psi_level(n)
    _check_unit(alpha, n)
    return sum(
        1 for M in enumerate_gl2(n)
        if M.det == alpha % n and M.det_one_minus == 0 and psi_value(M, n) == 1
    )


def psi_plus_closed_form(n: int, alpha: int) -> Fraction:
    """|X|/2 - (alpha / n_odd) |X| / 4."""
    x = count_X_alpha(n, alpha)
    return Fraction(x, 2) - Fraction(jacobi(alpha, odd_part(n)) * x, 4)


@dataclass(frozen=True)
class CharSums:
    n: int
    r: int
    S: int
    T: int
    S_closed: Fraction
    T_closed: Fraction

    @property
    def agree(self) -> bool:
        return self.S == self.S_closed and self.T == self.T_closed


def char_sums(n: int, r: int) -> CharSums:
    """S(n) and T_r(n), per-alpha and via the closed forms."""
    _squarefree_primes(n)
    if r < 1 or n % r:
        raise DomainError(f"r={r} must divide n={n}")
    r_odd = odd_part(r)
    S = 0
    T = 0
    for alpha in units(n):
        x2 = count_X_alpha(n, alpha) ** 2
        S += x2
        T += jacobi(alpha, r_odd) * x2
    delta = delta_order_squarefree(n)
    S_closed = delta * F1(n)
    T_closed = delta * F1(n // r) * F2(r)
    if r % 2 == 0:
        T_closed *= Fraction(-4, 5)
    return CharSums(n=n, r=r, S=S, T=T, S_closed=S_closed, T_closed=T_closed)


def _kernel_count(alpha: int, d_primes: List[int], level_primes: Optional[List[int]]) -> int:
    """#(H ∩ X_d^alpha) with H the psi kernel at level_primes, or all of GL2 when None."""
    if level_primes is None:
        return count_X_alpha_from_primes(d_primes, alpha)
    rest = [ell for ell in d_primes if ell not in level_primes]
    return _psi_plus(level_primes, alpha) * count_X_alpha_from_primes(rest, alpha)


def count_X_alpha_from_primes(primes: List[int], alpha: int) -> int:
    out = 1
    for ell in primes:
        out *= _prime_table(ell)[alpha % ell].total
    return out


def f_oracle(d: int, m1: int, m2: int) -> Fraction:
    """
    f(d) = sum_alpha c1(alpha) c2(alpha) / |G(d)|.

    c_i(alpha) counts X_d^alpha inside the psi kernel at level m_i when
    m_i | d, and inside all of GL2(Z/dZ) otherwise; |G(d)| is |Delta(Z/dZ)|
    divided by 2 for each level dividing d.
    """
    validate_level(m1)
    validate_level(m2)
    M = lcm(m1, m2)
    if d < 1 or M % d:
        raise DomainError(f"d={d} does not divide lcm(m1, m2) = {M}")
    d_primes = _squarefree_primes(d)

    level_primes = []
    halvings = 0
    for m in (m1, m2):
        if d % m == 0:
            level_primes.append(prime_factors(m))
            halvings += 1
        else:
            level_primes.append(None)

    total = 0
    for alpha in units(d):
        c1 = _kernel_count(alpha, d_primes, level_primes[0])
        c2 = _kernel_count(alpha, d_primes, level_primes[1])
        total += c1 * c2
    return Fraction(total * 2**halvings, delta_order_squarefree(d))
