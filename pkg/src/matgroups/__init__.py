"""
Matrix Groups mod n

Brute-force counting in GL2(Z/nZ) and in the determinant fiber product
Delta(Z/nZ) = {(M1, M2) : det M1 = det M2}:
- MatModN, the atom of every count
- SubgroupDescriptor: full GL2 or the kernel of psi at an even squarefree level
- CountTable: per-determinant counts
- characters: sign map epsilon and psi
- counting: X_n^alpha, B_l, psi-kernel counts, character sums, f oracle
"""

import itertools
from dataclasses import dataclass, field
from enum import Enum
from math import gcd
from typing import Dict, Iterator, Optional

from ..config import get_settings
from ..errors import DomainError, EnumerationTooLarge


@dataclass(frozen=True)
class MatModN:
    """[[a, b], [c, d]] with entries in Z/nZ."""

    n: int
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"modulus must be positive, got {self.n}")
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, getattr(self, name) % self.n)

    @classmethod
    def identity(cls, n: int) -> "MatModN":
        return cls(n, 1, 0, 0, 1)

    @property
    def entries(self):
        return (self.a, self.b, self.c, self.d)

    @property
    def det(self) -> int:
        return (self.a * self.d - self.b * self.c) % self.n

    @property
    def trace(self) -> int:
        return (self.a + self.d) % self.n

    @property
    def det_one_minus(self) -> int:
        """det(I - M) = 1 - tr M + det M."""
        return (1 - self.a - self.d + self.a * self.d - self.b * self.c) % self.n

    @property
    def is_invertible(self) -> bool:
        return gcd(self.det, self.n) == 1

    def reduce(self, m: int) -> "MatModN":
        if self.n % m != 0:
            raise DomainError(f"cannot reduce mod {m}: it does not divide {self.n}")
        return MatModN(m, self.a, self.b, self.c, self.d)

    def __matmul__(self, other: "MatModN") -> "MatModN":
        if other.n != self.n:
            raise DomainError("moduli differ")
        return MatModN(
            self.n,
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )


class SubgroupKind(Enum):
    FULL_GL2 = "FULL_GL2"
    PSI_KERNEL = "PSI_KERNEL"


@dataclass(frozen=True)
class SubgroupDescriptor:
    n: int
    kind: SubgroupKind = SubgroupKind.FULL_GL2
    level: Optional[int] = None

    @classmethod
    def full(cls, n: int) -> "SubgroupDescriptor":
        return cls(n=n)

    @classmethod
    def psi_kernel(cls, n: int, m: int) -> "SubgroupDescriptor":
        from .characters import check_psi_level
        check_psi_level(m)
        if n % m != 0:
            raise DomainError(f"level {m} does not divide modulus {n}")
        return cls(n=n, kind=SubgroupKind.PSI_KERNEL, level=m)

    @classmethod
    def for_level(cls, d: int, m: int) -> "SubgroupDescriptor":
        """Image of a Serre curve of level m inside GL2(Z/dZ) for squarefree d."""
        if d % m == 0:
            return cls.psi_kernel(d, m)
        return cls.full(d)

    def contains(self, M: MatModN) -> bool:
        if M.n != self.n or not M.is_invertible:
            return False
        if self.kind is SubgroupKind.FULL_GL2:
            return True
        from .characters import psi_value
        return psi_value(M, self.level) == 1


@dataclass(frozen=True)
class CountTable:
    """alpha -> count for alpha in (Z/nZ)^x."""

    n: int
    counts: Dict[int, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def __getitem__(self, alpha: int) -> int:
        return self.counts.get(alpha % self.n, 0)


def units(n: int):
    if n == 1:
        return [0]
    return [a for a in range(n) if gcd(a, n) == 1]


def check_guard(n: int, guard: Optional[int] = None):
    if guard is None:
        guard = get_settings().matgroups.enumeration_guard
    if n**4 > guard:
        raise EnumerationTooLarge(f"n={n}: n^4 = {n**4} exceeds guard {guard}")


def enumerate_gl2(n: int, guard: Optional[int] = None) -> Iterator[MatModN]:
    """Every element of GL2(Z/nZ) exactly once."""
    if n < 2:
        raise DomainError(f"modulus must be >= 2, got {n}")
    check_guard(n, guard)
    for a, b, c, d in itertools.product(range(n), repeat=4):
        if gcd((a * d - b * c) % n, n) == 1:
            yield MatModN(n, a, b, c, d)


def gl2_order(ell: int) -> int:
    return (ell * ell - 1) * (ell * ell - ell)


def delta_order(ell: int) -> int:
    """|Delta(Z/lZ)| = l^2 (l-1)^3 (l+1)^2."""
    return ell * ell * (ell - 1) ** 3 * (ell + 1) ** 2


def fiber_product_order(g1: int, g2: int, q: int) -> int:
    """|G1 x_Q G2| = |G1| |G2| / |Q|."""
    if q < 1 or g1 % q or g2 % q:
        raise DomainError(f"quotient order {q} must divide both {g1} and {g2}")
    return g1 * g2 // q


from .characters import epsilon_sign, psi_value  # noqa: E402
from .counting import (  # noqa: E402
    CharSums,
    char_sums,
    count_B,
    count_B_pairs,
    count_psi_plus_X_alpha,
    count_X_alpha,
    delta_order_bruteforce,
    delta_order_squarefree,
    f_oracle,
    psi_plus_closed_form,
    x_alpha_table,
    x_alpha_table_bruteforce,
)
