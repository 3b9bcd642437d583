"""
Elliptic Curves over Q and their Reductions

- Long Weierstrass models with cached, recomputable discriminant
- Reduction mod p (good primes only)
- Point counting: character sum (small p) and baby-step giant-step
  on random points of the curve and its quadratic twist (large p)
"""

import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

import gmpy2
import numpy as np
from sympy.ntheory import sqrt_mod

from .arith import legendre
from .config import get_settings
from .errors import BadReduction, DomainError, SingularCurve

Point = Optional[Tuple[int, int]]  # None is the point at infinity


@dataclass(frozen=True)
class WeierstrassCurve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 with integral coefficients."""

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    label: Optional[str] = None
    bad_primes_override: Tuple[int, ...] = ()
    discriminant: int = field(init=False, compare=False)

    def __post_init__(self):
        delta = _discriminant(self.a1, self.a2, self.a3, self.a4, self.a6)
        if delta == 0:
            raise SingularCurve(f"singular model {self.ainvs}")
        object.__setattr__(self, "discriminant", delta)

    @classmethod
    def from_ainvs(cls, ainvs: Sequence[int], label: Optional[str] = None,
                   bad_primes_override: Sequence[int] = ()) -> "WeierstrassCurve":
        if len(ainvs) != 5:
            raise DomainError(f"expected 5 a-invariants, got {len(ainvs)}")
        a1, a2, a3, a4, a6 = (int(a) for a in ainvs)
        return cls(a1, a2, a3, a4, a6, label=label,
                   bad_primes_override=tuple(sorted(int(p) for p in bad_primes_override)))

    @classmethod
    def short(cls, a: int, b: int, label: Optional[str] = None) -> "WeierstrassCurve":
        return cls(0, 0, 0, a, b, label=label)

    @classmethod
    def from_factored_cubic(cls, e1: int, e2: int, e3: int) -> "WeierstrassCurve":
        """y^2 = (x - e1)(x - e2)(x - e3)."""
        return cls(0, -(e1 + e2 + e3), 0, e1 * e2 + e1 * e3 + e2 * e3, -e1 * e2 * e3)

    @property
    def ainvs(self) -> List[int]:
        return [self.a1, self.a2, self.a3, self.a4, self.a6]

    @property
    def name(self) -> str:
        return self.label or str(self.ainvs)

    @property
    def b2(self) -> int:
        return self.a1 * self.a1 + 4 * self.a2

    @property
    def b4(self) -> int:
        return 2 * self.a4 + self.a1 * self.a3

    @property
    def b6(self) -> int:
        return self.a3 * self.a3 + 4 * self.a6

    @property
    def b8(self) -> int:
        return (self.a1 * self.a1 * self.a6 + 4 * self.a2 * self.a6 - self.a1 * self.a3 * self.a4
                + self.a2 * self.a3 * self.a3 - self.a4 * self.a4)

    @property
    def c4(self) -> int:
        return self.b2 * self.b2 - 24 * self.b4

    @property
    def c6(self) -> int:
        return -self.b2**3 + 36 * self.b2 * self.b4 - 216 * self.b6

    def short_model(self) -> "WeierstrassCurve":
        """y^2 = x^3 - 27 c4 x - 54 c6, whose discriminant is 6^12 times ours."""
        return WeierstrassCurve.short(-27 * self.c4, -54 * self.c6, label=self.label)

    def is_good_reduction(self, p: int) -> bool:
        return is_good_reduction(self, p)

    def reduce(self, p: int) -> "CurveModP":
        if not is_good_reduction(self, p):
            raise BadReduction(p, self.label)
        return CurveModP(p=p, a1=self.a1 % p, a2=self.a2 % p, a3=self.a3 % p,
                         a4=self.a4 % p, a6=self.a6 % p)


def _discriminant(a1: int, a2: int, a3: int, a4: int, a6: int) -> int:
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


def discriminant(curve: WeierstrassCurve) -> int:
    """Discriminant of the given (not minimized) model."""
    delta = _discriminant(curve.a1, curve.a2, curve.a3, curve.a4, curve.a6)
    if delta == 0:
        raise SingularCurve(f"singular model {curve.ainvs}")
    return delta


def factored_cubic_discriminant(e1: int, e2: int, e3: int) -> int:
    return 16 * ((e1 - e2) * (e2 - e3) * (e3 - e1)) ** 2


def is_good_reduction(curve: WeierstrassCurve, p: int) -> bool:
    """p does not divide the model discriminant and is not listed as bad by the user."""
    if p in curve.bad_primes_override:
        return False
    return curve.discriminant % p != 0


@dataclass(frozen=True)
class CurveModP:
    p: int
    a1: int
    a2: int
    a3: int
    a4: int
    a6: int

    def short_coefficients(self) -> Tuple[int, int]:
        """(A, B) of an isomorphic y^2 = x^3 + Ax + B; needs p > 3."""
        if self.p <= 3:
            raise DomainError("short Weierstrass form needs p > 3")
        p = self.p
        b2 = (self.a1 * self.a1 + 4 * self.a2) % p
        b4 = (2 * self.a4 + self.a1 * self.a3) % p
        b6 = (self.a3 * self.a3 + 4 * self.a6) % p
        c4 = (b2 * b2 - 24 * b4) % p
        c6 = (-b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6) % p
        return (-27 * c4) % p, (-54 * c6) % p


@dataclass(frozen=True)
class PointCount:
    p: int
    order: int
    trace: int

    def __post_init__(self):
        if self.order != self.p + 1 - self.trace:
            raise DomainError(f"order {self.order} != p + 1 - a_p at p={self.p}")
        if self.trace * self.trace > 4 * self.p:
            raise DomainError(f"a_p={self.trace} violates the Hasse bound at p={self.p}")

    @classmethod
    def from_order(cls, p: int, order: int) -> "PointCount":
        return cls(p=p, order=order, trace=p + 1 - order)


def count_points_naive(cmp: CurveModP) -> PointCount:
    """Exact #E(F_p): direct enumeration for p in {2, 3}, character sum otherwise."""
    p = cmp.p
    if p <= 3:
        affine = 0
        for x in range(p):
            rhs = (x**3 + cmp.a2 * x * x + cmp.a4 * x + cmp.a6) % p
            for y in range(p):
                if (y * y + cmp.a1 * x * y + cmp.a3 * y - rhs) % p == 0:
                    affine += 1
        return PointCount.from_order(p, affine + 1)

    # (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
    b2 = (cmp.a1 * cmp.a1 + 4 * cmp.a2) % p
    b4 = (2 * cmp.a4 + cmp.a1 * cmp.a3) % p
    b6 = (cmp.a3 * cmp.a3 + 4 * cmp.a6) % p
    xs = np.arange(p, dtype=np.int64)
    x2 = xs * xs % p
    x3 = x2 * xs % p
    g = (4 * x3 + b2 * x2 + (2 * b4 % p) * xs + b6) % p

    is_square = np.zeros(p, dtype=bool)
    is_square[x2] = True
    chi = np.where(g == 0, 0, np.where(is_square[g], 1, -1))
    return PointCount.from_order(p, p + 1 + int(chi.sum()))


def ec_neg(P: Point, p: int) -> Point:
    if P is None:
        return None
    return (P[0], (-P[1]) % p)


def ec_add(P: Point, Q: Point, A: int, p: int) -> Point:
    """Affine addition on y^2 = x^3 + Ax + B."""
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        lam = (3 * x1 * x1 + A) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    y3 = (lam * (x1 - x3) - y1) % p
    return (x3, y3)


def ec_mul(k: int, P: Point, A: int, p: int) -> Point:
    """Double-and-add scalar multiplication."""
    if k < 0:
        return ec_mul(-k, ec_neg(P, p), A, p)
    result: Point = None
    addend = P
    while k:
        if k & 1:
            result = ec_add(result, addend, A, p)
        addend = ec_add(addend, addend, A, p)
        k >>= 1
    return result


def random_point(A: int, B: int, p: int, rng: random.Random) -> Tuple[int, int]:
    while True:
        x = rng.randrange(p)
        rhs = (x * x * x + A * x + B) % p
        if rhs == 0:
            return (x, 0)
        if legendre(rhs, p) == 1:
            return (x, int(sqrt_mod(rhs, p)))


def _nonresidue(p: int) -> int:
    d = 2
    while legendre(d, p) != -1:
        d += 1
    return d


def _annihilating_traces(P: Tuple[int, int], A: int, p: int, tmax: int) -> Set[int]:
    """All s with |s| <= tmax and (p + 1 - s) P = O, by baby-step giant-step."""
    m = int(gmpy2.isqrt(tmax)) + 1
    baby: Dict[int, List[Tuple[int, int]]] = {}
    jP: Point = None
    for j in range(1, m + 1):
        jP = ec_add(jP, P, A, p)
        if jP is None:
            # ord(P) = j: the solutions are one residue class mod j
            first = -tmax + ((p + 1 + tmax) % j)
            return set(range(first, tmax + 1, j))
        baby.setdefault(jP[0], []).append((j, jP[1]))

    k = 2 * m + 1
    kP = ec_mul(k, P, A, p)
    neg_kP = ec_neg(kP, p)
    i_lo = -((tmax + m) // k) - 1
    i_hi = (tmax + m) // k + 1

    found: Set[int] = set()
    R = ec_mul(p + 1 - i_lo * k, P, A, p)  # (p+1)P - i_lo kP
    for i in range(i_lo, i_hi + 1):
        base = i * k
        if R is None:
            found.add(base)
        else:
            for j, y in baby.get(R[0], ()):
                if y == R[1]:
                    found.add(base + j)
                if (y + R[1]) % p == 0:
                    found.add(base - j)
        R = ec_add(R, neg_kP, A, p)
    return {s for s in found if abs(s) <= tmax}


def count_points_bsgs(cmp: CurveModP, seed: int = 0, max_points: Optional[int] = None) -> PointCount:
    """
    #E(F_p) from point orders on E and its quadratic twist.

    Candidate traces t must satisfy (p+1-t)P = O on E and (p+1+t)Q = O on
    the twist; random points are drawn until one candidate survives. If
    max_points draws never isolate it, the character sum decides.
    """
    p = cmp.p
    if p <= 3:
        return count_points_naive(cmp)
    if max_points is None:
        max_points = get_settings().curves.max_bsgs_points

    A, B = cmp.short_coefficients()
    d = _nonresidue(p)
    At, Bt = A * d * d % p, B * d * d * d % p
    tmax = int(gmpy2.isqrt(4 * p))
    rng = random.Random(seed * 1_000_003 + p)

    candidates: Optional[Set[int]] = None
    for i in range(max_points):
        on_twist = i % 2 == 1
        a, b, sign = (At, Bt, -1) if on_twist else (A, B, 1)
        P = random_point(a, b, p, rng)
        if candidates is not None and len(candidates) <= 8:
            candidates = {t for t in candidates if ec_mul(p + 1 - sign * t, P, a, p) is None}
        else:
            traces = {sign * s for s in _annihilating_traces(P, a, p, tmax)}
            candidates = traces if candidates is None else candidates & traces
        if len(candidates) == 1:
            return PointCount.from_order(p, p + 1 - candidates.pop())

    return count_points_naive(cmp)


def count_points(curve: WeierstrassCurve, p: int, seed: int = 0,
                 naive_threshold: Optional[int] = None) -> PointCount:
    if not is_good_reduction(curve, p):
        raise BadReduction(p, curve.label)
    if naive_threshold is None:
        naive_threshold = get_settings().curves.naive_threshold
    cmp = curve.reduce(p)
    if p <= naive_threshold:
        return count_points_naive(cmp)
    return count_points_bsgs(cmp, seed=seed)


def order_annihilates(cmp: CurveModP, order: int, checks: Optional[int] = None, seed: int = 0) -> bool:
    """Lagrange check: order * P = O for `checks` random points (p > 3)."""
    if checks is None:
        checks = get_settings().curves.lagrange_checks
    A, B = cmp.short_coefficients()
    rng = random.Random(seed ^ (cmp.p << 1))
    for _ in range(checks):
        if ec_mul(order, random_point(A, B, cmp.p, rng), A, cmp.p) is not None:
            return False
    return True
