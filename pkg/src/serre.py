"""
Serre Curve Levels

Adelic levels derived from the squarefree part of the discriminant,
assuming (never verifying) that each curve is a Serre curve.
"""

from dataclasses import dataclass
from typing import Optional

from .arith import squarefree_part
from .constants import SerrePairProfile
from .curves import WeierstrassCurve
from .errors import NotSerreCurve


@dataclass(frozen=True)
class SerreCurveProfile:
    delta_prime: int
    d_E: int
    M_E: int
    m_E: int
    serre_assumed: bool = True
    label: Optional[str] = None

    @classmethod
    def from_delta_prime(cls, delta_prime: int, label: Optional[str] = None) -> "SerreCurveProfile":
        if delta_prime in (1, -1):
            # index >= 12 in GL2(Z^), and the mod-4 image is not surjective
            raise NotSerreCurve(f"squarefree discriminant part {delta_prime} rules out a Serre curve")
        size = abs(delta_prime)
        if delta_prime % 4 == 1:
            d_E, m_E = size, 2 * size
        else:
            d_E, m_E = 4 * size, 4 * size
        M_E = d_E if d_E % 2 == 0 else 2 * d_E
        return cls(delta_prime=delta_prime, d_E=d_E, M_E=M_E, m_E=m_E, label=label)


def serre_level(curve: WeierstrassCurve, trial_bound: Optional[int] = None) -> SerreCurveProfile:
    """Level m_E of a curve assumed to be a Serre curve."""
    return SerreCurveProfile.from_delta_prime(
        squarefree_part(curve.discriminant, trial_bound), label=curve.label
    )


def pair_profile(p1: SerreCurveProfile, p2: SerreCurveProfile) -> SerrePairProfile:
    return SerrePairProfile.from_levels(p1.m_E, p2.m_E)
