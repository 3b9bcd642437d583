"""
Average Coprimality Experiment

Draws pairs of short Weierstrass curves, assumes every survivor is a Serre
pair, and reports moments of the per-pair constants about the generic one.
Results are HEURISTIC: Serre status is never checked.

Families:
- box: |a| <= a_bound, |b| <= b_bound, uniform
- height: |a| <= T^2, |b| <= T^3, non-minimal models (p^4 | a and p^6 | b) rejected
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Tuple

import mpmath as mp
import numpy as np

from .arith import prime_factors, squarefree_part
from .config import get_settings
from .constants import RATIO_MAX, RATIO_MIN, SerrePairProfile, deviation_terms, generic_constant, ratio_theorem
from .errors import DomainError, NotSerreCurve, NotSerrePair, Unfactorable
from .output import log_info
from .serre import SerreCurveProfile
from .types import MomentReport

FAMILIES = ("box", "height")

SKIP_REASONS = ("singular", "non_minimal", "delta_prime_unit", "unfactorable", "equal_level")

Draw = Tuple[int, int, int, int]


@dataclass(frozen=True)
class SampleOutcome:
    """One draw: either a skip reason or the exact ratio R and its deviation terms."""

    skip: Optional[str] = None
    ratio: Optional[Fraction] = None
    deviation: Optional[Fraction] = None
    height: int = 0


def naive_height(a: int, b: int) -> int:
    return max(abs(a) ** 3, b * b)


def is_minimal_short(a: int, b: int) -> bool:
    """False when some p has p^4 | a and p^6 | b."""
    g = gcd(a, b)
    if g <= 1:
        return True
    for p in prime_factors(g):
        if a % p**4 == 0 and b % p**6 == 0:
            return False
    return True


def _short_level(a: int, b: int) -> SerreCurveProfile:
    # y^2 = x^3 + ax + b has discriminant -16(4a^3 + 27b^2)
    return SerreCurveProfile.from_delta_prime(squarefree_part(-(4 * a**3 + 27 * b * b)))


def evaluate_draw(draw: Draw, family: str = "box") -> SampleOutcome:
    a1, b1, a2, b2 = draw
    for a, b in ((a1, b1), (a2, b2)):
        if 4 * a**3 + 27 * b * b == 0:
            return SampleOutcome(skip="singular")
    if family == "height" and not (is_minimal_short(a1, b1) and is_minimal_short(a2, b2)):
        return SampleOutcome(skip="non_minimal")
    try:
        profile = SerrePairProfile.from_levels(_short_level(a1, b1).m_E, _short_level(a2, b2).m_E)
        return SampleOutcome(
            ratio=ratio_theorem(profile),
            deviation=deviation_terms(profile),
            height=max(naive_height(a1, b1), naive_height(a2, b2)),
        )
    except NotSerreCurve:
        return SampleOutcome(skip="delta_prime_unit")
    except Unfactorable:
        return SampleOutcome(skip="unfactorable")
    except NotSerrePair:
        return SampleOutcome(skip="equal_level")


def _evaluate_block(args: Tuple[List[Draw], str]) -> List[SampleOutcome]:
    draws, family = args
    return [evaluate_draw(d, family) for d in draws]


def draw_pairs(rng: np.random.Generator, a_bound: int, b_bound: int, draws: int) -> List[Draw]:
    a = rng.integers(-a_bound, a_bound, size=(draws, 2), endpoint=True)
    b = rng.integers(-b_bound, b_bound, size=(draws, 2), endpoint=True)
    return [(int(a[i, 0]), int(b[i, 0]), int(a[i, 1]), int(b[i, 1])) for i in range(draws)]


def _evaluate_all(pairs: List[Draw], family: str, workers: int) -> List[SampleOutcome]:
    if workers <= 1:
        return _evaluate_block((pairs, family))
    size = -(-len(pairs) // workers)
    blocks = [(pairs[i:i + size], family) for i in range(0, len(pairs), size)]
    out: List[SampleOutcome] = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_evaluate_block, blocks):
            out.extend(part)
    return out


def central_moments(values: List[mp.mpf], reference: mp.mpf, t: int) -> Tuple[List[mp.mpf], List[mp.mpf]]:
    """Mean of |v - reference|^k and of (v - reference)^k for k = 1..t."""
    centered = [v - reference for v in values]
    n = len(centered)
    absolute = [mp.fsum(abs(c) ** k for c in centered) / n for k in range(1, t + 1)]
    signed = [mp.fsum(c**k for c in centered) / n for k in range(1, t + 1)]
    return absolute, signed


def sample_average(a_bound: Optional[int] = None, b_bound: Optional[int] = None,
                   draws: Optional[int] = None, t: Optional[int] = None,
                   seed: Optional[int] = None, family: str = "box",
                   height: Optional[int] = None, cutoff: Optional[int] = None,
                   workers: int = 1) -> MomentReport:
    """
    Monte-Carlo mean and central moments of C_{E1,E2} about C.

    Draws are generated in one stream from the seed before any evaluation,
    so the report does not depend on the worker count. The mean is taken
    over survivors only.
    """
    settings = get_settings().average
    a_bound = settings.a_bound if a_bound is None else a_bound
    b_bound = settings.b_bound if b_bound is None else b_bound
    draws = settings.draws if draws is None else draws
    t = settings.t if t is None else t
    seed = settings.seed if seed is None else seed
    cutoff = cutoff or settings.cutoff

    if family not in FAMILIES:
        raise DomainError(f"family must be one of {FAMILIES}, got {family!r}")
    if family == "height":
        height = height or 10
        if height < 1:
            raise DomainError(f"height bound must be positive, got {height}")
        a_bound, b_bound = height**2, height**3
    if a_bound < 0 or b_bound < 1:
        raise DomainError(f"need a_bound >= 0 and b_bound >= 1, got ({a_bound}, {b_bound})")
    if draws < 1:
        raise DomainError(f"draws must be at least 1, got {draws}")
    if t < 1:
        raise DomainError(f"moment order t must be at least 1, got {t}")

    generic = generic_constant(cutoff)
    reference = generic.value
    rng = np.random.default_rng(seed)
    pairs = draw_pairs(rng, a_bound, b_bound, draws)
    outcomes = _evaluate_all(pairs, family, workers)

    skipped: Dict[str, int] = {reason: 0 for reason in SKIP_REASONS}
    ratios: List[Fraction] = []
    deviations: List[Fraction] = []
    max_height = 0
    for outcome in outcomes:
        if outcome.skip is not None:
            skipped[outcome.skip] += 1
            continue
        ratios.append(outcome.ratio)
        deviations.append(outcome.deviation)
        max_height = max(max_height, outcome.height)

    survivors = len(ratios)
    log_info(f"average: {survivors}/{draws} survivors, skipped {sum(skipped.values())} "
             f"({', '.join(f'{k}={v}' for k, v in skipped.items() if v)})")

    report = MomentReport(
        family=family, draws=draws, sample_count=survivors, skipped=skipped,
        a_bound=a_bound, b_bound=b_bound, height=height if family == "height" else None,
        seed=seed, t=t, cutoff=cutoff, reference=generic.render(reference),
        ratio_one_count=sum(1 for r in ratios if r == 1),
        out_of_range=sum(1 for r in ratios if r != 1 and not (RATIO_MIN <= r <= RATIO_MAX)),
    )
    if not survivors:
        return report

    values = [reference * r.numerator / r.denominator for r in ratios]
    report.mean = generic.render(mp.fsum(values) / survivors)
    absolute, signed = central_moments(values, reference, t)
    report.moments = [generic.render(x) for x in absolute]
    report.signed_moments = [generic.render(x) for x in signed]
    mean_deviation = sum(deviations, Fraction(0)) / survivors
    report.mean_deviation_bound = generic.render(mp.mpf(mean_deviation.numerator) / mean_deviation.denominator)
    report.max_naive_height = str(max_height)
    return report
