"""
Prime Scans

The range [1, x] is cut into contiguous integer chunks. Each chunk is pure
work (sieve, two point counts per good prime, one gcd) and the merge is a
sum taken in chunk order, so the totals do not depend on the worker count.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import gmpy2
import numpy as np
import yaml

from ..arith import FactoredInteger, factorize, kronecker, mobius_table, primes_in_range
from ..config import OBSTRUCTIONS_FILE, get_settings
from ..constants import F1, SerrePairProfile, f_closed, serre_pair_constant
from ..curves import WeierstrassCurve, count_points, is_good_reduction
from ..errors import CoprimeError, DomainError
from ..output import log_info, log_progress, log_warning
from ..serre import pair_profile, serre_level
from ..types import (
    CheckpointRow,
    CoprimeCount,
    DensityReport,
    DivisibilityReport,
    DivisibilityRow,
    ExactValue,
    InclusionExclusionReport,
    ObstructionReport,
    PredictedValue,
    Violation,
)
from .checkpoint import CheckpointHeader, CheckpointWriter

INCLUSION_EXCLUSION_MAX = 10**4
MAX_LISTED_VIOLATIONS = 20


def max_order(x: int) -> int:
    """floor(x + 1 + 2 sqrt(x)): no reduction order at p <= x exceeds it."""
    return x + 1 + int(gmpy2.isqrt(4 * x))


def ratio_string(num: int, den: int, digits: int = 10) -> str:
    if den == 0:
        return "nan"
    return f"{num / den:.{digits}f}"


@dataclass(frozen=True)
class ScanPlan:
    curve1: WeierstrassCurve
    curve2: WeierstrassCurve
    bound: int
    chunk_size: int
    seed: int = 0
    divisors: Tuple[int, ...] = ()
    record_gcds: bool = False

    def chunks(self) -> List[Tuple[int, int, int]]:
        """(index, lo, hi) with inclusive integer ranges covering [1, bound]."""
        out = []
        lo = 1
        index = 0
        while lo <= self.bound:
            hi = min(lo + self.chunk_size - 1, self.bound)
            out.append((index, lo, hi))
            lo = hi + 1
            index += 1
        return out

    def header(self) -> CheckpointHeader:
        return CheckpointHeader.new(
            curves=[self.curve1.ainvs, self.curve2.ainvs],
            bound=self.bound, chunk_size=self.chunk_size, seed=self.seed,
            divisors=list(self.divisors),
        )


@dataclass
class ChunkResult:
    index: int
    lo: int
    hi: int
    primes: int = 0
    good: int = 0
    coprime: int = 0
    last_prime: int = 0
    bad: List[int] = field(default_factory=list)
    a_d: Dict[int, int] = field(default_factory=dict)
    gcds: List[Tuple[int, int]] = field(default_factory=list)

    def to_record(self) -> dict:
        return {
            "chunk_index": self.index, "lo": self.lo, "hi": self.hi,
            "primes": self.primes, "good": self.good, "coprime": self.coprime,
            "last_prime": self.last_prime, "bad": self.bad,
            "a_d": {str(d): c for d, c in sorted(self.a_d.items())},
        }

    @classmethod
    def from_record(cls, record: dict) -> "ChunkResult":
        return cls(
            index=record["chunk_index"], lo=record["lo"], hi=record["hi"],
            primes=record["primes"], good=record["good"], coprime=record["coprime"],
            last_prime=record.get("last_prime", 0), bad=list(record.get("bad", [])),
            a_d={int(d): c for d, c in record.get("a_d", {}).items()},
        )


def scan_chunk(task: Tuple[ScanPlan, int, int, int]) -> ChunkResult:
    """One chunk of the scan; top-level so worker processes can run it."""
    plan, index, lo, hi = task
    segment_size = get_settings().arith.segment_size
    out = ChunkResult(index=index, lo=lo, hi=hi, a_d={d: 0 for d in plan.divisors})
    for block in primes_in_range(lo, hi, segment_size):
        for p in block.tolist():
            out.primes += 1
            out.last_prime = p
            if not (is_good_reduction(plan.curve1, p) and is_good_reduction(plan.curve2, p)):
                out.bad.append(p)
                continue
            out.good += 1
            n1 = count_points(plan.curve1, p, seed=plan.seed).order
            n2 = count_points(plan.curve2, p, seed=plan.seed).order
            g = gcd(n1, n2)
            if g == 1:
                out.coprime += 1
            for d in plan.divisors:
                if g % d == 0:
                    out.a_d[d] += 1
            if plan.record_gcds:
                out.gcds.append((p, g))
    return out


@dataclass
class ScanTotals:
    plan: ScanPlan
    pi_x: int = 0
    good: int = 0
    coprime: int = 0
    excluded: List[int] = field(default_factory=list)
    a_d: Dict[int, int] = field(default_factory=dict)
    gcds: List[Tuple[int, int]] = field(default_factory=list)
    rows: List[CheckpointRow] = field(default_factory=list)

    def add(self, chunk: ChunkResult):
        self.pi_x += chunk.primes
        self.good += chunk.good
        self.coprime += chunk.coprime
        self.excluded.extend(chunk.bad)
        for d, c in chunk.a_d.items():
            self.a_d[d] = self.a_d.get(d, 0) + c
        self.gcds.extend(chunk.gcds)
        self.rows.append(CheckpointRow(p=chunk.last_prime, primes_seen=self.pi_x,
                                       good_primes=self.good, coprime_count=self.coprime))

    def to_count(self) -> CoprimeCount:
        return CoprimeCount(
            curves=[self.plan.curve1.name, self.plan.curve2.name],
            bound=self.plan.bound, pi_x=self.pi_x, coprime_count=self.coprime,
            good_prime_count=self.good, excluded_primes=sorted(self.excluded),
            checkpoints=self.rows,
        )


def _resolve_workers(workers: Optional[int]) -> int:
    if workers is None:
        workers = get_settings().empirical.workers
    return max(int(workers), 1)


def _run_chunks(tasks: List[Tuple[ScanPlan, int, int, int]], workers: int) -> Iterator[ChunkResult]:
    if workers <= 1 or len(tasks) <= 1:
        for task in tasks:
            yield scan_chunk(task)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(scan_chunk, tasks)


def run_scan(plan: ScanPlan, workers: Optional[int] = None,
             checkpoint: Optional[Path] = None, resume: bool = False) -> ScanTotals:
    """Scan every chunk of plan, skipping chunks already recorded in the checkpoint."""
    if plan.bound < 2:
        raise DomainError(f"bound must be at least 2, got {plan.bound}")
    if any(d < 1 for d in plan.divisors):
        raise DomainError(f"divisors must be positive, got {list(plan.divisors)}")
    if checkpoint is not None and plan.record_gcds:
        raise DomainError("per-prime gcds are not checkpointed; drop the checkpoint")
    workers = _resolve_workers(workers)

    writer: Optional[CheckpointWriter] = None
    if checkpoint is not None:
        header = plan.header()
        writer = (CheckpointWriter.resume(checkpoint, header) if resume
                  else CheckpointWriter.create(checkpoint, header))

    chunks = plan.chunks()
    done: Dict[int, ChunkResult] = {}
    if writer is not None:
        done = {i: ChunkResult.from_record(r) for i, r in writer.completed.items()}
        if done:
            log_info(f"resuming run {writer.run_id}: {len(done)}/{len(chunks)} chunks already done")

    pending = [(plan, i, lo, hi) for i, lo, hi in chunks if i not in done]
    for result in _run_chunks(pending, workers):
        if writer is not None:
            writer.append(result.to_record())
        done[result.index] = result
        log_progress(f"{plan.curve1.name} x {plan.curve2.name}", len(done), len(chunks))

    totals = ScanTotals(plan=plan, a_d={d: 0 for d in plan.divisors})
    for i, _, _ in chunks:
        totals.add(done[i])
    return totals


def _plan(E1: WeierstrassCurve, E2: WeierstrassCurve, x: int, seed: Optional[int],
          chunk_size: Optional[int] = None, divisors: Sequence[int] = (),
          record_gcds: bool = False) -> ScanPlan:
    settings = get_settings().empirical
    return ScanPlan(
        curve1=E1, curve2=E2, bound=x,
        chunk_size=chunk_size or settings.chunk_size,
        seed=settings.seed if seed is None else seed,
        divisors=tuple(sorted(set(divisors))), record_gcds=record_gcds,
    )


def pi_coprime(E1: WeierstrassCurve, E2: WeierstrassCurve, x: int,
               workers: Optional[int] = None, seed: Optional[int] = None,
               checkpoint: Optional[Path] = None, resume: bool = False,
               chunk_size: Optional[int] = None) -> CoprimeCount:
    """#{p <= x good for both : gcd(#E1(F_p), #E2(F_p)) = 1}."""
    plan = _plan(E1, E2, x, seed, chunk_size)
    return run_scan(plan, workers, checkpoint, resume).to_count()


def a_d_count(E1: WeierstrassCurve, E2: WeierstrassCurve, d: int, x: int,
              workers: Optional[int] = None, seed: Optional[int] = None) -> int:
    """#{good p <= x : d divides gcd(#E1(F_p), #E2(F_p))}."""
    if d < 1:
        raise DomainError(f"d must be positive, got {d}")
    if x < 2:
        return 0
    if d > max_order(x):
        return 0
    return run_scan(_plan(E1, E2, x, seed, divisors=(d,)), workers).a_d[d]


def gcd_histogram(E1: WeierstrassCurve, E2: WeierstrassCurve, x: int,
                  workers: Optional[int] = None, seed: Optional[int] = None) -> Tuple[ScanTotals, np.ndarray]:
    """Scan totals plus counts of each gcd value 0..max_order(x)."""
    totals = run_scan(_plan(E1, E2, x, seed, record_gcds=True), workers)
    values = np.fromiter((g for _, g in totals.gcds), dtype=np.int64, count=len(totals.gcds))
    return totals, np.bincount(values, minlength=max_order(x) + 1)


def inclusion_exclusion_check(E1: WeierstrassCurve, E2: WeierstrassCurve, x: int,
                              workers: Optional[int] = None, seed: Optional[int] = None,
                              max_bound: int = INCLUSION_EXCLUSION_MAX) -> InclusionExclusionReport:
    """pi_coprime(x) against sum_{d <= x+1+2sqrt(x)} mu(d) A_d(x), with A_d read off the gcd histogram."""
    if x > max_bound:
        raise DomainError(f"inclusion-exclusion needs x <= {max_bound}, got {x}")
    totals, hist = gcd_histogram(E1, E2, x, workers, seed)
    d_max = max_order(x)
    mu = mobius_table(d_max).astype(np.int64)
    mobius_sum = 0
    for d in np.flatnonzero(mu).tolist():
        a_d = int(hist[d::d].sum())
        if a_d:
            mobius_sum += int(mu[d]) * a_d
    residual = totals.coprime - mobius_sum
    return InclusionExclusionReport(
        curves=[E1.name, E2.name], bound=x, d_max=d_max, coprime_count=totals.coprime,
        mobius_sum=mobius_sum, residual=residual, equal=residual == 0,
    )


@dataclass(frozen=True)
class ObstructionPattern:
    """Residue of p mod modulus -> integer asserted to divide both orders' gcd."""

    modulus: int
    pattern: Dict[int, int]
    curves: Tuple[str, ...] = ()

    def divisor_for(self, p: int) -> Optional[int]:
        return self.pattern.get(p % self.modulus)


def load_obstructions(path: Optional[Path] = None) -> List[ObstructionPattern]:
    path = Path(path) if path else OBSTRUCTIONS_FILE
    if not path.exists():
        log_warning(f"no obstruction file at {path}")
        return []
    with open(path, "r") as f:
        data = yaml.safe_load(f) or {}
    out = []
    for item in data.get("obstructions", []):
        out.append(ObstructionPattern(
            modulus=int(item["modulus"]),
            pattern={int(r): int(d) for r, d in item["pattern"].items()},
            curves=tuple(item.get("curves", ())),
        ))
    return out


def find_obstruction(label1: Optional[str], label2: Optional[str],
                     path: Optional[Path] = None) -> ObstructionPattern:
    wanted = {label1, label2}
    for obstruction in load_obstructions(path):
        if set(obstruction.curves) == wanted:
            return obstruction
    raise DomainError(f"no obstruction pattern recorded for {label1} / {label2}; supply one")


def quadratic_pattern(D: int, modulus: int, inert_divisor: int, split_divisor: int) -> Dict[int, int]:
    """
    Residue pattern driven by the Kronecker symbol (D/p).

    (D/.) is periodic mod |D| when D = 1 mod 4 and mod 4|D| otherwise;
    modulus must be a multiple of that period. Residues sharing a factor
    with modulus are left out.
    """
    if D in (0, 1):
        raise DomainError(f"D={D} gives no quadratic character")
    period = abs(D) if D % 4 == 1 else 4 * abs(D)
    if modulus % period:
        raise DomainError(f"modulus {modulus} is not a multiple of the period {period} of ({D}/.)")
    pattern = {}
    for r in range(1, modulus):
        if gcd(r, modulus) != 1:
            continue
        pattern[r] = inert_divisor if kronecker(D, r) == -1 else split_divisor
    return pattern


def obstruction_scan(E1: WeierstrassCurve, E2: WeierstrassCurve, x: int,
                     obstruction: Optional[ObstructionPattern] = None,
                     workers: Optional[int] = None, seed: Optional[int] = None) -> ObstructionReport:
    """Check that the asserted divisor divides gcd(#E1, #E2) at every good p <= x."""
    if obstruction is None:
        obstruction = find_obstruction(E1.label, E2.label)
    totals = run_scan(_plan(E1, E2, x, seed, record_gcds=True), workers)
    checked = 0
    violations: List[Violation] = []
    count = 0
    for p, g in totals.gcds:
        divisor = obstruction.divisor_for(p)
        if divisor is None:
            continue
        checked += 1
        if g % divisor:
            count += 1
            if len(violations) < MAX_LISTED_VIOLATIONS:
                violations.append(Violation(p=p, residue=p % obstruction.modulus,
                                            divisor=divisor, gcd=g))
    return ObstructionReport(
        curves=[E1.name, E2.name], bound=x, modulus=obstruction.modulus,
        pattern=obstruction.pattern, checked_primes=checked,
        coprime_count=totals.coprime, violation_count=count, violations=violations,
        excluded_primes=sorted(totals.excluded),
    )


def predicted_density(d: int, profile: SerrePairProfile) -> Optional[Fraction]:
    """f(d) for squarefree d: the closed form on gcd(d, M) times F1 on the rest."""
    fac = factorize(d)
    if not isinstance(fac, FactoredInteger) or not fac.is_squarefree:
        return None
    g = gcd(d, profile.M)
    return f_closed(g, profile) * F1(d // g)


def divisibility_profile(E1: WeierstrassCurve, E2: WeierstrassCurve, x: int,
                         divisors: Sequence[int], profile: Optional[SerrePairProfile] = None,
                         workers: Optional[int] = None, seed: Optional[int] = None) -> DivisibilityReport:
    """A_d(x)/pi(x) for each d, next to the predicted f(d) when a pair profile is given."""
    totals = run_scan(_plan(E1, E2, x, seed, divisors=divisors), workers)
    rows = []
    for d in sorted(set(divisors)):
        predicted = predicted_density(d, profile) if profile is not None else None
        rows.append(DivisibilityRow(
            d=d, count=totals.a_d[d], observed=ratio_string(totals.a_d[d], totals.pi_x),
            predicted=ExactValue.of(predicted) if predicted is not None else None,
        ))
    return DivisibilityReport(curves=[E1.name, E2.name], bound=x, pi_x=totals.pi_x, rows=rows)


@dataclass
class Comparison:
    """Density report plus the count it was built from; error is set when no prediction exists."""

    report: DensityReport
    count: CoprimeCount
    error: Optional[CoprimeError] = None


def _prediction(E1: WeierstrassCurve, E2: WeierstrassCurve,
                cutoff: Optional[int]) -> PredictedValue:
    profile = pair_profile(serre_level(E1), serre_level(E2))
    breakdown = serre_pair_constant(profile, cutoff)
    render = breakdown.generic.render
    return PredictedValue(
        value=render(breakdown.value),
        interval=[render(breakdown.low), render(breakdown.high)],
        ratio_num=str(breakdown.ratio.numerator),
        ratio_den=str(breakdown.ratio.denominator),
        serre_assumed=True,
    )


def compare_report(E1: WeierstrassCurve, E2: WeierstrassCurve, x: int,
                   workers: Optional[int] = None, seed: Optional[int] = None,
                   checkpoint: Optional[Path] = None, resume: bool = False,
                   cutoff: Optional[int] = None, chunk_size: Optional[int] = None) -> Comparison:
    """Observed coprime density next to the Serre-pair prediction."""
    predicted = None
    error = None
    try:
        predicted = _prediction(E1, E2, cutoff)
    except CoprimeError as e:
        log_warning(f"no prediction for {E1.name} / {E2.name}: {e}")
        error = e

    count = pi_coprime(E1, E2, x, workers=workers, seed=seed, checkpoint=checkpoint,
                       resume=resume, chunk_size=chunk_size)
    report = DensityReport(
        curves=count.curves, bound=x, coprime_count=count.coprime_count,
        good_prime_count=count.good_prime_count, pi_x=count.pi_x,
        observed=ratio_string(count.coprime_count, count.pi_x),
        observed_over_good=ratio_string(count.coprime_count, count.good_prime_count),
        predicted=predicted, prediction_error=str(error) if error else None,
        excluded_primes=count.excluded_primes,
    )
    return Comparison(report=report, count=count, error=error)
