"""
Report types.

Everything that leaves the process as JSON. Exact rationals travel as
numerator/denominator strings, decimals as strings.
"""

from fractions import Fraction
from typing import Dict, List, Optional

from pydantic import BaseModel, Field

from . import SCHEMA_VERSION


class ExactValue(BaseModel):
    num: str
    den: str

    @classmethod
    def of(cls, x: Fraction) -> "ExactValue":
        x = Fraction(x)
        return cls(num=str(x.numerator), den=str(x.denominator))

    def as_fraction(self) -> Fraction:
        return Fraction(int(self.num), int(self.den))


class Interval(BaseModel):
    value: str
    low: str
    high: str


class ConstantReport(BaseModel):
    schema_version: str = SCHEMA_VERSION
    kind: str  # "serre_pair" | "generic" | "table"
    curves: Optional[List[str]] = None
    m1: Optional[int] = None
    m2: Optional[int] = None
    m: Optional[int] = None
    m_prime: Optional[int] = None
    M: Optional[int] = None
    ratio: Optional[ExactValue] = None
    finite_sum: Optional[ExactValue] = None
    routes_agree: Optional[bool] = None
    deviation_bound: Optional[ExactValue] = None
    cutoff: int
    generic: Interval
    generic_heuristic: str
    final: Interval
    classical_density: str
    below_classical: bool
    serre_assumed: bool = False


class PredictedValue(BaseModel):
    value: str
    interval: List[str]
    ratio_num: str
    ratio_den: str
    serre_assumed: bool = True


class CheckpointRow(BaseModel):
    p: int
    primes_seen: int
    good_primes: int
    coprime_count: int


class CoprimeCount(BaseModel):
    schema_version: str = SCHEMA_VERSION
    curves: List[str]
    bound: int
    pi_x: int
    coprime_count: int
    good_prime_count: int
    excluded_primes: List[int] = Field(default_factory=list)
    checkpoints: List[CheckpointRow] = Field(default_factory=list)


class DensityReport(BaseModel):
    schema_version: str = SCHEMA_VERSION
    curves: List[str]
    bound: int
    coprime_count: int
    good_prime_count: int
    pi_x: int
    observed: str
    observed_over_good: str
    predicted: Optional[PredictedValue] = None
    prediction_error: Optional[str] = None
    excluded_primes: List[int] = Field(default_factory=list)


class Violation(BaseModel):
    p: int
    residue: int
    divisor: int
    gcd: int


class ObstructionReport(BaseModel):
    schema_version: str = SCHEMA_VERSION
    curves: List[str]
    bound: int
    modulus: int
    pattern: Dict[int, int]
    checked_primes: int
    coprime_count: int
    violation_count: int
    violations: List[Violation] = Field(default_factory=list)
    excluded_primes: List[int] = Field(default_factory=list)


class InclusionExclusionReport(BaseModel):
    schema_version: str = SCHEMA_VERSION
    curves: List[str]
    bound: int
    d_max: int
    coprime_count: int
    mobius_sum: int
    residual: int
    equal: bool


class DivisibilityRow(BaseModel):
    d: int
    count: int
    observed: str
    predicted: Optional[ExactValue] = None


class DivisibilityReport(BaseModel):
    schema_version: str = SCHEMA_VERSION
    curves: List[str]
    bound: int
    pi_x: int
    rows: List[DivisibilityRow]


class BoundsReport(BaseModel):
    schema_version: str = SCHEMA_VERSION
    level_bound: int
    pair_count: int
    ratio_one_count: int
    min_pair: List[int]
    min_ratio: ExactValue
    max_pair: List[int]
    max_ratio: ExactValue
    outside: List[List[int]] = Field(default_factory=list)


class MomentReport(BaseModel):
    schema_version: str = SCHEMA_VERSION
    heuristic: bool = True
    family: str
    draws: int
    sample_count: int
    skipped: Dict[str, int]
    a_bound: int
    b_bound: int
    height: Optional[int] = None
    seed: int
    t: int
    cutoff: int
    mean: Optional[str] = None
    moments: List[str] = Field(default_factory=list)
    signed_moments: List[str] = Field(default_factory=list)
    reference: str
    mean_deviation_bound: Optional[str] = None
    max_naive_height: Optional[str] = None
    ratio_one_count: int = 0
    out_of_range: int = 0


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""
    counterexample: Optional[str] = None


class SuiteReport(BaseModel):
    schema_version: str = SCHEMA_VERSION
    suite: str
    passed: bool
    checks: List[CheckResult]
    elapsed_ms: float = 0.0
