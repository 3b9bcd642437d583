"""
Verification Suites
Every check is exact unless it says otherwise; one failure fails the suite.

Suites:
- matcount: brute-force group orders and fixed-point counts mod primes
- charsum: character sums S(n), T_r(n) and psi-kernel counts
- foracle: f from matrix counts against the closed form, and the two reference profiles
- bounds: generic constant, ratio routes, starred-function bounds, extremal pairs
- obstruction: the mod-11 divisibility pattern and its negative control
- inclexcl: pi_coprime(x) against the Mobius sum of A_d(x)
"""

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterator, List, Optional, Tuple, Type

import mpmath as mp

from .arith import sieve_primes
from .catalog import Catalog, load_catalog
from .constants import (
    RATIO_MAX,
    RATIO_MAX_PAIR,
    RATIO_MIN,
    RATIO_MIN_PAIR,
    SerrePairProfile,
    admissible_levels,
    bounds_search,
    classical_coprime_density,
    f_closed,
    generic_constant,
    ratio_direct,
    ratio_theorem,
    star_bounds_hold,
    star_monotone,
    star_ordering_holds,
)
from .empirical import find_obstruction, inclusion_exclusion_check, obstruction_scan, quadratic_pattern
from .errors import CoprimeError
from .matgroups import (
    SubgroupDescriptor,
    char_sums,
    count_B,
    count_psi_plus_X_alpha,
    count_X_alpha,
    delta_order,
    delta_order_bruteforce,
    enumerate_gl2,
    f_oracle,
    fiber_product_order,
    gl2_order,
    psi_plus_closed_form,
    units,
    x_alpha_table,
    x_alpha_table_bruteforce,
)
from .matgroups.counting import count_B_pairs, count_psi_plus_X_alpha_bruteforce, delta_pairs_bruteforce
from .output import log_banner, log_error, log_result_row, log_separator
from .serre import pair_profile, serre_level
from .types import CheckResult, SuiteReport

F30 = Fraction(5263, 884736)
F210 = Fraction(168823, 1358954496)
REFERENCE_PAIRS = (("140.b1", "34020.c1"), ("297.a1", "405.a1"), ("484.a1", "847.c1"))


@dataclass
class VerifyOptions:
    max_ell: int = 13
    level_bound: int = 30030
    obstruction_bound: int = 10**5
    control_bound: int = 10**4
    inclexcl_bound: int = 10**4
    random_profiles: int = 50
    seed: int = 0
    catalog: Optional[Catalog] = None


@dataclass
class Check:
    """A named predicate; the callable returns (passed, detail, counterexample)."""

    name: str
    run: Callable[[], Tuple[bool, str, Optional[str]]]


def _equal(actual, expected, what: str = "") -> Tuple[bool, str, Optional[str]]:
    if actual == expected:
        return True, f"{what}{actual}", None
    return False, f"{what}{actual} != {expected}", f"got {actual}, expected {expected}"


def _first_failure(items, predicate) -> Tuple[bool, str, Optional[str]]:
    count = 0
    for item in items:
        count += 1
        ok, detail = predicate(item)
        if not ok:
            return False, f"failed at {item}", detail
    return True, f"{count} cases", None


class BaseSuite:
    """Base class for all suites."""

    name: str = "base"

    def __init__(self, options: VerifyOptions):
        self.options = options

    def checks(self) -> Iterator[Check]:
        raise NotImplementedError

    def catalog(self) -> Catalog:
        if self.options.catalog is None:
            self.options.catalog = load_catalog()
        return self.options.catalog


class MatCountSuite(BaseSuite):
    name = "matcount"

    def checks(self) -> Iterator[Check]:
        for ell in sieve_primes(self.options.max_ell):
            yield Check(f"|Delta(Z/{ell})| brute force", lambda ell=ell: _equal(
                delta_order_bruteforce(ell), ell**2 * (ell - 1) ** 3 * (ell + 1) ** 2))
            yield Check(f"|Delta(Z/{ell})| as fiber product", lambda ell=ell: _equal(
                fiber_product_order(gl2_order(ell), gl2_order(ell), ell - 1), delta_order(ell)))
            yield Check(f"|B_{ell}|", lambda ell=ell: _equal(
                count_B(ell), ell**2 * (ell + 2) * (ell * ell - ell - 1)))
            yield Check(f"|X_{ell}^alpha| for every alpha", lambda ell=ell: self._x_counts(ell))
            if ell <= 5:
                yield Check(f"|B_{ell}| by pair enumeration", lambda ell=ell: _equal(
                    count_B_pairs(ell), ell**2 * (ell + 2) * (ell * ell - ell - 1)))
        for n in (2, 3, 6):
            yield Check(f"|Delta(Z/{n})| by pair enumeration", lambda n=n: _equal(
                delta_pairs_bruteforce(n), delta_order_bruteforce(n)))

    @staticmethod
    def _x_counts(ell: int):
        table = x_alpha_table_bruteforce(ell)

        def expected(alpha: int) -> int:
            return ell * ell if alpha == 1 else ell * ell + ell

        return _first_failure(units(ell), lambda a: (
            table[a] == expected(a), f"alpha={a}: {table[a]} != {expected(a)}"))


class CharSumSuite(BaseSuite):
    name = "charsum"

    MODULI = (2, 6, 10, 30, 70)
    BRUTE_FORCE_MODULI = (2, 6, 10)

    def checks(self) -> Iterator[Check]:
        for n in self.MODULI:
            divisors = [r for r in range(1, n + 1) if n % r == 0]
            yield Check(f"S({n}), T_r({n}) closed forms", lambda n=n, divisors=divisors: _first_failure(
                divisors, lambda r: self._sums_agree(n, r)))
            yield Check(f"psi-kernel counts at n={n}", lambda n=n: _first_failure(
                units(n), lambda a: (count_psi_plus_X_alpha(n, a) == psi_plus_closed_form(n, a),
                                     f"alpha={a}: {count_psi_plus_X_alpha(n, a)} != {psi_plus_closed_form(n, a)}")))
        for n in self.BRUTE_FORCE_MODULI:
            yield Check(f"X table CRT vs enumeration, n={n}", lambda n=n: _equal(
                x_alpha_table(n).counts, x_alpha_table_bruteforce(n).counts))
            yield Check(f"psi-kernel counts by enumeration, n={n}", lambda n=n: _first_failure(
                units(n), lambda a: (count_psi_plus_X_alpha_bruteforce(n, a) == count_psi_plus_X_alpha(n, a),
                                     f"alpha={a}")))
        for t, n in ((3, 6), (15, 30)):
            yield Check(f"T_{t}({n}) = T_{2 * t}({n})", lambda t=t, n=n: _equal(
                char_sums(n, t).T, char_sums(n, 2 * t).T))

    @staticmethod
    def _sums_agree(n: int, r: int):
        sums = char_sums(n, r)
        return sums.agree, f"r={r}: S={sums.S} vs {sums.S_closed}, T={sums.T} vs {sums.T_closed}"


class FOracleSuite(BaseSuite):
    name = "foracle"

    PROFILES = ((RATIO_MAX_PAIR, 30, F30), (RATIO_MIN_PAIR, 210, F210))
    KERNEL_CASES = ((6, 6), (10, 10), (6, 10), (10, 6))

    def checks(self) -> Iterator[Check]:
        for (m1, m2), top, f_top in self.PROFILES:
            profile = SerrePairProfile.from_levels(m1, m2)
            divisors = [d for d in range(1, top + 1) if top % d == 0]
            yield Check(f"f_oracle = f_closed, d | {top}, ({m1},{m2})",
                        lambda profile=profile, divisors=divisors: _first_failure(
                            divisors, lambda d: (f_oracle(d, profile.m1, profile.m2) == f_closed(d, profile),
                                                 f"d={d}: {f_oracle(d, profile.m1, profile.m2)} != {f_closed(d, profile)}")))
            yield Check(f"f({top}) under ({m1},{m2})", lambda profile=profile, top=top, f_top=f_top: _equal(
                f_oracle(top, profile.m1, profile.m2), f_top))
        for d, m in self.KERNEL_CASES:
            yield Check(f"image counts in GL2(Z/{d}) for level {m}", lambda d=d, m=m: self._kernel(d, m))

    @staticmethod
    def _kernel(d: int, m: int):
        image = SubgroupDescriptor.for_level(d, m)
        counts: Dict[int, int] = {a: 0 for a in units(d)}
        for M in enumerate_gl2(d):
            if M.det_one_minus == 0 and image.contains(M):
                counts[M.det] += 1
        expected = {a: count_psi_plus_X_alpha(d, a) if d % m == 0 else count_X_alpha(d, a)
                    for a in units(d)}
        return _equal(counts, expected)


class BoundsSuite(BaseSuite):
    name = "bounds"

    def checks(self) -> Iterator[Check]:
        yield Check("generic constant interval", self._generic)
        yield Check(f"R{RATIO_MAX_PAIR} exact", lambda: _equal(
            ratio_theorem(SerrePairProfile.from_levels(*RATIO_MAX_PAIR)), RATIO_MAX))
        yield Check(f"R{RATIO_MIN_PAIR} exact", lambda: _equal(
            ratio_theorem(SerrePairProfile.from_levels(*RATIO_MIN_PAIR)), RATIO_MIN))
        yield Check("catalog pairs map to reference profiles", self._catalog_profiles)
        yield Check(f"theorem route = sum route on {self.options.random_profiles} random profiles",
                    self._random_profiles)
        yield Check("F1* <= 1/l, F2* <= 1/l^3", lambda: (star_bounds_hold(1000), "l <= 1000", None))
        yield Check("F1*, F2* decreasing", lambda: (star_monotone(1000), "l <= 1000", None))
        yield Check("starred ordering", lambda: (star_ordering_holds(60), "p, q, t <= 60", None))
        yield Check(f"extremal pairs, lcm <= {self.options.level_bound}", self._extremes)

    def _generic(self):
        g = generic_constant(10**6)
        target = mp.mpf("0.39606")
        ok = (g.low <= target <= g.high and g.width < mp.mpf("1e-4")
              and g.high < classical_coprime_density() and g.tail_bound_validated)
        return ok, f"[{g.render(g.low)}, {g.render(g.high)}]", None if ok else "interval misses 0.39606"

    def _catalog_profiles(self):
        catalog = self.catalog()
        got = []
        for a, b in REFERENCE_PAIRS[:2]:
            profile = pair_profile(serre_level(catalog.curve(a)), serre_level(catalog.curve(b)))
            got.append((profile.m1, profile.m2))
        return _equal(got, [RATIO_MIN_PAIR, RATIO_MAX_PAIR])

    def _random_profiles(self):
        rng = random.Random(self.options.seed)
        levels = admissible_levels(2000)
        pairs = []
        while len(pairs) < self.options.random_profiles:
            m1, m2 = rng.sample(levels, 2)
            pairs.append((m1, m2))
        return _first_failure(pairs, lambda pair: self._routes(*pair))

    @staticmethod
    def _routes(m1: int, m2: int):
        profile = SerrePairProfile.from_levels(m1, m2)
        theorem, direct = ratio_theorem(profile), ratio_direct(profile)
        return theorem == direct, f"({m1},{m2}): {theorem} != {direct}"

    def _extremes(self):
        result = bounds_search(self.options.level_bound)
        ok = (result.min_pair == RATIO_MIN_PAIR and result.min_ratio == RATIO_MIN
              and result.max_pair == RATIO_MAX_PAIR and result.max_ratio == RATIO_MAX
              and not result.outside)
        detail = f"{result.pair_count} pairs, min at {result.min_pair}, max at {result.max_pair}"
        counterexample = None
        if result.outside:
            counterexample = f"R outside the range at {result.outside[0]}"
        elif not ok:
            counterexample = detail
        return ok, detail, counterexample


class ObstructionSuite(BaseSuite):
    name = "obstruction"

    def checks(self) -> Iterator[Check]:
        yield Check("pattern from (-11/p)", lambda: _equal(
            quadratic_pattern(-11, 11, 2, 3), find_obstruction("484.a1", "847.c1").pattern))
        yield Check(f"484.a1 x 847.c1 up to {self.options.obstruction_bound}", self._recorded_pair)
        yield Check(f"negative control 297.a1 x 405.a1 up to {self.options.control_bound}", self._control)

    def _recorded_pair(self):
        catalog = self.catalog()
        report = obstruction_scan(catalog.curve("484.a1"), catalog.curve("847.c1"),
                                  self.options.obstruction_bound)
        ok = report.coprime_count == 0 and report.violation_count == 0 and 11 in report.excluded_primes
        counterexample = None
        if report.violations:
            v = report.violations[0]
            counterexample = f"p={v.p}: {v.divisor} does not divide gcd {v.gcd}"
        return ok, f"{report.checked_primes} primes, {report.violation_count} violations", counterexample

    def _control(self):
        catalog = self.catalog()
        report = obstruction_scan(catalog.curve("297.a1"), catalog.curve("405.a1"),
                                  self.options.control_bound,
                                  obstruction=find_obstruction("484.a1", "847.c1"))
        ok = report.violation_count > 0
        return ok, f"{report.violation_count} violations", None if ok else "no violations found"


class InclusionExclusionSuite(BaseSuite):
    name = "inclexcl"

    def checks(self) -> Iterator[Check]:
        for a, b in REFERENCE_PAIRS:
            yield Check(f"{a} x {b} up to {self.options.inclexcl_bound}", lambda a=a, b=b: self._pair(a, b))

    def _pair(self, a: str, b: str):
        catalog = self.catalog()
        report = inclusion_exclusion_check(catalog.curve(a), catalog.curve(b), self.options.inclexcl_bound)
        return (report.equal, f"{report.coprime_count} = {report.mobius_sum}",
                None if report.equal else f"residual {report.residual}")


SUITES: Dict[str, Type[BaseSuite]] = {
    suite.name: suite
    for suite in (MatCountSuite, CharSumSuite, FOracleSuite, BoundsSuite,
                  ObstructionSuite, InclusionExclusionSuite)
}


def run_check(check: Check) -> CheckResult:
    try:
        passed, detail, counterexample = check.run()
    except CoprimeError as e:
        passed, detail, counterexample = False, f"error: {e}", type(e).__name__
    return CheckResult(name=check.name, passed=bool(passed), detail=detail,
                       counterexample=counterexample)


def run_suite(name: str, options: Optional[VerifyOptions] = None) -> SuiteReport:
    """
    Run one suite and print its pass/fail table.

    Args:
        name: One of SUITES
        options: Bounds and catalog; defaults when omitted

    Returns:
        SuiteReport; passed is True only if every check passed
    """
    if name not in SUITES:
        raise CoprimeError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    options = options or VerifyOptions()
    suite = SUITES[name](options)

    log_banner(f"verify: {name}")
    start = time.perf_counter()
    results: List[CheckResult] = []
    for check in suite.checks():
        result = run_check(check)
        log_result_row(result.name, result.passed, result.detail)
        if not result.passed and result.counterexample:
            log_error(f"counterexample: {result.counterexample}")
        results.append(result)
    log_separator()

    return SuiteReport(
        suite=name,
        passed=all(r.passed for r in results),
        checks=results,
        elapsed_ms=(time.perf_counter() - start) * 1000,
    )
