"""
Tests for Weierstrass curves and point counting.
"""

import random

import pytest

from src.arith import sieve_primes
from src.curves import (
    CurveModP,
    PointCount,
    WeierstrassCurve,
    count_points,
    count_points_bsgs,
    count_points_naive,
    discriminant,
    ec_add,
    ec_mul,
    factored_cubic_discriminant,
    is_good_reduction,
    order_annihilates,
    random_point,
)
from src.errors import BadReduction, DomainError, SingularCurve

CATALOG_AINVS = {
    "140.b1": ([0, 0, 0, 32, 212], -21512960),
    "34020.c1": ([0, 0, 0, -12393, 197073], 105039483711120),
    "297.a1": ([0, 0, 1, -81, 290], -2381643),
    "405.a1": ([0, 0, 1, -3, -2], 405),
    "484.a1": ([0, 1, 0, -9357, 347279], -603634608896),
    "847.c1": ([0, 1, 1, -10809, -436166], -954871379),
}


def curve(label: str) -> WeierstrassCurve:
    return WeierstrassCurve.from_ainvs(CATALOG_AINVS[label][0], label=label)


class TestDiscriminant:
    @pytest.mark.parametrize("label", sorted(CATALOG_AINVS))
    def test_catalog_values(self, label):
        assert discriminant(curve(label)) == CATALOG_AINVS[label][1]

    def test_singular_rejected(self):
        with pytest.raises(SingularCurve):
            WeierstrassCurve.short(0, 0)
        with pytest.raises(SingularCurve):
            WeierstrassCurve.short(-3, 2)

    def test_short_formula(self):
        E = WeierstrassCurve.short(32, 212)
        assert E.discriminant == -16 * (4 * 32**3 + 27 * 212**2)

    def test_factored_cubic(self):
        E = WeierstrassCurve.from_factored_cubic(0, 1, -1)
        assert E.discriminant == factored_cubic_discriminant(0, 1, -1) == 64

    @pytest.mark.parametrize("label", ["297.a1", "484.a1", "847.c1"])
    def test_short_model_scales_by_6_12(self, label):
        E = curve(label)
        assert E.short_model().discriminant == 6**12 * E.discriminant

    def test_invariant_relation(self):
        E = curve("847.c1")
        assert 1728 * E.discriminant == E.c4**3 - E.c6**2

    def test_wrong_arity(self):
        with pytest.raises(DomainError):
            WeierstrassCurve.from_ainvs([1, 2, 3])


class TestReduction:
    def test_bad_primes(self):
        E = curve("484.a1")
        assert not is_good_reduction(E, 2)
        assert not is_good_reduction(E, 11)
        assert is_good_reduction(E, 3)

    def test_override(self):
        E = WeierstrassCurve.from_ainvs([0, 0, 1, -3, -2], bad_primes_override=[7])
        assert not E.is_good_reduction(7)
        assert E.is_good_reduction(11)

    def test_count_raises_at_bad_prime(self):
        with pytest.raises(BadReduction) as info:
            count_points(curve("140.b1"), 5)
        assert info.value.p == 5

    def test_reduce_at_bad_prime(self):
        with pytest.raises(BadReduction):
            curve("847.c1").reduce(7)


class TestPointCount:
    def test_hasse_enforced(self):
        with pytest.raises(DomainError):
            PointCount.from_order(5, 20)

    def test_trace(self):
        pc = PointCount.from_order(7, 5)
        assert pc.trace == 3

    def test_small_characteristic(self):
        assert count_points(curve("140.b1"), 3).order == 1
        assert count_points(curve("297.a1"), 2).order == 5

    @pytest.mark.parametrize("p", [5, 11, 17, 23, 29])
    def test_supersingular_cubic(self, p):
        # y^2 = x^3 + 1 has p + 1 points when p = 2 mod 3
        assert count_points(WeierstrassCurve.short(0, 1), p).order == p + 1

    def test_bsgs_supersingular_large(self):
        p = 999983
        assert count_points(WeierstrassCurve.short(0, 1), p).order == p + 1
        assert count_points(WeierstrassCurve.short(-1, 0), p).order == p + 1

    def test_naive_matches_enumeration(self):
        E = curve("405.a1")
        for p in (7, 11, 13, 17):
            cmp = E.reduce(p)
            affine = sum(
                1 for x in range(p) for y in range(p)
                if (y * y + cmp.a1 * x * y + cmp.a3 * y
                    - (x**3 + cmp.a2 * x * x + cmp.a4 * x + cmp.a6)) % p == 0
            )
            assert count_points_naive(cmp).order == affine + 1

    def test_bsgs_matches_naive_up_to_2000(self):
        for label in CATALOG_AINVS:
            E = curve(label)
            for p in sieve_primes(2000):
                if not E.is_good_reduction(p):
                    continue
                cmp = E.reduce(p)
                assert count_points_bsgs(cmp).order == count_points_naive(cmp).order, (label, p)

    def test_threshold_dispatch(self):
        E = curve("297.a1")
        for p in (1009, 1999, 3001):
            assert (count_points(E, p, naive_threshold=10**9).order
                    == count_points(E, p, naive_threshold=0).order)

    def test_seed_independent(self):
        E = curve("34020.c1")
        p = 100003
        assert count_points(E, p, seed=0).order == count_points(E, p, seed=99).order

    @pytest.mark.parametrize("label", sorted(CATALOG_AINVS))
    def test_lagrange_near_million(self, label):
        E = curve(label)
        p = 999983
        order = count_points(E, p).order
        assert order_annihilates(E.reduce(p), order)
        assert not order_annihilates(E.reduce(p), order + 1, checks=3)


class TestGroupLaw:
    def test_inverse_sums_to_infinity(self):
        p, A, B = 101, 2, 3
        P = random_point(A, B, p, random.Random(1))
        assert ec_add(P, (P[0], (-P[1]) % p), A, p) is None

    def test_scalar_matches_repeated_addition(self):
        p, A, B = 1009, 5, 7
        P = random_point(A, B, p, random.Random(2))
        acc = None
        for _ in range(13):
            acc = ec_add(acc, P, A, p)
        assert ec_mul(13, P, A, p) == acc

    def test_short_coefficients_need_large_p(self):
        with pytest.raises(DomainError):
            CurveModP(p=3, a1=0, a2=0, a3=0, a4=1, a6=1).short_coefficients()
