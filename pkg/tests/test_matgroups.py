"""
Tests for matrix counts in GL2(Z/nZ), the characters epsilon and psi, and the f oracle.
"""

from fractions import Fraction

import pytest

from src.constants import SerrePairProfile, f_closed
from src.errors import DomainError, EnumerationTooLarge
from src.matgroups import (
    CountTable,
    MatModN,
    SubgroupDescriptor,
    SubgroupKind,
    char_sums,
    count_B,
    count_psi_plus_X_alpha,
    count_X_alpha,
    delta_order,
    delta_order_bruteforce,
    delta_order_squarefree,
    enumerate_gl2,
    epsilon_sign,
    f_oracle,
    fiber_product_order,
    gl2_order,
    psi_plus_closed_form,
    psi_value,
    units,
    x_alpha_table,
    x_alpha_table_bruteforce,
)
from src.matgroups.counting import count_B_pairs, count_psi_plus_X_alpha_bruteforce, delta_pairs_bruteforce

SMALL_PRIMES = [2, 3, 5, 7, 11, 13]


class TestMatModN:
    def test_entries_normalized(self):
        M = MatModN(5, 7, -1, 10, 3)
        assert M.entries == (2, 4, 0, 3)

    def test_det_and_trace(self):
        M = MatModN(7, 1, 2, 3, 4)
        assert M.det == (4 - 6) % 7
        assert M.trace == 5

    def test_det_one_minus(self):
        M = MatModN(11, 2, 5, 3, 9)
        I = MatModN.identity(11)
        one_minus = MatModN(11, I.a - M.a, I.b - M.b, I.c - M.c, I.d - M.d)
        assert M.det_one_minus == one_minus.det

    def test_product(self):
        M = MatModN(6, 1, 1, 0, 1)
        assert (M @ M).entries == (1, 2, 0, 1)

    def test_reduce(self):
        assert MatModN(6, 5, 4, 3, 2).reduce(3).entries == (2, 1, 0, 2)


class TestEnumeration:
    @pytest.mark.parametrize("ell", [2, 3, 5, 7])
    def test_gl2_order(self, ell):
        assert sum(1 for _ in enumerate_gl2(ell)) == gl2_order(ell)

    def test_composite_modulus(self):
        assert sum(1 for _ in enumerate_gl2(6)) == gl2_order(2) * gl2_order(3)

    def test_guard(self):
        with pytest.raises(EnumerationTooLarge):
            list(enumerate_gl2(11, guard=10**4))

    def test_units(self):
        assert units(10) == [1, 3, 7, 9]
        assert units(1) == [0]


class TestCounts:
    @pytest.mark.parametrize("ell", SMALL_PRIMES)
    def test_delta_order(self, ell):
        assert delta_order_bruteforce(ell) == delta_order(ell) == ell**2 * (ell - 1) ** 3 * (ell + 1) ** 2

    @pytest.mark.parametrize("ell", SMALL_PRIMES)
    def test_fiber_product(self, ell):
        assert fiber_product_order(gl2_order(ell), gl2_order(ell), ell - 1) == delta_order(ell)

    def test_fiber_product_needs_common_quotient(self):
        with pytest.raises(DomainError):
            fiber_product_order(6, 10, 4)

    @pytest.mark.parametrize("n", [2, 3, 6])
    def test_delta_pairs(self, n):
        assert delta_pairs_bruteforce(n) == delta_order_squarefree(n) == delta_order_bruteforce(n)

    @pytest.mark.parametrize("ell", SMALL_PRIMES)
    def test_x_alpha(self, ell):
        for alpha in units(ell):
            expected = ell**2 if alpha == 1 else ell**2 + ell
            assert count_X_alpha(ell, alpha) == expected

    def test_x_alpha_at_two(self):
        assert count_X_alpha(2, 1) == 4

    @pytest.mark.parametrize("n", [6, 10, 15])
    def test_x_table_crt(self, n):
        assert x_alpha_table(n).counts == x_alpha_table_bruteforce(n).counts

    def test_x_alpha_needs_unit(self):
        with pytest.raises(DomainError):
            count_X_alpha(10, 5)

    @pytest.mark.parametrize("ell", SMALL_PRIMES)
    def test_B(self, ell):
        assert count_B(ell) == ell**2 * (ell + 2) * (ell * ell - ell - 1)

    @pytest.mark.parametrize("ell", [2, 3, 5])
    def test_B_pairs(self, ell):
        assert count_B_pairs(ell) == count_B(ell)

    def test_count_table_lookup(self):
        table = CountTable(n=5, counts={1: 25, 2: 30})
        assert table[6] == 25
        assert table[3] == 0
        assert table.total == 55


class TestCharacters:
    def test_epsilon_is_a_homomorphism(self):
        mats = list(enumerate_gl2(2))
        assert len(mats) == 6
        for A in mats:
            for B in mats:
                assert epsilon_sign(A @ B) == epsilon_sign(A) * epsilon_sign(B)

    def test_epsilon_values(self):
        assert epsilon_sign(MatModN.identity(2)) == 1
        assert epsilon_sign(MatModN(2, 0, 1, 1, 0)) == -1
        assert sum(epsilon_sign(M) for M in enumerate_gl2(2)) == 0

    def test_epsilon_needs_mod_two(self):
        with pytest.raises(DomainError):
            epsilon_sign(MatModN(3, 1, 0, 0, 1))

    def test_psi_is_a_homomorphism_mod_6(self):
        mats = list(enumerate_gl2(6))[::37]
        for A in mats:
            for B in mats:
                assert psi_value(A @ B, 6) == psi_value(A, 6) * psi_value(B, 6)

    def test_psi_kernel_has_index_two(self):
        assert sum(1 for M in enumerate_gl2(6) if psi_value(M, 6) == 1) * 2 == gl2_order(2) * gl2_order(3)

    @pytest.mark.parametrize("m", [4, 12, 9, 1])
    def test_psi_level_rejected(self, m):
        with pytest.raises(DomainError):
            psi_value(MatModN.identity(36), m)

    @pytest.mark.parametrize("n", [2, 6, 10])
    def test_psi_plus_counts(self, n):
        for alpha in units(n):
            brute = count_psi_plus_X_alpha_bruteforce(n, alpha)
            assert brute == count_psi_plus_X_alpha(n, alpha) == psi_plus_closed_form(n, alpha)

    @pytest.mark.parametrize("n", [30, 70])
    def test_psi_plus_closed_form(self, n):
        for alpha in units(n):
            assert count_psi_plus_X_alpha(n, alpha) == psi_plus_closed_form(n, alpha)


class TestSubgroups:
    def test_for_level(self):
        assert SubgroupDescriptor.for_level(30, 6).kind is SubgroupKind.PSI_KERNEL
        assert SubgroupDescriptor.for_level(30, 14).kind is SubgroupKind.FULL_GL2

    def test_contains(self):
        kernel = SubgroupDescriptor.psi_kernel(6, 6)
        assert kernel.contains(MatModN.identity(6))
        # swap: epsilon = -1, (5 / 3) = -1
        assert kernel.contains(MatModN(6, 0, 1, 1, 0))
        assert not kernel.contains(MatModN(6, 1, 0, 0, 5))
        assert not kernel.contains(MatModN(6, 2, 0, 0, 1))
        assert not kernel.contains(MatModN.identity(3))


class TestCharSums:
    @pytest.mark.parametrize("n", [2, 6, 10, 30, 70])
    def test_closed_forms(self, n):
        for r in range(1, n + 1):
            if n % r == 0:
                sums = char_sums(n, r)
                assert sums.agree, (n, r, sums)

    @pytest.mark.parametrize("t,n", [(3, 6), (15, 30)])
    def test_parity(self, t, n):
        assert char_sums(n, t).T == char_sums(n, 2 * t).T

    def test_r_must_divide(self):
        with pytest.raises(DomainError):
            char_sums(30, 7)


class TestFOracle:
    @pytest.mark.parametrize("d", [1, 2, 3, 5, 6, 10, 15, 30])
    def test_small_profile(self, d):
        profile = SerrePairProfile.from_levels(6, 10)
        assert f_oracle(d, 6, 10) == f_closed(d, profile)

    @pytest.mark.parametrize("d", [1, 2, 3, 5, 7, 6, 10, 14, 15, 21, 35, 30, 42, 70, 105, 210])
    def test_large_profile(self, d):
        profile = SerrePairProfile.from_levels(70, 210)
        assert f_oracle(d, 70, 210) == f_closed(d, profile)

    def test_reference_values(self):
        assert f_oracle(30, 6, 10) == Fraction(5263, 884736)
        assert f_oracle(210, 70, 210) == Fraction(168823, 1358954496)

    def test_trivial_divisor(self):
        assert f_oracle(1, 6, 10) == 1

    def test_non_squarefree_rejected(self):
        with pytest.raises(DomainError):
            f_oracle(12, 6, 10)

    @pytest.mark.parametrize("d", [7, 14, 21, 0])
    def test_divisor_of_lcm_required(self, d):
        with pytest.raises(DomainError):
            f_oracle(d, 6, 10)

