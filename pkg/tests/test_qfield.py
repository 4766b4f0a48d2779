"""Exact arithmetic in Q(q): canonical forms, the q-integer layer, and the
four q-combinatorial summation identities."""

import random
from fractions import Fraction
from itertools import permutations

import pytest

from linkbasis.qfield import (ExactScalar, LaurentPoly, S_ONE, S_ZERO, parse_poly,
                              parse_scalar, poly_divmod, poly_exact_div, poly_gcd,
                              qbin, qfact, qint, render_poly, render_scalar)

q = ExactScalar.q_power


def rand_scalar(rng, deg=3):
    num = LaurentPoly({rng.randint(-deg, deg): Fraction(rng.randint(-5, 5))
                       for _ in range(rng.randint(1, 3))})
    den = LaurentPoly({rng.randint(-deg, deg): Fraction(rng.randint(1, 5))
                       for _ in range(rng.randint(1, 2))})
    if num.is_zero():
        num = LaurentPoly.monomial(1)
    return ExactScalar(num, den)


class TestQInt:
    def test_zero_and_one(self):
        assert qint(0).is_zero()
        assert qint(1) == S_ONE

    def test_two(self):
        assert qint(2) == q(1) + q(-1)

    def test_antisymmetry(self):
        for m in range(1, 7):
            assert qint(-m) == -qint(m)

    def test_defining_fraction(self):
        for m in range(-6, 7):
            assert qint(m) * (q(1) - q(-1)) == q(m) - q(-m)


class TestQFact:
    def test_empty_product(self):
        assert qfact(0) == S_ONE

    def test_two(self):
        assert qfact(2) == q(1) + q(-1)

    def test_three_expansion(self):
        # (q + q^-1)(q^2 + 1 + q^-2), expanded
        assert qfact(3) == (qint(2)) * (q(2) + q(0) + q(-2))

    def test_product_recursion(self):
        for n in range(1, 8):
            assert qfact(n) == qfact(n - 1) * qint(n)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            qfact(-1)


class TestQBin:
    def test_edges(self):
        for n in range(0, 7):
            assert qbin(n, 0) == S_ONE
            assert qbin(n, n) == S_ONE

    def test_two_one(self):
        assert qbin(2, 1) == qint(2)

    def test_always_polynomial(self):
        for n in range(0, 9):
            for k in range(0, n + 1):
                assert qbin(n, k).den == S_ONE.den

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            qbin(3, 4)
        with pytest.raises(ValueError):
            qbin(3, -1)

    def test_recursion_appendix_a(self):
        # [n k] = q^k [n-1 k] + q^{k-n} [n-1 k-1]
        for n in range(1, 9):
            for k in range(1, n):
                assert qbin(n, k) == q(k) * qbin(n - 1, k) + q(k - n) * qbin(n - 1, k - 1)


class TestSummationIdentities:
    def test_inversion_sum(self):
        # sum over S_n of q^{2 inv} = q^{C(n,2)} [n]!
        for n in range(0, 6):
            total = S_ZERO
            for sigma in permutations(range(n)):
                inv = sum(1 for i in range(n) for j in range(i + 1, n)
                          if sigma[i] > sigma[j])
                total = total + q(2 * inv)
            assert total == q(n * (n - 1) // 2) * qfact(n)

    @pytest.mark.parametrize("nu1", range(0, 7))
    @pytest.mark.parametrize("nu2", range(0, 7))
    def test_summation_c(self, nu1, nu2):
        for n in range(0, min(nu1, nu2) + 1):
            lhs = S_ZERO
            for k in range(0, n + 1):
                lhs = lhs + (qbin(n, k) * q(k * (2 * n - nu1 - nu2 - 2))
                             * qfact(nu1 - n + k) * qfact(nu2 - k))
            rhs = (q(n * (n - nu1 - 1)) * qfact(nu1 - n) * qfact(nu2 - n)
                   * qfact(nu1 + nu2 - n + 1) / qfact(nu1 + nu2 - 2 * n + 1))
            assert lhs == rhs

    @pytest.mark.parametrize("nu1", range(0, 7))
    @pytest.mark.parametrize("nu2", range(0, 7))
    def test_summation_d(self, nu1, nu2):
        for n in range(0, min(nu1, nu2) + 1):
            lhs = S_ZERO
            for k in range(0, n + 1):
                lhs = lhs + (qbin(n, k) * q(k * (nu1 + nu2 - 2 * n + 2))
                             * qfact(nu1 - k) * qfact(nu2 - n + k))
            rhs = (q(n * (nu2 + 1 - n)) * qfact(nu1 - n) * qfact(nu2 - n)
                   * qfact(nu1 + nu2 - n + 1) / qfact(nu1 + nu2 - 2 * n + 1))
            assert lhs == rhs


class TestFieldLaws:
    def test_random_laws(self):
        rng = random.Random(20240)
        for _ in range(25):
            a, b, c = (rand_scalar(rng) for _ in range(3))
            assert a * (b + c) == a * b + a * c
            assert (a + b) + c == a + (b + c)
            assert a - a == S_ZERO
            if a and b:
                assert (a / b) * (b / a) == S_ONE
                assert a * a.inverse() == S_ONE

    def test_powers(self):
        a = qint(3) / qint(2)
        assert a ** 0 == S_ONE
        assert a ** 3 == a * a * a
        assert a ** -2 == (a * a).inverse()

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            S_ONE / S_ZERO
        with pytest.raises(ZeroDivisionError):
            S_ZERO.inverse()


class TestCanonicalForm:
    def test_denominator_normalization(self):
        # q^3/q = q^2 exactly; units never linger in the denominator
        x = ExactScalar(LaurentPoly.monomial(1, 3), LaurentPoly.monomial(1, 1))
        assert x == q(2)
        assert x.den == S_ONE.den

    def test_reduction(self):
        # (q^2 - q^-2)/(q - q^-1) = [2]
        num = q(2) - q(-2)
        assert num / (q(1) - q(-1)) == qint(2)

    def test_denominator_constant_term_one(self):
        rng = random.Random(7)
        for _ in range(20):
            x = rand_scalar(rng)
            if x.den.c:
                assert x.den.min_exp() == 0
                assert x.den.c[0] == Fraction(1)

    def test_equality_is_data_comparison(self):
        a = qint(5) / qint(3)
        b = (qint(5) * qint(2)) / (qint(3) * qint(2))
        assert a.num == b.num and a.den == b.den


class TestPolyAlgorithms:
    def test_divmod(self):
        a = qfact(4).num
        b = qint(2).num
        quo, rem = poly_divmod(a, b)
        assert rem.is_zero()
        assert quo * b == a

    def test_exact_div_raises(self):
        with pytest.raises(ValueError):
            poly_exact_div(qint(3).num, qint(2).num)

    def test_gcd(self):
        a = qint(2).num * qint(3).num
        b = qint(2).num * qint(4).num
        g = poly_gcd(a, b)
        assert poly_exact_div(a, g) is not None
        assert poly_exact_div(b, g) is not None
        # [2] divides the gcd ([4] = [2](q^2+q^-2))
        assert poly_divmod(g, qint(2).num)[1].is_zero()


class TestSerialization:
    def test_render_examples(self):
        assert render_poly(qint(2).num) == "1*q^-1 + 1*q^1"
        assert render_scalar(S_ZERO) == "0 / 1*q^0"

    def test_round_trip(self):
        rng = random.Random(99)
        for _ in range(25):
            x = rand_scalar(rng)
            assert parse_scalar(render_scalar(x)) == x

    def test_round_trip_fractional_coeffs(self):
        x = ExactScalar(LaurentPoly({-2: Fraction(3, 7), 5: Fraction(-1, 2)}),
                        qint(3).num)
        assert parse_scalar(render_scalar(x)) == x

    def test_parse_poly_zero(self):
        assert parse_poly("0").is_zero()

    def test_parse_rejects_garbage(self):
        with pytest.raises(ValueError):
            parse_scalar("1*q^2")  # no separator
        with pytest.raises(ValueError):
            parse_poly("q + 1")
