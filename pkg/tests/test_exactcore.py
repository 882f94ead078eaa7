import pytest
import sympy as sp

from src.core.exactcore import (I, K, R, Rat, asymptotic_sign, coefficient, coefficient_list,
                                constant_term, degree, faulhaber, format_poly, monomial,
                                parse_rat, poly, rat, sign_of, substitute, sum_over_i, terms,
                                value_at)
from src.utils.constants import Sign
from src.utils.errors import VariableError


class TestRationals:
    """有理数の変換"""

    def test_parse_fraction(self):
        assert parse_rat("6/4") == Rat(3, 2)
        assert parse_rat(" -7 ") == -7

    @pytest.mark.parametrize("text", ["6/-2", "3/0", "1.5", "a/b", "", "\u0661/\u0662", "\uff13"])
    def test_parse_rejects_malformed(self, text):
        with pytest.raises(ValueError):
            parse_rat(text)

    def test_rat_rejects_inexact(self):
        with pytest.raises(TypeError):
            rat(0.5)
        with pytest.raises(TypeError):
            rat(True)

    def test_rat_accepts_exact_values(self):
        assert rat(3) == 3
        assert rat("2/6") == Rat(1, 3)
        assert rat(Rat(5, 7)) == Rat(5, 7)


class TestPolynomials:
    """(i, r, k) 上の多項式操作"""

    def test_degree_of_zero_polynomial(self):
        assert degree(poly(0), "k") == -1

    def test_degree_and_coefficient(self):
        p = poly(I * K ** 2 + 3 * K ** 2 + R)
        assert degree(p, "k") == 2
        assert coefficient(p, "k", 2) == poly(I + 3)
        assert coefficient(p, "k", 0) == poly(R)

    def test_unknown_variable(self):
        with pytest.raises(VariableError):
            degree(poly(K), "x")

    def test_substitute_keeps_other_generators(self):
        assert substitute(poly(R * K + I), r=2) == poly(2 * K + I)
        assert substitute(poly(R ** 2), r=Rat(1, 2)) == poly(Rat(1, 4))

    def test_value_at_needs_every_variable(self):
        assert value_at(poly(R * K + 1), r=2, k=3) == 7
        with pytest.raises(VariableError):
            value_at(poly(R * K), r=2)

    def test_monomial_and_terms(self):
        p = monomial(Rat(2, 3), i=1, k=2)
        assert terms(p) == {(1, 0, 2): Rat(2, 3)}
        assert terms(poly(0)) == {}

    def test_constant_term_and_coefficients(self):
        p = poly(3 * K ** 2 + K - 2)
        assert constant_term(p) == -2
        assert coefficient_list(p) == [3, 1, -2]

    def test_format_poly(self):
        assert format_poly(poly(3 * K ** 2 + K - 2)) == "3*k^2 + k - 2"
        assert format_poly(poly(-K ** 3 / 2)) == "-1/2*k^3"
        assert format_poly(poly(0)) == "0"


class TestPowerSums:
    """べき和の閉じた式"""

    @pytest.mark.parametrize("p", range(7))
    def test_faulhaber_matches_literal_sum(self, p):
        for n in range(31):
            assert value_at(faulhaber(p), r=n) == sum(i ** p for i in range(n + 1))

    def test_faulhaber_low_degrees(self):
        assert faulhaber(0) == poly(R + 1)
        assert faulhaber(1) == poly(R ** 2 / 2 + R / 2)

    def test_faulhaber_negative_exponent(self):
        with pytest.raises(ValueError):
            faulhaber(-1)

    def test_faulhaber_cubes(self):
        assert faulhaber(3) == poly((R ** 4 + 2 * R ** 3 + R ** 2) / 4)

    def test_sum_over_i_cross_term(self):
        assert sum_over_i(poly(I * (R - I))) == poly((R ** 3 - R) / 6)

    def test_sum_over_i_is_additive(self, rng):
        for _ in range(10):
            p = poly(rng.randint(-5, 5) * I ** 2 * K + Rat(rng.randint(-9, 9), 4) * R)
            q = poly(Rat(rng.randint(-9, 9), 7) * I ** 3 + rng.randint(-5, 5) * I * R * K)
            assert sum_over_i(p + q) == sum_over_i(p) + sum_over_i(q)

    def test_sum_over_i_matches_literal_sum(self, rng):
        q = poly(I ** 2 * K - 3 * I * R + Rat(1, 2) * R * K)
        closed = sum_over_i(q)
        for n in range(1, 12):
            k0 = Rat(rng.randint(-5, 5), rng.randint(1, 3))
            literal = sum(value_at(q, i=i, r=n, k=k0) for i in range(n + 1))
            assert value_at(closed, r=n, k=k0) == literal


class TestAsymptoticSign:
    """k が大きいときの符号"""

    def test_positive_leading(self):
        result = asymptotic_sign(poly(K ** 2 - 10 * K))
        assert result.sign == Sign.POSITIVE
        assert result.bound == 11

    def test_negative_leading(self):
        result = asymptotic_sign(poly(-3 * K ** 3 + K))
        assert result.sign == Sign.NEGATIVE
        assert result.bound == Rat(4, 3)

    def test_large_middle_coefficient(self):
        result = asymptotic_sign(poly(K ** 3 - 10 ** 6 * K ** 2))
        assert result.sign == Sign.POSITIVE
        assert result.bound == 1 + 10 ** 6

    def test_rational_leading_coefficient(self):
        f = poly(-K ** 2 / 24 + K)
        result = asymptotic_sign(f)
        assert result.sign == Sign.NEGATIVE
        assert result.bound == 25
        assert value_at(f, k=23) > 0
        assert value_at(f, k=25) < 0

    def test_rational_polynomials(self, rng):
        for _ in range(100):
            top = rng.randint(0, 4)
            coeffs = [Rat(rng.randint(-100, 100), rng.randint(1, 100)) for _ in range(top + 1)]
            if coeffs[0] == 0:
                coeffs[0] = Rat(1, rng.randint(1, 100))
            f = poly(sum(c * K ** (top - j) for j, c in enumerate(coeffs)))
            result = asymptotic_sign(f)
            k0 = int(sp.ceiling(result.bound)) + 1
            assert sign_of(value_at(f, k=k0)) == result.sign

    def test_zero_polynomial(self):
        result = asymptotic_sign(poly(0))
        assert result.sign == Sign.ZERO
        assert result.bound == 0

    def test_sign_holds_beyond_bound(self, rng):
        for _ in range(50):
            coeffs = [rng.randint(-20, 20) for _ in range(4)]
            if coeffs[0] == 0:
                coeffs[0] = 1
            f = poly(sum(c * K ** (3 - j) for j, c in enumerate(coeffs)))
            result = asymptotic_sign(f)
            k0 = int(sp.ceiling(result.bound)) + 1
            value = value_at(f, k=k0)
            assert (value > 0) == (result.sign == Sign.POSITIVE)

    def test_rejects_other_variables(self):
        with pytest.raises(VariableError):
            asymptotic_sign(poly(R * K))
