from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from tropgw.exactnum import (
    GaussRational,
    LaurentSeries,
    QHalfLaurent,
    normalized_sin_half,
    q_to_lambda,
    quantum_integer_q,
    two_sin_half,
)


def F(a, b=1):
    return Fraction(a, b)


class TestSinHalf:
    def test_n1_k5_taylor(self):
        # oracle: Taylor expansion of 2 sin(x/2), computed independently with
        # sympy and frozen here
        s = normalized_sin_half(1, 5)
        assert s.low == 1
        assert s.coeff(1) == GaussRational.of(F(1))
        assert s.coeff(2).is_zero()
        assert s.coeff(3) == GaussRational.of(F(-1, 24))
        assert s.coeff(5) == GaussRational.of(F(1, 1920))

    def test_n2_is_plain_sine(self):
        s = normalized_sin_half(2, 3)
        assert s.coeff(1) == GaussRational.of(F(1))
        assert s.coeff(3) == GaussRational.of(F(-1, 6))

    def test_leading_term_is_x_for_all_n(self):
        for n in range(1, 13):
            s = normalized_sin_half(n, 20)
            assert s.low == 1
            assert s.coeff(1) == GaussRational.of(F(1))

    def test_sympy_oracle(self):
        sympy = pytest.importorskip("sympy")
        x = sympy.symbols("x")
        for n in (1, 3, 5):
            expans = sympy.series(2 * sympy.sin(n * x / 2), x, 0, 13).removeO()
            s = two_sin_half(n, 12)
            for e in range(1, 13):
                expect = sympy.Rational(expans.coeff(x, e))
                got = s.coeff(e)
                assert got.im == 0
                assert got.re == Fraction(int(expect.p), int(expect.q))

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            two_sin_half(0, 5)


class TestSeriesArithmetic:
    def test_x_times_inverse_x(self):
        x = LaurentSeries.monomial(1, 1, 20)
        assert (x * x.inverse()).agrees(LaurentSeries.one(18))

    def test_square_by_convolution_oracle(self):
        # brute-force coefficient convolution of (x - x^3/24) with itself
        a = LaurentSeries(1, [F(1), F(0), F(-1, 24)], 4)
        coeffs = {1: F(1), 3: F(-1, 24)}
        conv = {}
        for e1, c1 in coeffs.items():
            for e2, c2 in coeffs.items():
                conv[e1 + e2] = conv.get(e1 + e2, F(0)) + c1 * c2
        sq = a * a
        assert sq.order == 5
        for e in range(2, 6):
            assert sq.coeff(e) == GaussRational.of(conv.get(e, F(0)))

    def test_zero_annihilates(self):
        z = LaurentSeries.zero(20)
        s = normalized_sin_half(3, 20)
        assert (z * s).is_zero()
        assert (s * z).is_zero()

    def test_division_tracks_valuation_loss(self):
        a = LaurentSeries(1, [F(1), F(0), F(-1, 24)], 5)
        inv = a.inverse()
        assert inv.low == -1
        assert inv.order == 3  # two powers lost to the valuation

    def test_truncate_cannot_extend(self):
        s = normalized_sin_half(1, 5)
        with pytest.raises(ValueError):
            s.truncate(9)

    def test_json_round_trip(self):
        s = normalized_sin_half(2, 7).scale(GaussRational(F(1, 3), F(2)))
        back = LaurentSeries.from_json(s.to_json())
        assert back == s


small_fracs = st.fractions(min_value=-3, max_value=3, max_denominator=6)


def series_strategy():
    return st.builds(
        lambda low, cs: LaurentSeries(low, cs, low + len(cs) + 1),
        st.integers(min_value=-3, max_value=3),
        st.lists(small_fracs, min_size=0, max_size=5),
    )


class TestRingAxioms:
    @given(series_strategy(), series_strategy(), series_strategy())
    def test_mul_associative_on_common_range(self, a, b, c):
        left = (a * b) * c
        right = a * (b * c)
        assert left.agrees(right)

    @given(series_strategy(), series_strategy(), series_strategy())
    def test_distributive_on_common_range(self, a, b, c):
        left = a * (b + c)
        right = a * b + a * c
        assert left.agrees(right)

    @given(series_strategy(), series_strategy())
    def test_addition_commutes(self, a, b):
        assert (a + b) == (b + a)


class TestQHalf:
    def test_quantum_integer_small_cases(self):
        q1 = quantum_integer_q(1)
        assert q1.coeff(1) == GaussRational.of(F(-1))
        assert q1.coeff(-1) == GaussRational.of(F(-1))
        q2 = quantum_integer_q(2)
        assert q2.coeff(2) == GaussRational(F(0), F(1))
        assert q2.coeff(-2) == GaussRational(F(0), F(-1))

    def test_at_most_one_term_per_exponent(self):
        p = QHalfLaurent(((1, 1), (1, 2), (0, 3), (2, 0)))
        assert p.terms == ((0, GaussRational.of(F(3))), (1, GaussRational.of(F(3))))

    def test_json_round_trip(self):
        p = quantum_integer_q(3).scale(F(1, 3)) + QHalfLaurent.monomial(F(2, 7), 4)
        assert QHalfLaurent.from_json(p.to_json()) == p


class TestSubstitution:
    def test_symmetric_pair_gives_negative_sine(self):
        # i e^{ix/2} + (i e^{ix/2})^{-1} = -2 sin(x/2), oracle-verified
        p = QHalfLaurent(((1, 1), (-1, 1)))
        ser, real = q_to_lambda(p, 3)
        assert real
        assert ser.agrees(two_sin_half(1, 3).scale(-1))

    def test_constant_passes_through(self):
        ser, real = q_to_lambda(QHalfLaurent.one(), 4)
        assert real
        assert ser.agrees(LaurentSeries.one(4))

    def test_negated_pair_is_the_basic_bracket(self):
        p = QHalfLaurent(((1, -1), (-1, -1)))
        ser, real = q_to_lambda(p, 12)
        assert real
        assert ser.agrees(two_sin_half(1, 12))

    def test_bridge_for_all_small_n(self):
        for n in range(1, 13):
            ser, real = q_to_lambda(quantum_integer_q(n), 20)
            assert real
            assert ser.agrees(two_sin_half(n, 20))

    def test_imaginary_residue_is_flagged_not_raised(self):
        ser, real = q_to_lambda(QHalfLaurent.monomial(1, 1), 4)
        assert not real
