from fractions import Fraction

import pytest

from tropgw.enumeration import SearchBounds, cycle_from_constraints
from tropgw.exactnum import LaurentSeries, QHalfLaurent, two_sin_half
from tropgw.invariants import (
    CountRequest,
    ToricFan,
    absolute_invariant,
    apply_scaling_convention,
    certified_count,
    cp3_fan,
    derive_line_factor,
    is_convex,
    is_convex_relative,
    p1_cubed_fan,
    reduced_dt,
    relative_invariant,
    weighted_count,
)
from tropgw.lattice import IntMatrix

K = 20
B = SearchBounds()


def count(ends, cons, mode="lambda", connected=True, seed=0, order=K,
          bounds=B):
    cyc = cycle_from_constraints(ends, cons)
    req = CountRequest(tuple(ends), cyc, connected, mode, bounds)
    return weighted_count(req, order, seed)


class TestFans:
    def test_bundled_fans_valid_and_smooth(self):
        assert cp3_fan().is_smooth()
        assert p1_cubed_fan().is_smooth()

    def test_nonprimitive_ray_rejected(self):
        with pytest.raises(ValueError):
            ToricFan.from_max_cones([(2, 0, 0)], [(0,)])

    def test_faces_required(self):
        with pytest.raises(ValueError):
            ToricFan(((1, 0, 0), (0, 1, 0)), ((0, 1),), frozenset())

    def test_json_round_trip(self):
        fan = cp3_fan(special=(1,))
        assert ToricFan.from_json(fan.to_json()) == fan


class TestConvexity:
    def test_p1_cubed_convex(self):
        assert is_convex(p1_cubed_fan())

    def test_cp3_convex(self):
        assert is_convex(cp3_fan())

    def test_violating_fan(self):
        # a ray inside the span of two others
        bad = ToricFan.from_max_cones(
            [(1, 0, 0), (0, 1, 0), (1, 1, 0)], [(0, 2), (1, 2)])
        assert not is_convex(bad)

    def test_relative_all_special_reduces_to_absolute(self):
        fan_all = cp3_fan(special=(0, 1, 2, 3))
        assert is_convex_relative(fan_all) == is_convex(cp3_fan())

    def test_relative_no_special_vacuous(self):
        bad = ToricFan.from_max_cones(
            [(1, 0, 0), (0, 1, 0), (1, 1, 0)], [(0, 2), (1, 2)])
        assert is_convex_relative(bad)  # nothing is special

    def test_relative_one_special(self):
        assert is_convex_relative(cp3_fan(special=(0,)))


ENDS_SQUARE = [(1, 0, 0), (0, 1, 0), (-1, 0, 0), (0, -1, 0)]


class TestDegenerationInvariance:
    def test_family_one_value_and_invariance(self):
        ra = count(ENDS_SQUARE, {2: ("point", (0, 0, 0)),
                                 1: ("plane", 1, 3), 3: ("plane", 1, -4)})
        rb = count(ENDS_SQUARE, {2: ("point", (0, 0, 0)),
                                 1: ("plane", 1, -4), 3: ("plane", 1, 3)})
        assert ra.value.agrees(rb.value)
        one = two_sin_half(1, K)
        assert ra.value.agrees(one * one)

    def test_family_two_invariance(self):
        for k in (1, 2):
            for n in (1, 2):
                ends = [(k, 0, 0), (0, n * k, 0), (0, 1, 0), (-k, -n * k - 1, 0)]
                ra = count(ends, {1: ("point", (0, 0, 0)),
                                  2: ("plane", 0, 2), 3: ("plane", 0, -3)})
                rb = count(ends, {1: ("point", (0, 0, 0)),
                                  2: ("plane", 0, -3), 3: ("plane", 0, 2)})
                assert ra.value.agrees(rb.value), (k, n)

    def test_family_three_value_and_invariance(self):
        for n in (1, 2, 3):
            ends = [(1, 0, 0), (0, 1, 0), (-1, 0, n), (0, -1, -n)]
            ra = count(ends, {1: ("point", (0, 0, -1)), 2: ("point", (0, 0, 1))})
            rb = count(ends, {1: ("point", (0, 0, 1)), 2: ("point", (0, 0, -1))})
            assert ra.value.agrees(rb.value), n
            one = two_sin_half(1, K)
            assert ra.value.agrees((one * one).scale(n))


class TestScalingConvention:
    def test_primitive_ends_unchanged(self):
        cyc = cycle_from_constraints(ENDS_SQUARE, {2: ("point", (0, 0, 0))})
        scaled = apply_scaling_convention(cyc, ENDS_SQUARE)
        assert scaled == cyc

    def test_second_family_factor(self):
        k, n = 2, 3
        ends = [(k, 0, 0), (0, n * k, 0), (0, 1, 0), (-k, -n * k - 1, 0)]
        cyc = cycle_from_constraints(ends, {1: ("point", (0, 0, 0)),
                                            2: ("plane", 0, 2),
                                            3: ("plane", 0, -3)})
        scaled = apply_scaling_convention(cyc, ends)
        # constrained nonzero ends: (k,0,0) scale k, (0,nk,0) scale nk, (0,1,0) scale 1
        assert scaled.strata[0].multiplicity == Fraction(k * n * k)

    def test_no_constraints_unchanged(self):
        cyc = cycle_from_constraints(ENDS_SQUARE, {})
        assert apply_scaling_convention(cyc, ENDS_SQUARE) == cyc


class TestAbsolute:
    def test_product_of_lines_anchor(self):
        deg = [1, 1, 0, 0, 0, 0]
        inv = absolute_invariant(p1_cubed_fan(), deg, 1, K, seed=0)
        assert inv.agrees(LaurentSeries.monomial(1, -1, K))

    def test_line_factor_rederivation(self):
        f = derive_line_factor(K, seed=0)
        assert f.agrees(LaurentSeries.monomial(1, -1, K))

    def test_cp3_two_point_anchor(self):
        inv = absolute_invariant(cp3_fan(), [1, 1, 1, 1], 2, K, seed=0)
        one = two_sin_half(1, K)
        assert inv.agrees((one * one).shift(-2))

    def test_unbalanced_degrees_rejected(self):
        with pytest.raises(ValueError):
            absolute_invariant(cp3_fan(), [1, 0, 0, 0], 1, K)

    def test_zero_class_rejected(self):
        with pytest.raises(ValueError):
            absolute_invariant(cp3_fan(), [0, 0, 0, 0], 1, K)

    def test_nonconvex_fan_rejected(self):
        bad = ToricFan.from_max_cones(
            [(1, 0, 0), (0, 1, 0), (1, 1, 0), (-1, -1, 0)],
            [(0, 2), (1, 2), (0, 3), (1, 3)])
        with pytest.raises(ValueError):
            absolute_invariant(bad, [1, 1, 1, 1], 0, K)

    def test_insufficient_insertions_rejected(self):
        # one point against a two-point expected dimension is a codimension
        # mismatch, reported before any enumeration happens
        with pytest.raises(ValueError):
            absolute_invariant(cp3_fan(), [1, 1, 1, 1], 1, K)


class TestRelative:
    def test_no_special_reduces_to_plain_count(self):
        fan = p1_cubed_fan()
        ends = [(1, 0, 0), (0, 1, 0), (-1, -1, 0)]
        cons = {1: ("point", (0, 1, 17)), 2: ("plane", 0, 4)}
        rel = relative_invariant(fan, [0] * 6, ends, cons, K, seed=0)
        plain = count(ends, cons).value
        assert rel.agrees(plain)

    def test_all_special_reduces_to_absolute(self):
        fan = cp3_fan(special=(0, 1, 2, 3))
        pts = {1: ("point", (Fraction(3, 7), Fraction(-2, 5), Fraction(1, 3))),
               2: ("point", (Fraction(-1, 2), Fraction(5, 11), Fraction(4, 9)))}
        rel = relative_invariant(fan, [1, 1, 1, 1],
                                 [(0, 0, 0), (0, 0, 0)], pts, K, seed=0)
        absv = absolute_invariant(cp3_fan(), [1, 1, 1, 1], 2, K, seed=0)
        assert rel.agrees(absv)

    def test_degree_on_nonspecial_ray_rejected(self):
        fan = cp3_fan(special=(0,))
        with pytest.raises(ValueError):
            relative_invariant(fan, [1, 1, 1, 1], [(0, 0, 0)], {}, K)


class TestReducedDT:
    def test_product_of_lines_is_q(self):
        deg = [1, 1, 0, 0, 0, 0]
        dt = reduced_dt(p1_cubed_fan(), deg, 1, K, seed=0)
        assert dt == QHalfLaurent.monomial(1, 2)

    def test_cp3_substitutes_to_the_absolute_series(self):
        # F^DT(i e^{ix/2}) = F / x^k at the level of the assembled invariants:
        # here the two marker ends contribute x^2 and the q-side prefactor
        # q^{d/2} absorbs the x^{-d} normalization, so the substitution of
        # W^DT equals W * x^{-k} with W the absolute count before rescaling.
        from tropgw.exactnum import q_to_lambda
        fan = cp3_fan()
        dt = reduced_dt(fan, [1, 1, 1, 1], 2, K, seed=0)
        # undo the q^{d/2}/d! prefactor to recover W^DT
        wdt = dt * QHalfLaurent.monomial(1, -4)
        sub, real = q_to_lambda(wdt, K)
        assert real
        absv = absolute_invariant(fan, [1, 1, 1, 1], 2, K, seed=0)
        # absolute = W * x^-4, so W * x^-2 = absolute * x^2
        assert sub.agrees(absv.shift(4).shift(-2))

    def test_zero_class_rejected(self):
        with pytest.raises(ValueError):
            reduced_dt(p1_cubed_fan(), [0] * 6, 1, K)


class TestRobustness:
    def test_seed_invariance_of_counts(self):
        ends = [(1, 0, 0), (0, 1, 0), (-1, 0, 2), (0, -1, -2)]
        cons = {1: ("point", (0, 0, -1)), 2: ("point", (0, 0, 1))}
        base = count(ends, cons, seed=0).value
        for s in (1, 2, 3, 4):
            assert count(ends, cons, seed=s).value.agrees(base)

    def test_gl3_invariance_of_counts(self):
        u = IntMatrix.from_rows([[1, 2, 0], [0, 1, 0], [1, 1, 1]])  # det 1
        ends = [(1, 0, 0), (0, 1, 0), (-1, 0, 1), (0, -1, -1)]
        cons = {1: ("point", (0, 0, -1)), 2: ("point", (0, 0, 1))}
        base = count(ends, cons).value

        ends_u = [tuple(u.mul_vec(e)) for e in ends]
        cons_u = {}
        for label, (kind, *rest) in cons.items():
            assert kind == "point"
            cons_u[label] = ("point", tuple(u.mul_vec(rest[0])))
        moved = count(ends_u, cons_u).value
        assert moved.agrees(base)

    def test_certified_count(self):
        ends = [(1, 0, 0), (0, 1, 0), (-1, 0, 1), (0, -1, -1)]
        cons = {1: ("point", (0, 0, -1)), 2: ("point", (0, 0, 1))}
        cyc = cycle_from_constraints(ends, cons)
        res = certified_count(CountRequest(tuple(ends), cyc, True, "lambda",
                                           SearchBounds(max_genus=2)), K, 0)
        assert res.certified is True
