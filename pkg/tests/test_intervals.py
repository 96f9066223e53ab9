from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rslab.intervals import (
    EMPTY,
    InputError,
    IntervalUnion,
    affine_image,
    combine,
    diameter,
    measure,
    minkowski_sum,
    normalize,
    rearrange,
    reflect,
    torus_project,
    translate,
    truncate,
)

from conftest import iv, rationals, unions


def pairs(u):
    return [(lo, hi) for lo, hi in u.pairs()]


class TestNormalize:
    def test_empty(self):
        u = normalize([])
        assert u == EMPTY and measure(u) == 0

    def test_overlap_merge(self):
        assert pairs(normalize([(0, 2), (1, 3)])) == [(0, 3)]

    def test_adjacent_merge(self):
        assert pairs(normalize([(0, 1), (1, 2)])) == [(0, 2)]

    def test_degenerate_dropped(self):
        assert normalize([(1, 1), (2, 3)]) == iv(2, 3)

    def test_reversed_pair_reports_index(self):
        with pytest.raises(InputError, match="1"):
            normalize([(0, 1), (3, 2)])

    def test_floats_rejected(self):
        with pytest.raises(TypeError):
            normalize([(0.5, 1)])


def test_measure_examples():
    assert measure(EMPTY) == 0
    assert measure(normalize([(0, 1), (2, 5)])) == 4
    assert measure(normalize([(0, 2), (1, 3)])) == 3


class TestCombine:
    def test_self_symdiff(self):
        assert combine(iv(0, 1), iv(0, 1), "symmetric_difference") == EMPTY

    def test_intersect(self):
        assert combine(iv(0, 2), iv(1, 3), "intersect") == iv(1, 2)

    def test_symdiff_with_hull(self):
        u = normalize([(0, 1), (2, 3)])
        out = combine(u, iv(0, 3), "symmetric_difference")
        assert out == iv(1, 2) and measure(out) == 1

    def test_unknown_mode(self):
        with pytest.raises(InputError):
            combine(iv(0, 1), iv(0, 1), "xor")

    @given(unions(), unions())
    def test_symdiff_measure(self, u, v):
        lhs = measure(combine(u, v, "symmetric_difference"))
        assert lhs == measure(u) + measure(v) - 2 * measure(combine(u, v, "intersect"))

    @given(unions(), unions())
    def test_union_inclusion_exclusion(self, u, v):
        assert measure(u | v) + measure(u & v) == measure(u) + measure(v)
        assert measure(u - v) == measure(u) - measure(u & v)


class TestAffine:
    def test_translation(self):
        assert affine_image(iv(0, 1), 1, 5) == iv(5, 6)

    def test_reflection_reverses(self):
        u = normalize([(0, 1), (2, 3)])
        assert pairs(affine_image(u, -1, 0)) == [(-3, -2), (-1, 0)]

    def test_dilation(self):
        out = affine_image(iv(0, 2), F(1, 2), 0)
        assert out == iv(0, 1) and measure(out) == 1

    def test_zero_scale(self):
        with pytest.raises(InputError):
            affine_image(iv(0, 1), 0, 0)

    @given(unions(), rationals(-3, 3).filter(bool), rationals())
    def test_measure_scales(self, u, r, s):
        assert measure(affine_image(u, r, s)) == abs(r) * measure(u)


class TestMinkowski:
    def test_intervals(self):
        s = minkowski_sum(iv(0, 1), iv(0, 1))
        assert s == iv(0, 2) and measure(s) == 2

    def test_filled_gap(self):
        s = minkowski_sum(normalize([(0, 1), (2, 3)]), iv(0, 2))
        assert s == iv(0, 5)

    def test_separated(self):
        s = minkowski_sum(normalize([(0, 1), (10, 11)]), iv(0, 1))
        assert pairs(s) == [(0, 2), (10, 12)] and measure(s) == 4

    def test_empty_operand(self):
        with pytest.raises(InputError):
            minkowski_sum(EMPTY, iv(0, 1))

    @given(unions(), unions())
    def test_brunn_minkowski(self, u, v):
        assert measure(minkowski_sum(u, v)) >= measure(u) + measure(v)

    @given(rationals(), rationals(), st.integers(1, 40), st.integers(1, 40))
    def test_bm_equality_for_intervals(self, a, b, la, lb):
        u, v = iv(a, a + F(la, 8)), iv(b, b + F(lb, 8))
        assert measure(minkowski_sum(u, v)) == measure(u) + measure(v)


def test_diameter_examples():
    assert diameter(iv(0, 1)) == 1
    assert diameter(normalize([(0, 1), (9, 10)])) == 10
    with pytest.raises(InputError):
        diameter(EMPTY)


@given(unions())
def test_diameter_reflection_invariant(u):
    assert diameter(reflect(u)) == diameter(u)


class TestRearrange:
    def test_examples(self):
        assert rearrange(normalize([(0, 1), (2, 5)])) == iv(-2, 2)
        assert rearrange(EMPTY) == EMPTY
        assert rearrange(iv(-3, 3)) == iv(-3, 3)

    @given(unions(nonempty=False))
    def test_idempotent(self, u):
        r = rearrange(u)
        assert rearrange(r) == r and measure(r) == measure(u)


class TestTruncate:
    def test_interval(self):
        assert truncate(iv(0, 3), 1, 1) == iv(1, 2)

    def test_identity(self):
        u = normalize([(0, 1), (2, 3)])
        assert truncate(u, 0, 0) == u

    def test_two_components(self):
        u = normalize([(0, 1), (2, 3)])
        assert pairs(truncate(u, F(1, 2), F(1, 2))) == [(F(1, 2), 1), (2, F(5, 2))]

    def test_flat_cumulative_takes_extreme_cut(self):
        # |S ∩ (-∞, a)| = 1 for every a in [1, 2]; the smallest is 1
        u = normalize([(0, 1), (2, 3)])
        assert truncate(u, 1, 0) == iv(2, 3)

    def test_errors(self):
        with pytest.raises(InputError):
            truncate(iv(0, 1), F(1, 2), F(1, 2))
        with pytest.raises(InputError):
            truncate(iv(0, 1), -1, 0)

    @given(unions(), st.integers(0, 100), st.integers(0, 100))
    def test_measure_and_subset(self, u, p, q):
        m = measure(u)
        eta = m * F(p, 201)
        eta_p = m * F(q, 201)
        t = truncate(u, eta, eta_p)
        assert measure(t) == m - eta - eta_p
        assert t - u == EMPTY


class TestTorus:
    def test_fundamental_domain(self):
        assert torus_project(iv(0, F(3, 10))) == iv(0, F(3, 10))

    def test_wraparound(self):
        out = torus_project(iv(F(9, 10), F(12, 10)))
        assert pairs(out) == [(0, F(1, 5)), (F(9, 10), 1)]

    def test_full_cover(self):
        out = torus_project(iv(0, 2))
        assert out == iv(0, 1) and measure(out) == 1

    @given(unions(), unions())
    def test_projection_commutes_with_sum(self, u, v):
        lhs = torus_project(minkowski_sum(u, v))
        rhs = torus_project(minkowski_sum(torus_project(u), torus_project(v)))
        assert lhs == rhs

    @given(unions())
    def test_measure_bound(self, u):
        p = measure(torus_project(u))
        assert p <= min(measure(u), 1)
        if diameter(u) <= 1:
            assert p == measure(u)


@given(unions(nonempty=False), unions(nonempty=False))
def test_outputs_are_canonical(u, v):
    for out in (u | v, u & v, u - v, u ^ v):
        assert normalize(out.pairs()) == out
        assert isinstance(out, IntervalUnion)


def test_translate_matches_affine():
    u = normalize([(0, 1), (3, 4)])
    assert translate(u, 2) == affine_image(u, 1, 2)
