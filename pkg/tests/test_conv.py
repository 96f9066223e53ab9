from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rslab.conv import (
    PiecewiseLinear,
    convolve_indicators,
    level_for_measure,
    pairing,
    superlevel,
    tail_integral,
    tail_integral_by_levels,
)
from rslab.intervals import EMPTY, InputError, affine_image, measure, normalize

from conftest import iv, unions


def conv_at(a, b, x):
    # independent oracle: (1_A * 1_B)(x) = |A ∩ (x - B)|
    return measure(a & affine_image(b, -1, x))


class TestConvolve:
    def test_two_component_value(self):
        f = convolve_indicators(normalize([(0, 1), (2, 3)]), iv(0, 1))
        assert f(F(5, 2)) == F(1, 2)

    def test_interval_peak(self):
        f = convolve_indicators(iv(-1, 1), iv(-2, 2))
        assert f(0) == 2
        assert f.max_value == 2

    def test_empty_gives_zero_function(self):
        f = convolve_indicators(EMPTY, iv(0, 1))
        assert f.is_zero() and f(0) == 0

    def test_no_collinear_knots(self):
        f = convolve_indicators(iv(0, 1), iv(0, 1))
        assert f.knots == (0, 1, 2)

    @given(unions(4), unions(4), st.integers(-160, 160))
    def test_matches_oracle(self, a, b, n):
        x = F(n, 16)
        assert convolve_indicators(a, b)(x) == conv_at(a, b, x)

    @given(unions(4), unions(4))
    def test_matches_oracle_at_knots(self, a, b):
        f = convolve_indicators(a, b)
        for x in f.knots:
            assert f(x) == conv_at(a, b, x)

    @given(unions(4), unions(4))
    def test_integral_is_product(self, a, b):
        assert convolve_indicators(a, b).integral() == measure(a) * measure(b)

    @given(unions(4), unions(4))
    def test_commutes(self, a, b):
        assert convolve_indicators(a, b) == convolve_indicators(b, a)


class TestPiecewiseLinear:
    def test_rejects_nonzero_ends(self):
        with pytest.raises(InputError):
            PiecewiseLinear((F(0), F(1)), (F(1), F(0)))

    def test_rejects_unsorted(self):
        with pytest.raises(InputError):
            PiecewiseLinear((F(0), F(2), F(1)), (F(0), F(1), F(0)))


class TestPairing:
    def test_unit_intervals(self):
        f = convolve_indicators(iv(0, 1), iv(0, 1))
        assert pairing(f, iv(0, 1)) == F(1, 2)

    def test_centered_halves(self):
        h = iv(F(-1, 2), F(1, 2))
        assert pairing(convolve_indicators(h, h), h) == F(3, 4)

    @given(unions(3), unions(3), unions(3))
    def test_additive_over_disjoint_pieces(self, a, b, c):
        f = convolve_indicators(a, b)
        left = c & normalize([(-100, 0)])
        right = c - left
        assert pairing(f, c) == pairing(f, left) + pairing(f, right)

    @given(unions(3), unions(3))
    def test_full_support_gives_total_mass(self, a, b):
        f = convolve_indicators(a, b)
        assert pairing(f, normalize([(-100, 100)])) == measure(a) * measure(b)


class TestSuperlevel:
    def test_triangle(self):
        h = iv(F(-1, 2), F(1, 2))
        f = convolve_indicators(h, h)
        assert superlevel(f, F(1, 2)) == h

    def test_strict_at_plateau(self):
        f = convolve_indicators(iv(-1, 1), iv(-2, 2))
        assert superlevel(f, 2) == EMPTY
        assert superlevel(f, 1) == iv(-2, 2)

    def test_negative_level(self):
        with pytest.raises(InputError):
            superlevel(convolve_indicators(iv(0, 1), iv(0, 1)), -1)

    @given(unions(4), unions(4), st.integers(0, 64))
    def test_points_inside_exceed_level(self, a, b, k):
        f = convolve_indicators(a, b)
        t = f.max_value * F(k, 64)
        s = superlevel(f, t)
        for comp in s.components:
            assert f(comp.center) > t
        assert measure(s) <= measure(f.support)


class TestTailIntegral:
    def test_centered_halves(self):
        h = iv(F(-1, 2), F(1, 2))
        assert tail_integral(h, h, F(1, 4)) == F(9, 16)

    @given(unions(4), unions(4), st.integers(0, 64))
    def test_two_routes_agree(self, a, b, k):
        tau = min(measure(a), measure(b)) * F(k, 64)
        f = convolve_indicators(a, b)
        assert tail_integral(a, b, tau) == tail_integral_by_levels(f, tau)

    @given(unions(4), unions(4))
    def test_zero_level_is_total_mass(self, a, b):
        assert tail_integral(a, b, 0) == measure(a) * measure(b)


class TestLevelForMeasure:
    def test_plateau_jump(self):
        res = level_for_measure(iv(-1, 1), iv(-2, 2), 1)
        assert not res.exact
        assert res.tau == 2 and res.measure_at == 0 and res.measure_below == 2

    def test_target_equal_to_plateau_measure_is_a_jump(self):
        # |S(t)| -> 1/16 as t rises to the plateau at 1/16, then drops to 0
        res = level_for_measure(iv(0, F(1, 16)), iv(0, F(1, 8)), F(1, 16))
        assert not res.exact and res.tau == F(1, 16) and res.measure_below == F(1, 16)

    def test_exact_on_slope(self):
        res = level_for_measure(iv(-1, 1), iv(-2, 2), 3)
        # |{f > t}| = 6 - 2t on the slopes
        assert res.exact and res.tau == F(3, 2)

    def test_zero_measure_gives_top(self):
        res = level_for_measure(iv(0, 1), iv(0, 2), 0)
        assert res.tau == 1 and res.exact

    def test_out_of_range(self):
        with pytest.raises(InputError):
            level_for_measure(iv(0, 1), iv(0, 1), 3)

    @given(unions(3), unions(3), st.integers(0, 64))
    def test_result_brackets_target(self, a, b, k):
        f = convolve_indicators(a, b)
        m = measure(f.support) * F(k, 64)
        res = level_for_measure(a, b, m)
        if res.exact:
            assert measure(superlevel(f, res.tau)) == m
        else:
            assert res.measure_at < m <= res.measure_below
