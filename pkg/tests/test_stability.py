import json
import math
from fractions import Fraction as F
from pathlib import Path

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from rslab.conv import convolve_indicators, pairing
from rslab.functionals import Verdict
from rslab.intervals import (
    EMPTY,
    InputError,
    Interval,
    affine_image,
    centered_interval,
    combine,
    measure,
    normalize,
    reflect,
    translate,
)
from rslab.stability import (
    Lcg,
    best_interval,
    brute_force_best_interval,
    grid_oracle_pairing,
    random_set,
    sharpness_probe,
    sharpness_set,
    verify_kprgt_stability,
    verify_main_theorem,
    verify_sharpened_rs,
)

from conftest import iv, rationals, unions

FIXTURES = Path(__file__).parent / "fixtures"


class TestBestInterval:
    def test_single_interval(self):
        bi = best_interval(iv(2, 5))
        assert bi.interval == Interval(F(2), F(5)) and bi.gap == 0

    def test_near_gap_is_bridged(self):
        bi = best_interval(normalize([(0, 1), (F(21, 20), F(24, 20))]))
        assert bi.interval == Interval(F(0), F(6, 5)) and bi.gap == F(1, 20)

    def test_distant_sliver_excluded(self):
        bi = best_interval(normalize([(0, 1), (2, F(21, 10))]))
        assert bi.interval == Interval(F(0), F(1)) and bi.gap == F(1, 10)

    def test_empty(self):
        bi = best_interval(EMPTY)
        assert bi.interval is None and bi.gap == 0

    def test_tie_prefers_leftmost(self):
        bi = best_interval(normalize([(0, 1), (5, 6)]))
        assert bi.interval == Interval(F(0), F(1))

    @given(unions(8))
    def test_matches_brute_force(self, u):
        assert best_interval(u) == brute_force_best_interval(u)

    @given(unions(6))
    def test_gap_formula(self, u):
        bi = best_interval(u)
        i = normalize([(bi.interval.lo, bi.interval.hi)])
        assert bi.gap == measure(u) + measure(i) - 2 * measure(u & i)
        assert bi.gap == measure(combine(u, i, "symmetric_difference"))

    @given(unions(6), rationals(), st.integers(1, 16))
    def test_translation_reflection_dilation(self, u, s, r):
        g = best_interval(u).gap
        assert best_interval(translate(u, s)).gap == g
        assert best_interval(reflect(u)).gap == g
        assert best_interval(affine_image(u, F(r, 4), 0)).gap == F(r, 4) * g


class TestMainTheorem:
    def test_extremizer(self):
        a, b = iv(-1, 1), iv(0, 2)
        rep = verify_main_theorem(a, b, iv(F(-1, 2), F(5, 2)), 2)
        assert rep.gaps == (0, 0, 0) and rep.center_discrepancy == 0 and rep.epsilon == 0
        assert rep.verdict is Verdict.PASS

    def test_sharpness_member(self):
        a = iv(-1, 1)
        delta = F(1, 16)
        rep = verify_main_theorem(a, a, sharpness_set(F(1, 2), delta), 2)
        assert rep.gaps == (0, 0, delta)
        assert rep.epsilon == 5 * delta ** 2 / 16
        # with η = (|A| + |C| - |B|)/max = (1 + δ)/2
        assert rep.eta == (1 + delta) / 2
        expected = (delta * rep.eta) ** 2 / (rep.epsilon * 4)
        assert math.isclose(rep.ratio_gap ** 2, float(expected))

    def test_not_admissible(self):
        rep = verify_main_theorem(iv(0, 1), iv(0, 1), iv(0, 5), 2)
        assert not rep.hypothesis_met and rep.verdict is Verdict.HYPOTHESIS_NOT_MET


class TestSharpenedRS:
    def test_interval_passes_any_c0(self):
        a = iv(-1, 1)
        rep = verify_sharpened_rs(a, a, sharpness_set(F(1, 2), F(1, 16)), 10 ** 6, 2)
        assert rep.passed and rep.details["gap"] == 0

    def test_notched_set_scanned(self):
        # <1_A*1_B, 1_C> = <1_C*1_{-B}, 1_A>: put the notched set first
        a = iv(-1, 1)
        c = sharpness_set(F(1, 2), F(1, 16))
        rep = verify_sharpened_rs(c, reflect(a), a, F(1, 2), 2)
        assert rep.details["gap"] == F(1, 16)
        assert rep.details["max_c0"] > 0 and rep.passed


class TestKPRGTStability:
    def test_equal_intervals(self):
        a = iv(0, 2)
        rep = verify_kprgt_stability(a, a, 1, F(1, 2), 2)
        assert rep.passed and rep.details["deficit"] == 0

    def test_small_notch(self):
        a = iv(0, 2)
        b = normalize([(0, 1), (F(1) + F(1, 1000), 2)])
        rep = verify_kprgt_stability(a, b, 1, F(999, 2000), 2)
        assert rep.verdict is not Verdict.FAIL
        if rep.passed:
            assert rep.details["sandwich_ok"]

    def test_tau_window(self):
        rep = verify_kprgt_stability(iv(0, 2), iv(0, 2), F(1, 10), F(1, 2), 2)
        assert rep.verdict is Verdict.HYPOTHESIS_NOT_MET


class TestSharpnessProbe:
    def test_exact_law(self):
        a = iv(-1, 1)
        deltas = [F(1, 2 ** k) for k in range(3, 11)]
        points = sharpness_probe(F(1, 2), deltas, a, a)
        for p in points:
            assert p.valid and p.d_rs == F(5, 4) * p.delta ** 2 and p.c_gap == p.delta
        for p in points[1:]:
            assert p.deficit_ratio == 4 and p.slope == 2.0

    def test_first_point(self):
        a = iv(-1, 1)
        (p,) = sharpness_probe(F(1, 2), [F(1, 8)], a, a)
        assert p.d_rs == F(5, 256) and p.c_gap == F(1, 8) and p.slope is None

    def test_regime_violation_marked(self):
        a = iv(-1, 1)
        points = sharpness_probe(F(1, 2), [F(1, 8), F(4), F(1, 16)], a, a)
        assert [p.valid for p in points] == [True, False, True]
        assert points[2].partner_delta == F(1, 8)

    def test_shrinking_delta(self):
        a = iv(-1, 1)
        points = sharpness_probe(F(1, 2), [F(1, 2 ** k) for k in (4, 12, 20)], a, a)
        assert points[-1].d_rs < F(1, 10 ** 10)

    def test_not_admissible(self):
        with pytest.raises(InputError):
            sharpness_probe(F(3), [F(1, 8)], iv(-1, 1), iv(-1, 1))


class TestRandomSet:
    def test_frozen_fixtures(self):
        for rec in json.loads((FIXTURES / "random_sets.json").read_text()):
            u = random_set(rec["seed"], rec["n_components"], rec["denom_bound"], F(rec["range"]))
            assert [[str(lo), str(hi)] for lo, hi in u.pairs()] == rec["set"]

    def test_single_component(self):
        assert len(random_set(7, 1, 64, 4)) == 1

    def test_distinct_seeds_differ(self):
        # sanity only: a collision is possible in principle
        assert random_set(1, 4, 64, 4) != random_set(2, 4, 64, 4)

    @given(st.integers(0, 10 ** 9), st.integers(1, 10), st.integers(2, 64), st.integers(1, 4))
    def test_shape(self, seed, n, q, r):
        assume(2 * r * q + 1 >= 2 * n)
        u = random_set(seed, n, q, r)
        assert len(u) == n
        assert u.inf >= -r and u.sup <= r
        for lo, hi in u.pairs():
            assert q % lo.denominator == 0 and q % hi.denominator == 0

    def test_bad_parameters(self):
        with pytest.raises(InputError):
            random_set(0, 0, 8, 1)
        with pytest.raises(InputError):
            random_set(0, 10, 1, 1)

    def test_lcg_sequence(self):
        # first raw output after seeding with 0 and four warm-up steps
        state = 0
        for _ in range(5):
            state = (6364136223846793005 * state + 1442695040888963407) % 2 ** 64
        assert Lcg(0).next32() == state >> 32


class TestGridOracle:
    def test_unit_intervals(self):
        u = iv(0, 1)
        assert abs(grid_oracle_pairing(u, u, u, 10 ** 4) - 0.5) < 1e-2

    def test_outside_support(self):
        u = iv(0, 1)
        assert grid_oracle_pairing(u, u, iv(5, 6), 1000) == 0.0

    def test_sharpness_constant(self):
        # D = (5/4) δ² at δ = 1/8, from the oracle alone
        a = iv(-1, 1)
        c = sharpness_set(F(1, 2), F(1, 8))
        rearranged = 2 * 2 - (2 + 2 - measure(c)) ** 2 / 4  # middle regime
        approx = float(rearranged) - grid_oracle_pairing(a, a, c, 2 ** 14)
        assert abs(approx - 5 / 256) < 1e-3

    @given(unions(3), unions(3), unions(3))
    def test_close_to_exact(self, a, b, c):
        exact = float(pairing(convolve_indicators(a, b), c))
        assert abs(grid_oracle_pairing(a, b, c, 2 ** 12) - exact) < 0.05 * float(measure(a) * measure(b)) + 1e-9
