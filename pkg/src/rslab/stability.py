"""Interval approximation, stability verifiers, the sharpness family and test generators.

The verifiers measure how far a triple is from the extremizers and express
the result as dimensionless ratios against the stability bounds.  The
bounds carry unspecified absolute constants, so each verifier takes the
constant as a parameter; frozen defaults live in :mod:`rslab.calibration`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .conv import convolve_indicators, superlevel
from .functionals import (
    CheckReport,
    Verdict,
    admissibility_eta,
    deficit_kprgt,
    deficit_rs,
    regime_of,
)
from .intervals import (
    InputError,
    Interval,
    IntervalUnion,
    RationalLike,
    as_rational,
    combine,
    measure,
    normalize,
)


# ---------------------------------------------------------------------------
# best interval


@dataclass(frozen=True)
class BestInterval:
    interval: Optional[Interval]
    gap: Fraction

    @property
    def center(self) -> Optional[Fraction]:
        return None if self.interval is None else self.interval.center


def best_interval(a: IntervalUnion) -> BestInterval:
    """Interval ``I`` minimizing ``|A △ I|``.

    An optimal interval always runs from the left end of some component to
    the right end of a later one, and ``|A △ I| = |A| - (Σ lengths - Σ gaps)``
    over the spanned components.  The bracket is a maximum-subarray scan
    over ``m₁, -g₁, m₂, -g₂, …``.  Ties go to the smallest left endpoint,
    then the smallest right endpoint.
    """
    comps = a.components
    if not comps:
        return BestInterval(None, Fraction(0))
    best_val = None
    best_span = (0, 0)
    run_val = None
    run_start = 0
    for j, c in enumerate(comps):
        if run_val is None:
            run_val, run_start = c.length, j
        else:
            extended = run_val - (c.lo - comps[j - 1].hi) + c.length
            if extended >= c.length:
                run_val = extended
            else:
                run_val, run_start = c.length, j
        if best_val is None or run_val > best_val or (
            run_val == best_val and comps[run_start].lo < comps[best_span[0]].lo
        ):
            best_val, best_span = run_val, (run_start, j)
    i, j = best_span
    interval = Interval(comps[i].lo, comps[j].hi)
    return BestInterval(interval, measure(a) - best_val)


def brute_force_best_interval(a: IntervalUnion) -> BestInterval:
    """O(n²) reference: try every pair of component endpoints."""
    comps = a.components
    if not comps:
        return BestInterval(None, Fraction(0))
    best = None
    for i in range(len(comps)):
        for j in range(i, len(comps)):
            cand = IntervalUnion((Interval(comps[i].lo, comps[j].hi),))
            gap = measure(combine(a, cand, "symmetric_difference"))
            key = (gap, comps[i].lo, comps[j].hi)
            if best is None or key < best:
                best = key
    gap, lo, hi = best
    return BestInterval(Interval(lo, hi), gap)


# ---------------------------------------------------------------------------
# verifiers


def _float_ratio(num_sq: Fraction, den_sq: Fraction, power: int = 2) -> float:
    # (num_sq / den_sq) ** (1/power) with inf for a zero denominator
    if num_sq == 0:
        return 0.0
    if den_sq == 0:
        return math.inf
    return float(num_sq / den_sq) ** (1.0 / power)


@dataclass
class StabilityReport:
    deficit: Fraction
    epsilon: Fraction
    eta: Fraction
    scale: Fraction
    intervals: tuple[Optional[Interval], Optional[Interval], Optional[Interval]]
    gaps: tuple[Fraction, Fraction, Fraction]
    center_discrepancy: Optional[Fraction]
    ratio_gap: float
    ratio_center: float
    hypothesis_met: bool
    verdict: Verdict = Verdict.HYPOTHESIS_NOT_MET
    details: dict = field(default_factory=dict)

    def within(self, k: RationalLike) -> bool:
        """Both ratios bounded by ``k``, decided exactly.

        ``gap·η / (√ε·M) <= k``  ⇔  ``gap²η² <= k²·D``, and
        ``|a+b-c|·η² / (ε^{1/4}·M) <= k``  ⇔  ``|a+b-c|⁴η⁸ <= k⁴·D·M²``.
        """
        k = as_rational(k)
        g = max(self.gaps)
        ok_gap = (g * self.eta) ** 2 <= k * k * self.deficit
        disc = self.center_discrepancy or Fraction(0)
        ok_center = disc ** 4 * self.eta ** 8 <= k ** 4 * self.deficit * self.scale ** 2
        return ok_gap and ok_center


def verify_main_theorem(a: IntervalUnion, b: IntervalUnion, c: IntervalUnion,
                        k: RationalLike) -> StabilityReport:
    """Distance of ``(A, B, C)`` from interval extremizers, scaled by the deficit.

    ``ε`` is defined by ``D = ε·max(|A|,|B|,|C|)²``; the hypothesis is
    ``ε <= η⁴/K``.  The verdict is PASS when both scaled ratios are at most
    ``K``, FAIL otherwise, and HYPOTHESIS_NOT_MET outside the hypothesis.
    """
    k = as_rational(k)
    eta = admissibility_eta(a, b, c)
    d = deficit_rs(a, b, c)
    scale = max(measure(a), measure(b), measure(c))
    eps = d / scale ** 2
    bests = (best_interval(a), best_interval(b), best_interval(c))
    gaps = tuple(bi.gap for bi in bests)
    ia, ib, ic = (bi.interval for bi in bests)
    disc = abs(ia.center + ib.center - ic.center)
    hyp = eta > 0 and k * eps <= eta ** 4
    g = max(gaps)
    report = StabilityReport(
        deficit=d,
        epsilon=eps,
        eta=eta,
        scale=scale,
        intervals=(ia, ib, ic),
        gaps=gaps,  # type: ignore[arg-type]
        center_discrepancy=disc,
        ratio_gap=_float_ratio((g * eta) ** 2, d),
        ratio_center=_float_ratio(disc ** 4 * eta ** 8, d * scale ** 2, power=4),
        hypothesis_met=hyp,
    )
    if hyp:
        report.verdict = Verdict.PASS if report.within(k) else Verdict.FAIL
    return report


def verify_sharpened_rs(a: IntervalUnion, b: IntervalUnion, c: IntervalUnion,
                        c0: RationalLike, k: Optional[RationalLike] = None) -> CheckReport:
    """``D(A,B,C) >= c₀ η² inf_I |A △ I|²``.

    Only ``A`` is scanned; rotate the roles to test ``B`` or ``C``.  ``k``
    is the constant in the hypothesis ``ε <= η⁴/K`` and defaults to the
    frozen calibration value.  The report carries ``max_c0``, the largest
    constant that would have passed (absent when the gap is 0).
    """
    from .calibration import MAIN_K

    name = "sharpened_rs"
    c0 = as_rational(c0)
    k = MAIN_K if k is None else as_rational(k)
    eta = admissibility_eta(a, b, c)
    if eta <= 0:
        return CheckReport(name, Verdict.HYPOTHESIS_NOT_MET, {"reason": "not strictly admissible"})
    d = deficit_rs(a, b, c)
    scale = max(measure(a), measure(b), measure(c))
    if k * d > eta ** 4 * scale ** 2:
        return CheckReport(name, Verdict.HYPOTHESIS_NOT_MET,
                           {"reason": "ε > η⁴/K", "deficit": d, "eta": eta})
    gap = best_interval(a).gap
    rhs = c0 * eta ** 2 * gap ** 2
    max_c0 = None if gap == 0 else d / (eta ** 2 * gap ** 2)
    verdict = Verdict.PASS if d >= rhs else Verdict.FAIL
    return CheckReport(name, verdict, {"deficit": d, "eta": eta, "gap": gap, "max_c0": max_c0})


def kprgt_eta(ma: Fraction, mb: Fraction, tau: Fraction) -> Fraction:
    """Largest η in (0, 1/2] for which the measure and level hypotheses hold (<= 0 if none)."""
    lo, hi = min(ma, mb), max(ma, mb)
    return min(Fraction(1, 2), lo / (lo + hi), tau / hi, 1 - tau / lo)


def verify_kprgt_stability(a: IntervalUnion, b: IntervalUnion, tau: RationalLike,
                           eta: RationalLike, k: RationalLike) -> CheckReport:
    """Near equality in KPRGT forces ``A`` and ``B`` to be near intervals.

    Hypotheses (all exact): ``0 < η <= 1/2``,
    ``min(|A|,|B|) >= η/(1-η)·max(|A|,|B|)``,
    ``η·max <= τ <= (1-η)·min`` and
    ``D' < min(τ², (min-τ)², η⁸·max²/K)``.
    Under them the superlevel set ``S_{A,B}(τ)`` must lie in the sandwich
    window (a FAIL otherwise), and PASS requires both best-interval gaps to
    be at most ``K·√D'``.
    """
    name = "kprgt_stability"
    tau, eta, k = as_rational(tau), as_rational(eta), as_rational(k)
    ma, mb = measure(a), measure(b)
    lo, hi = min(ma, mb), max(ma, mb)
    if not (0 < eta <= Fraction(1, 2)):
        return CheckReport(name, Verdict.HYPOTHESIS_NOT_MET, {"reason": "η outside (0, 1/2]"})
    if lo * (1 - eta) < eta * hi:
        return CheckReport(name, Verdict.HYPOTHESIS_NOT_MET, {"reason": "measures not comparable"})
    if not (eta * hi <= tau <= (1 - eta) * lo):
        return CheckReport(name, Verdict.HYPOTHESIS_NOT_MET, {"reason": "τ outside its window"})
    dp = deficit_kprgt(a, b, tau)
    if not (dp < tau ** 2 and dp < (lo - tau) ** 2 and k * dp < eta ** 8 * hi ** 2):
        return CheckReport(name, Verdict.HYPOTHESIS_NOT_MET,
                           {"reason": "deficit too large", "deficit": dp})
    ms = measure(superlevel(convolve_indicators(a, b), tau))
    sandwich = regime_of(ma, mb, ms) == "sandwich"
    gap_a = best_interval(a).gap
    gap_b = best_interval(b).gap
    g = max(gap_a, gap_b)
    bounded = g * g <= k * k * dp
    details = {
        "deficit": dp, "superlevel_measure": ms, "sandwich_ok": sandwich,
        "gaps": (gap_a, gap_b), "ratio": _float_ratio(g * g, dp),
    }
    return CheckReport(name, Verdict.PASS if sandwich and bounded else Verdict.FAIL, details)


# ---------------------------------------------------------------------------
# sharpness family


def sharpness_set(gamma: RationalLike, delta: RationalLike) -> IntervalUnion:
    """``[-γ, γ] ∪ [γ+δ, γ+2δ]``."""
    gamma, delta = as_rational(gamma), as_rational(delta)
    return normalize([(-gamma, gamma), (gamma + delta, gamma + 2 * delta)])


@dataclass(frozen=True)
class ProbePoint:
    delta: Fraction
    d_rs: Optional[Fraction]
    c_gap: Optional[Fraction]
    valid: bool
    partner_delta: Optional[Fraction] = None
    deficit_ratio: Optional[Fraction] = None
    slope: Optional[float] = None


def sharpness_probe(gamma: RationalLike, deltas: Sequence[RationalLike],
                    a: IntervalUnion, b: IntervalUnion) -> list[ProbePoint]:
    """Deficit and interval gap of ``C = [-γ,γ] ∪ [γ+δ,γ+2δ]`` for each δ.

    Each point after the first records the log-log slope
    ``log(D_prev/D) / log(δ_prev/δ)`` against the previous valid point.
    Points outside the sandwich regime are kept and marked invalid.
    """
    gamma = as_rational(gamma)
    if gamma <= 0:
        raise InputError("gamma must be positive")
    core = normalize([(-gamma, gamma)])
    if admissibility_eta(a, b, core) <= 0:
        raise InputError("(A, B, [-γ, γ]) is not strictly admissible")
    ma, mb = measure(a), measure(b)
    points: list[ProbePoint] = []
    prev: Optional[ProbePoint] = None
    for raw in deltas:
        delta = as_rational(raw)
        if delta <= 0:
            points.append(ProbePoint(delta, None, None, False))
            continue
        c = sharpness_set(gamma, delta)
        if regime_of(ma, mb, measure(c)) != "sandwich":
            points.append(ProbePoint(delta, None, None, False))
            continue
        d = deficit_rs(a, b, c)
        gap = best_interval(c).gap
        if prev is not None and prev.d_rs and d > 0:
            ratio = prev.d_rs / d
            slope = math.log(ratio) / math.log(prev.delta / delta)
            point = ProbePoint(delta, d, gap, True, prev.delta, ratio, slope)
        else:
            point = ProbePoint(delta, d, gap, True)
        points.append(point)
        prev = point
    return points


# ---------------------------------------------------------------------------
# reproducible generator


class Lcg:
    """64-bit linear congruential generator (Knuth's MMIX constants).

    ``state <- (6364136223846793005 * state + 1442695040888963407) mod 2**64``;
    each draw yields the top 32 bits.  Fully specified so that corpora are
    identical on every platform and Python version.
    """

    MULTIPLIER = 6364136223846793005
    INCREMENT = 1442695040888963407
    MASK = (1 << 64) - 1

    def __init__(self, seed: int) -> None:
        self.state = seed & self.MASK
        # decorrelate nearby seeds
        for _ in range(4):
            self.next32()

    def next32(self) -> int:
        self.state = (self.MULTIPLIER * self.state + self.INCREMENT) & self.MASK
        return self.state >> 32

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by rejection."""
        if n <= 0:
            raise InputError("below() needs n >= 1")
        chunks = max(1, (n.bit_length() + 31) // 32)
        space = 1 << (32 * chunks)
        limit = space - space % n
        while True:
            x = 0
            for _ in range(chunks):
                x = (x << 32) | self.next32()
            if x < limit:
                return x % n

    def between(self, lo: int, hi: int) -> int:
        """Uniform integer in ``[lo, hi]``."""
        return lo + self.below(hi - lo + 1)

    def fraction(self, denominator: int) -> Fraction:
        """Uniform draw from ``{0, 1/q, …, (q-1)/q}``."""
        return Fraction(self.below(denominator), denominator)

    def sample(self, population: int, k: int) -> list[int]:
        """``k`` distinct integers from ``[0, population)`` (Floyd's algorithm), sorted."""
        if k > population:
            raise InputError(f"cannot draw {k} distinct values from {population}")
        chosen: set[int] = set()
        for j in range(population - k, population):
            t = self.below(j + 1)
            chosen.add(j if t in chosen else t)
        return sorted(chosen)


def random_set_from(rng: Lcg, n_components: int, denom_bound: int,
                    span: RationalLike) -> IntervalUnion:
    """Same as :func:`random_set` but drawing from an existing generator."""
    span = as_rational(span)
    if n_components < 1 or denom_bound < 1 or span <= 0:
        raise InputError("need n_components >= 1, denom_bound >= 1, range > 0")
    q = denom_bound
    first = math.ceil(-span * q)
    last = math.floor(span * q)
    idx = rng.sample(last - first + 1, 2 * n_components)
    pts = [Fraction(first + i, q) for i in idx]
    return IntervalUnion(tuple(Interval(pts[2 * k], pts[2 * k + 1]) for k in range(n_components)))


def random_set(seed: int, n_components: int, denom_bound: int, span: RationalLike) -> IntervalUnion:
    """Deterministic union of ``n_components`` disjoint intervals inside ``[-span, span]``.

    Endpoints are ``2n`` distinct points of the lattice ``Z/denom_bound``
    drawn without replacement and paired off in sorted order, so the
    components never touch and every denominator divides ``denom_bound``.
    """
    return random_set_from(Lcg(seed), n_components, denom_bound, span)


# ---------------------------------------------------------------------------
# floating-point oracle


def _midpoint_counts(u: np.ndarray, v: np.ndarray, origin: float, h: float, n: int) -> np.ndarray:
    # number of midpoints origin + (j + 1/2) h, 0 <= j < n, inside [u, v)
    lo = np.clip(np.ceil((u - origin) / h - 0.5), 0, n)
    hi = np.clip(np.ceil((v - origin) / h - 0.5), 0, n)
    return np.maximum(hi - lo, 0)


def grid_oracle_pairing(a: IntervalUnion, b: IntervalUnion, c: IntervalUnion, n_cells: int) -> float:
    """Midpoint-rule estimate of ``∫∫ 1_A(x) 1_B(y) 1_C(x+y) dx dy``.

    Uses an ``n × n`` grid over the bounding box of ``A × B``.  The inner
    sum over ``y`` for each grid column is a count of midpoints falling in
    ``B ∩ (C - x)``, computed arithmetically rather than by looping.
    Shares no code with the exact engine.
    """
    if n_cells < 1:
        raise InputError("n_cells must be >= 1")
    if not a or not b or not c:
        return 0.0
    x0, x1 = float(a.inf), float(a.sup)
    y0, y1 = float(b.inf), float(b.sup)
    hx = (x1 - x0) / n_cells
    hy = (y1 - y0) / n_cells
    xs = x0 + (np.arange(n_cells) + 0.5) * hx
    in_a = np.zeros(n_cells, dtype=bool)
    for comp in a.components:
        in_a |= (xs >= float(comp.lo)) & (xs < float(comp.hi))
    xs = xs[in_a]
    counts = np.zeros_like(xs)
    for cb in b.components:
        for cc in c.components:
            u = np.maximum(float(cb.lo), float(cc.lo) - xs)
            v = np.minimum(float(cb.hi), float(cc.hi) - xs)
            counts += _midpoint_counts(u, v, y0, hy, n_cells)
    return float(counts.sum() * hx * hy)
