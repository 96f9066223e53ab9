"""Exact piecewise-linear convolutions of indicator functions.

``1_A * 1_B`` for finite interval unions is a continuous, compactly
supported, piecewise-affine function with rational knots.  Everything here
(evaluation, integration over a union, superlevel sets, layer-cake
integrals) is carried out in exact rational arithmetic.
"""

from __future__ import annotations

import bisect
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .intervals import (
    InputError,
    IntervalUnion,
    RationalLike,
    _merge_sorted,
    as_rational,
    measure,
    reflect,
)

ZERO = Fraction(0)


@dataclass(frozen=True)
class PiecewiseLinear:
    """Continuous compactly supported piecewise-affine function.

    ``knots`` is strictly increasing; the function interpolates linearly
    between consecutive ``(knot, value)`` pairs and vanishes outside
    ``[knots[0], knots[-1]]``.  The zero function has no knots.
    """

    knots: tuple[Fraction, ...] = ()
    values: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        if len(self.knots) != len(self.values):
            raise InputError("knots and values differ in length")
        if self.knots:
            if len(self.knots) < 2:
                raise InputError("a nonzero function needs at least two knots")
            if self.values[0] != 0 or self.values[-1] != 0:
                raise InputError("values at the outer knots must be 0")
            if any(b <= a for a, b in zip(self.knots, self.knots[1:])):
                raise InputError("knots must be strictly increasing")
            if any(v < 0 for v in self.values):
                raise InputError("values must be nonnegative")

    def is_zero(self) -> bool:
        return not self.knots

    def __call__(self, x: RationalLike) -> Fraction:
        x = as_rational(x)
        ks = self.knots
        if not ks or x <= ks[0] or x >= ks[-1]:
            return ZERO
        i = bisect.bisect_right(ks, x) - 1
        if ks[i] == x:
            return self.values[i]
        x0, x1 = ks[i], ks[i + 1]
        y0, y1 = self.values[i], self.values[i + 1]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def pieces(self):
        """Yield ``(x0, x1, y0, y1)`` for each affine piece."""
        ks, vs = self.knots, self.values
        for i in range(len(ks) - 1):
            yield ks[i], ks[i + 1], vs[i], vs[i + 1]

    @property
    def support(self) -> IntervalUnion:
        """``{f > 0}`` as a canonical union."""
        return superlevel(self, 0)

    @property
    def max_value(self) -> Fraction:
        return max(self.values, default=ZERO)

    def integral(self) -> Fraction:
        return sum(((x1 - x0) * (y0 + y1) / 2 for x0, x1, y0, y1 in self.pieces()), ZERO)

    def level_values(self) -> list[Fraction]:
        """Distinct knot values in increasing order, always including 0."""
        return sorted(set(self.values) | {ZERO})


def _canonical(knots: list[Fraction], values: list[Fraction]) -> PiecewiseLinear:
    # drop interior knots where the slope does not change
    if not knots:
        return PiecewiseLinear()
    ks = [knots[0]]
    vs = [values[0]]
    for i in range(1, len(knots) - 1):
        x0, y0 = ks[-1], vs[-1]
        x1, y1 = knots[i], values[i]
        x2, y2 = knots[i + 1], values[i + 1]
        if (y1 - y0) * (x2 - x1) == (y2 - y1) * (x1 - x0):
            continue
        ks.append(x1)
        vs.append(y1)
    ks.append(knots[-1])
    vs.append(values[-1])
    return PiecewiseLinear(tuple(ks), tuple(vs))


def convolve_indicators(a: IntervalUnion, b: IntervalUnion) -> PiecewiseLinear:
    """Exact ``1_A * 1_B``; the zero function if either set is empty.

    Each pair of components ``[p, q)``, ``[r, s)`` contributes a trapezoid
    rising with slope 1 from ``p + r``, flat between ``min(p+s, q+r)`` and
    ``max(p+s, q+r)``, and falling to 0 at ``q + s``.  The sum is assembled
    from the slope changes, which avoids evaluating every trapezoid at
    every knot.
    """
    if not a or not b:
        return PiecewiseLinear()
    kinks: dict[Fraction, int] = defaultdict(int)
    for ca in a.components:
        for cb in b.components:
            t0 = ca.lo + cb.lo
            t3 = ca.hi + cb.hi
            m1 = ca.lo + cb.hi
            m2 = ca.hi + cb.lo
            kinks[t0] += 1
            kinks[m1] -= 1
            kinks[m2] -= 1
            kinks[t3] += 1
    xs = sorted(kinks)
    values = [ZERO]
    slope = 0
    for prev, x in zip(xs, xs[1:]):
        slope += kinks[prev]
        values.append(values[-1] + slope * (x - prev))
    return _canonical(xs, values)


def pairing(f: PiecewiseLinear, c: IntervalUnion) -> Fraction:
    """Exact ``∫_C f``."""
    if f.is_zero() or not c:
        return ZERO
    ks = f.knots
    total = ZERO
    for comp in c.components:
        lo = max(comp.lo, ks[0])
        hi = min(comp.hi, ks[-1])
        if lo >= hi:
            continue
        i = bisect.bisect_right(ks, lo) - 1
        x = lo
        fx = f(lo)
        while x < hi:
            nxt = min(ks[i + 1], hi)
            fn = f.values[i + 1] if nxt == ks[i + 1] else f(nxt)
            total += (nxt - x) * (fx + fn) / 2
            x, fx = nxt, fn
            i += 1
    return total


def superlevel(f: PiecewiseLinear, t: RationalLike) -> IntervalUnion:
    """Canonical union equal to ``{x : f(x) > t}`` for ``t >= 0``."""
    t = as_rational(t)
    if t < 0:
        raise InputError("superlevel threshold must be nonnegative")
    pieces: list[tuple[Fraction, Fraction]] = []
    for x0, x1, y0, y1 in f.pieces():
        above0, above1 = y0 > t, y1 > t
        if above0 and above1:
            pieces.append((x0, x1))
        elif above0 or above1:
            cross = x0 + (t - y0) * (x1 - x0) / (y1 - y0)
            pieces.append((x0, cross) if above0 else (cross, x1))
    return _merge_sorted(pieces)


def superlevel_measure(f: PiecewiseLinear, t: RationalLike) -> Fraction:
    return measure(superlevel(f, t))


def tail_integral(a: IntervalUnion, b: IntervalUnion, tau: RationalLike) -> Fraction:
    """``∫_τ^∞ |S_{A,B}(t)| dt`` via ``∫_{S(τ)} f − τ|S(τ)|``."""
    tau = as_rational(tau)
    if not a or not b:
        raise InputError("tail_integral needs nonempty sets")
    if tau < 0:
        raise InputError("tau must be nonnegative")
    f = convolve_indicators(a, b)
    s = superlevel(f, tau)
    return pairing(f, s) - tau * measure(s)


def tail_integral_by_levels(f: PiecewiseLinear, tau: RationalLike) -> Fraction:
    """``∫_τ^∞ |{f > t}| dt`` integrated directly in the level variable.

    ``t -> |{f > t}|`` is affine on every open interval between
    consecutive knot values, so the midpoint rule on each such interval is
    exact.  Nothing here goes through :func:`pairing`, which makes it an
    independent route to the layer-cake identity.
    """
    tau = as_rational(tau)
    levels = [v for v in f.level_values() if v > tau]
    grid = [tau] + levels
    total = ZERO
    for lo, hi in zip(grid, grid[1:]):
        total += (hi - lo) * superlevel_measure(f, (lo + hi) / 2)
    return total


@dataclass(frozen=True)
class LevelResult:
    """Outcome of :func:`level_for_measure`.

    If ``exact`` the superlevel set at ``tau`` has the requested measure.
    Otherwise ``tau`` is a plateau level where ``t -> |S(t)|`` jumps over
    the target: ``measure_at`` is ``|S(tau)|`` and ``measure_below`` the
    left limit ``|{f >= tau}|``, which bracket it.
    """

    tau: Fraction
    exact: bool
    measure_at: Fraction
    measure_below: Optional[Fraction] = None


def level_for_measure(a: IntervalUnion, b: IntervalUnion, m: RationalLike) -> LevelResult:
    """Find ``τ`` with ``|S_{A,B}(τ)| = m``, or report the jump that skips ``m``.

    When several levels work (only possible for ``m = 0``, past the
    maximum), the smallest one is returned.
    """
    m = as_rational(m)
    f = convolve_indicators(a, b)
    support = superlevel_measure(f, 0)
    if m < 0 or m > support:
        raise InputError(f"target measure {m} outside [0, {support}]")
    levels = f.level_values()
    for lo, hi in zip(levels, levels[1:]):
        at_lo = superlevel_measure(f, lo)
        mid = superlevel_measure(f, (lo + hi) / 2)
        before_hi = 2 * mid - at_lo  # left limit at hi; the map is affine on (lo, hi)
        if before_hi < m <= at_lo:
            tau = lo + (at_lo - m) * (hi - lo) / (at_lo - before_hi)
            return LevelResult(tau, True, m)
        at_hi = superlevel_measure(f, hi)
        if at_hi < m <= before_hi:
            # a plateau at height hi: |S| drops from before_hi to at_hi there
            return LevelResult(hi, False, at_hi, before_hi)
    top = levels[-1]
    return LevelResult(top, True, ZERO)


def convolve_reflected(u: IntervalUnion) -> PiecewiseLinear:
    """``1_U * 1_{-U}``, the autocorrelation of ``U``."""
    return convolve_indicators(u, reflect(u))
