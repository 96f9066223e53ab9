"""Exact algebra of finite unions of rational intervals.

Sets are equivalence classes modulo null sets.  Every union is stored in a
canonical form: a strictly sorted tuple of half-open intervals ``[lo, hi)``
with no two components touching, so that two unions describe the same set
(up to measure zero) exactly when their canonical forms are equal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Literal, Sequence, Union

RationalLike = Union[int, Fraction, str]

CombineMode = Literal["union", "intersect", "difference", "symmetric_difference"]


class InputError(ValueError):
    """Raised when an operation receives arguments outside its domain."""


def as_rational(value: RationalLike) -> Fraction:
    """Coerce ``value`` to a :class:`Fraction` without going through floats.

    Accepts ints, Fractions and strings such as ``"3"``, ``"-7/4"``.
    Floats are rejected: silently turning ``0.1`` into a 55-bit dyadic is
    exactly the kind of error this package exists to avoid.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational literal: {value!r}") from exc
    raise TypeError(f"expected int, Fraction or str, got {type(value).__name__}")


def format_rational(q: Fraction) -> str:
    """Render ``q`` as ``"p"`` or ``"p/q"``."""
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True, order=True)
class Interval:
    """Half-open interval ``[lo, hi)`` with ``lo < hi``."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise InputError(f"interval needs lo < hi, got [{self.lo}, {self.hi})")

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    @property
    def center(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __repr__(self) -> str:
        return f"[{format_rational(self.lo)}, {format_rational(self.hi)})"


@dataclass(frozen=True)
class IntervalUnion:
    """Canonical finite disjoint union of rational intervals.

    Build instances with :func:`normalize` (or :meth:`from_pairs`); the
    constructor trusts that ``components`` is already canonical.
    """

    components: tuple[Interval, ...] = ()

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[RationalLike, RationalLike]]) -> "IntervalUnion":
        return normalize(pairs)

    @classmethod
    def interval(cls, lo: RationalLike, hi: RationalLike) -> "IntervalUnion":
        return normalize([(lo, hi)])

    @property
    def measure(self) -> Fraction:
        return measure(self)

    def is_empty(self) -> bool:
        return not self.components

    def __bool__(self) -> bool:
        return bool(self.components)

    def __len__(self) -> int:
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    @property
    def inf(self) -> Fraction:
        if not self.components:
            raise InputError("empty set has no infimum")
        return self.components[0].lo

    @property
    def sup(self) -> Fraction:
        if not self.components:
            raise InputError("empty set has no supremum")
        return self.components[-1].hi

    def pairs(self) -> list[tuple[Fraction, Fraction]]:
        return [(c.lo, c.hi) for c in self.components]

    def __repr__(self) -> str:
        if not self.components:
            return "IntervalUnion(∅)"
        return "IntervalUnion(" + " ∪ ".join(repr(c) for c in self.components) + ")"

    # operator sugar, all exact
    def __or__(self, other: "IntervalUnion") -> "IntervalUnion":
        return combine(self, other, "union")

    def __and__(self, other: "IntervalUnion") -> "IntervalUnion":
        return combine(self, other, "intersect")

    def __sub__(self, other: "IntervalUnion") -> "IntervalUnion":
        return combine(self, other, "difference")

    def __xor__(self, other: "IntervalUnion") -> "IntervalUnion":
        return combine(self, other, "symmetric_difference")


EMPTY = IntervalUnion(())


def _merge_sorted(pairs: Sequence[tuple[Fraction, Fraction]]) -> IntervalUnion:
    # pairs: sorted by lo, all with lo < hi
    out: list[Interval] = []
    cur_lo: Fraction | None = None
    cur_hi: Fraction | None = None
    for lo, hi in pairs:
        if cur_hi is not None and lo <= cur_hi:
            if hi > cur_hi:
                cur_hi = hi
            continue
        if cur_lo is not None:
            out.append(Interval(cur_lo, cur_hi))
        cur_lo, cur_hi = lo, hi
    if cur_lo is not None:
        out.append(Interval(cur_lo, cur_hi))
    return IntervalUnion(tuple(out))


def normalize(raw: Iterable[tuple[RationalLike, RationalLike]]) -> IntervalUnion:
    """Canonicalize a list of ``(a, b)`` endpoint pairs.

    Degenerate pairs (``a == b``) are dropped; overlapping or touching
    intervals are merged.  A pair with ``a > b`` is an input error.
    """
    pairs = []
    for k, pair in enumerate(raw):
        try:
            a, b = pair
        except (TypeError, ValueError) as exc:
            raise InputError(f"pair #{k} is not a 2-element pair: {pair!r}") from exc
        a, b = as_rational(a), as_rational(b)
        if a > b:
            raise InputError(f"pair #{k} has lo > hi: ({a}, {b})")
        if a < b:
            pairs.append((a, b))
    pairs.sort()
    return _merge_sorted(pairs)


def measure(u: IntervalUnion) -> Fraction:
    """Lebesgue measure of ``u``."""
    return sum((c.hi - c.lo for c in u.components), Fraction(0))


def _boundary_sweep(u: IntervalUnion, v: IntervalUnion, keep) -> IntervalUnion:
    # Walk all endpoints in order, tracking membership in u and v.
    events: list[tuple[Fraction, int, int]] = []
    for c in u.components:
        events.append((c.lo, 0, 1))
        events.append((c.hi, 0, -1))
    for c in v.components:
        events.append((c.lo, 1, 1))
        events.append((c.hi, 1, -1))
    events.sort(key=lambda e: e[0])
    inside = [0, 0]
    pieces: list[tuple[Fraction, Fraction]] = []
    start: Fraction | None = None
    i = 0
    n = len(events)
    while i < n:
        x = events[i][0]
        while i < n and events[i][0] == x:
            _, which, delta = events[i]
            inside[which] += delta
            i += 1
        now = keep(inside[0] > 0, inside[1] > 0)
        if now and start is None:
            start = x
        elif not now and start is not None:
            if start < x:
                pieces.append((start, x))
            start = None
    return _merge_sorted(pieces)


_MODES = {
    "union": lambda p, q: p or q,
    "intersect": lambda p, q: p and q,
    "difference": lambda p, q: p and not q,
    "symmetric_difference": lambda p, q: p != q,
}


def combine(u: IntervalUnion, v: IntervalUnion, mode: CombineMode) -> IntervalUnion:
    """Boolean operation on two unions; ``mode`` names the operation."""
    try:
        keep = _MODES[mode]
    except KeyError:
        raise InputError(f"unknown combine mode {mode!r}") from None
    return _boundary_sweep(u, v, keep)


def union(u: IntervalUnion, v: IntervalUnion) -> IntervalUnion:
    return combine(u, v, "union")


def intersect(u: IntervalUnion, v: IntervalUnion) -> IntervalUnion:
    return combine(u, v, "intersect")


def difference(u: IntervalUnion, v: IntervalUnion) -> IntervalUnion:
    return combine(u, v, "difference")


def symmetric_difference(u: IntervalUnion, v: IntervalUnion) -> IntervalUnion:
    return combine(u, v, "symmetric_difference")


def affine_image(u: IntervalUnion, r: RationalLike, s: RationalLike) -> IntervalUnion:
    """The set ``{r*x + s : x in u}``; ``r`` must be nonzero."""
    r, s = as_rational(r), as_rational(s)
    if r == 0:
        raise InputError("affine_image needs a nonzero scale")
    if r > 0:
        comps = tuple(Interval(r * c.lo + s, r * c.hi + s) for c in u.components)
    else:
        comps = tuple(Interval(r * c.hi + s, r * c.lo + s) for c in reversed(u.components))
    return IntervalUnion(comps)


def reflect(u: IntervalUnion) -> IntervalUnion:
    return affine_image(u, -1, 0)


def translate(u: IntervalUnion, s: RationalLike) -> IntervalUnion:
    return affine_image(u, 1, s)


def minkowski_sum(u: IntervalUnion, v: IntervalUnion) -> IntervalUnion:
    """Sumset ``u + v`` of the closure representatives.

    Differs from the raw set sum by finitely many points.
    """
    if not u or not v:
        raise InputError("Minkowski sum with the empty set is undefined here")
    pairs = sorted((a.lo + b.lo, a.hi + b.hi) for a in u.components for b in v.components)
    return _merge_sorted(pairs)


def difference_set(u: IntervalUnion, v: IntervalUnion) -> IntervalUnion:
    """``u - v`` in the additive sense, i.e. ``u + (-v)``."""
    return minkowski_sum(u, reflect(v))


def diameter(u: IntervalUnion) -> Fraction:
    if not u:
        raise InputError("diameter of the empty set is undefined")
    return u.sup - u.inf


def hull(u: IntervalUnion) -> IntervalUnion:
    """Smallest interval containing ``u`` (empty for empty input)."""
    if not u:
        return EMPTY
    return IntervalUnion((Interval(u.inf, u.sup),))


def rearrange(u: IntervalUnion) -> IntervalUnion:
    """Symmetric rearrangement: the centered interval of the same measure."""
    m = measure(u)
    if m == 0:
        return EMPTY
    return IntervalUnion((Interval(-m / 2, m / 2),))


def centered_interval(length: RationalLike) -> IntervalUnion:
    length = as_rational(length)
    if length < 0:
        raise InputError("negative length")
    if length == 0:
        return EMPTY
    return IntervalUnion((Interval(-length / 2, length / 2),))


def _left_cut(s: IntervalUnion, eta: Fraction) -> Fraction:
    # smallest a with |s ∩ (-inf, a)| = eta
    if eta == 0:
        return s.inf
    acc = Fraction(0)
    for c in s.components:
        if acc + c.length >= eta:
            return c.lo + (eta - acc)
        acc += c.length
    raise InputError("cut exceeds measure")  # pragma: no cover - guarded by caller


def _right_cut(s: IntervalUnion, eta: Fraction) -> Fraction:
    # largest b with |s ∩ (b, inf)| = eta
    if eta == 0:
        return s.sup
    acc = Fraction(0)
    for c in reversed(s.components):
        if acc + c.length >= eta:
            return c.hi - (eta - acc)
        acc += c.length
    raise InputError("cut exceeds measure")  # pragma: no cover - guarded by caller


def truncate(s: IntervalUnion, eta: RationalLike, eta_prime: RationalLike) -> IntervalUnion:
    """Remove measure ``eta`` from the left of ``s`` and ``eta_prime`` from the right.

    Returns ``s ∩ [a, b]`` where ``a`` is the smallest number with
    ``|s ∩ (-inf, a)| = eta`` and ``b`` the largest with
    ``|s ∩ (b, inf)| = eta_prime``.  When the cumulative measure is flat
    (``a`` or ``b`` could sit anywhere in a gap of ``s``) the extreme
    solution is chosen, which is the component endpoint adjacent to the
    kept part.
    """
    eta, eta_prime = as_rational(eta), as_rational(eta_prime)
    if eta < 0 or eta_prime < 0:
        raise InputError("truncation parameters must be nonnegative")
    total = measure(s)
    if eta + eta_prime >= total:
        raise InputError(f"truncation removes {eta + eta_prime} from a set of measure {total}")
    a = _left_cut(s, eta)
    b = _right_cut(s, eta_prime)
    return intersect(s, IntervalUnion((Interval(a, b),)))


def torus_project(u: IntervalUnion) -> IntervalUnion:
    """Image of ``u`` under the quotient map onto R/Z, drawn inside ``[0, 1)``."""
    pieces: list[tuple[Fraction, Fraction]] = []
    for c in u.components:
        if c.length >= 1:
            return IntervalUnion((Interval(Fraction(0), Fraction(1)),))
        k = math.floor(c.lo)
        lo, hi = c.lo - k, c.hi - k
        if hi <= 1:
            pieces.append((lo, hi))
        else:
            pieces.append((lo, Fraction(1)))
            pieces.append((Fraction(0), hi - 1))
    pieces.sort()
    return _merge_sorted(pieces)


def torus_sum(u: IntervalUnion, v: IntervalUnion) -> IntervalUnion:
    """Sumset on R/Z of the projections of ``u`` and ``v``."""
    return torus_project(minkowski_sum(torus_project(u), torus_project(v)))


def contains_point(u: IntervalUnion, x: RationalLike) -> bool:
    x = as_rational(x)
    return any(c.lo <= x < c.hi for c in u.components)
