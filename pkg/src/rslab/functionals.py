"""Riesz–Sobolev and KPRGT deficits and the lemma-level checkers built on them.

Every quantity is an exact :class:`~fractions.Fraction`.  Comparisons that
involve a square root of a deficit are carried out on squares, so no check
here ever rounds.

Checkers return a :class:`CheckReport` whose verdict is one of PASS, FAIL
or HYPOTHESIS_NOT_MET; randomized audits rely on the third state to keep
vacuous cases out of the evidence count.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Literal, Optional

from .conv import (
    PiecewiseLinear,
    convolve_indicators,
    convolve_reflected,
    pairing,
    superlevel,
    tail_integral,
    tail_integral_by_levels,
)
from .intervals import (
    InputError,
    IntervalUnion,
    RationalLike,
    as_rational,
    centered_interval,
    combine,
    diameter,
    difference_set,
    intersect,
    measure,
    minkowski_sum,
    normalize,
    rearrange,
    torus_project,
    torus_sum,
    truncate,
)

Regime = Literal["sandwich", "above", "below"]


class EngineInvariantError(RuntimeError):
    """An inequality that holds for all sets came out violated.

    This can only mean a bug in the exact engine, never a property of the
    input, so it is raised rather than reported.
    """


class Verdict(str, enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    HYPOTHESIS_NOT_MET = "hypothesis-not-met"


@dataclass
class CheckReport:
    name: str
    verdict: Verdict
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS


def _report(name: str, ok: bool, **details: Any) -> CheckReport:
    return CheckReport(name, Verdict.PASS if ok else Verdict.FAIL, details)


def _not_met(name: str, reason: str, **details: Any) -> CheckReport:
    return CheckReport(name, Verdict.HYPOTHESIS_NOT_MET, {"reason": reason, **details})


# ---------------------------------------------------------------------------
# deficits


def rearranged_pairing(a: RationalLike, b: RationalLike, c: RationalLike) -> Fraction:
    """``<1_{A*} * 1_{B*}, 1_{C*}>`` as a function of the three measures."""
    a, b, c = as_rational(a), as_rational(b), as_rational(c)
    if a <= 0 or b <= 0:
        raise InputError("rearranged_pairing needs positive a and b")
    if c < 0:
        raise InputError("rearranged_pairing needs c >= 0")
    if c <= abs(a - b):
        return c * min(a, b)
    if c >= a + b:
        return a * b
    return a * b - (a + b - c) ** 2 / 4


def _deficit(a: IntervalUnion, b: IntervalUnion, c: IntervalUnion,
             f: Optional[PiecewiseLinear] = None) -> Fraction:
    # permits empty c, where both pairings vanish
    if f is None:
        f = convolve_indicators(a, b)
    value = rearranged_pairing(measure(a), measure(b), measure(c)) - pairing(f, c)
    if value < 0:
        raise EngineInvariantError(f"negative Riesz–Sobolev deficit {value} for {a}, {b}, {c}")
    return value


def deficit_rs(a: IntervalUnion, b: IntervalUnion, c: IntervalUnion) -> Fraction:
    """``D(A,B,C)``: rearranged pairing minus actual pairing, always ``>= 0``."""
    if not a or not b or not c:
        raise InputError("deficit_rs needs three nonempty sets")
    return _deficit(a, b, c)


def _check_tau(a: IntervalUnion, b: IntervalUnion, tau: Fraction) -> None:
    if not a or not b:
        raise InputError("nonempty sets required")
    top = min(measure(a), measure(b))
    if not 0 <= tau <= top:
        raise InputError(f"tau={tau} outside [0, {top}]")


def deficit_kprgt(a: IntervalUnion, b: IntervalUnion, tau: RationalLike) -> Fraction:
    """``D'(A,B,τ) = (|A|-τ)(|B|-τ) - ∫_τ^∞ |S_{A,B}(t)| dt``."""
    tau = as_rational(tau)
    _check_tau(a, b, tau)
    value = (measure(a) - tau) * (measure(b) - tau) - tail_integral(a, b, tau)
    if value < 0:
        raise EngineInvariantError(f"negative KPRGT deficit {value} for {a}, {b}, tau={tau}")
    return value


def admissibility_eta(a: IntervalUnion, b: IntervalUnion, c: IntervalUnion) -> Fraction:
    """Largest η making ``(A,B,C)`` η-strictly admissible (may be ``<= 0``)."""
    ms = [measure(a), measure(b), measure(c)]
    if min(ms) <= 0:
        raise InputError("admissibility needs sets of positive measure")
    return admissibility_eta_of(*ms)


def admissibility_eta_of(ma: Fraction, mb: Fraction, mc: Fraction) -> Fraction:
    top = max(ma, mb, mc)
    return min(mi + mj - mk for mi, mj, mk in itertools.permutations((ma, mb, mc))) / top


def regime_of(ma: Fraction, mb: Fraction, ms: Fraction) -> Regime:
    """Where ``ms`` sits relative to ``[||A|-|B||, |A|+|B|]``; boundaries are sandwich."""
    if ms > ma + mb:
        return "above"
    if ms < abs(ma - mb):
        return "below"
    return "sandwich"


@dataclass(frozen=True)
class DeficitReport:
    d_rs: Fraction
    d_kprgt: Optional[Fraction]
    tau: Fraction
    sigma: Fraction
    eta_max: Fraction
    regime: Regime


def deficit_report(a: IntervalUnion, b: IntervalUnion, tau: RationalLike) -> DeficitReport:
    """Measured quantities for ``(A, B, S_{A,B}(τ))``."""
    tau = as_rational(tau)
    _check_tau(a, b, tau)
    f = convolve_indicators(a, b)
    s = superlevel(f, tau)
    ma, mb, ms = measure(a), measure(b), measure(s)
    eta = admissibility_eta_of(ma, mb, ms) if ms > 0 else Fraction(0)
    return DeficitReport(
        d_rs=_deficit(a, b, s, f),
        d_kprgt=deficit_kprgt(a, b, tau),
        tau=tau,
        sigma=(ma + mb - ms) / 2,
        eta_max=eta,
        regime=regime_of(ma, mb, ms),
    )


@dataclass(frozen=True)
class IdentityReport:
    regime: Regime
    lhs: Fraction
    rhs: Fraction
    residual: Fraction


def identity_check(a: IntervalUnion, b: IntervalUnion, tau: RationalLike) -> IdentityReport:
    """Relate ``D'(A,B,τ)`` to ``D(A,B,S_{A,B}(τ))`` in whichever regime applies.

    sandwich: ``D' = D + (σ-τ)²`` with ``|S| = |A|+|B|-2σ``;
    above:    ``D' = D + τ(|S|-|A|-|B|) + τ²``;
    below:    ``D' = D + (m-τ)(M-|S|-τ)`` with ``m``, ``M`` the smaller and
    larger of ``|A|``, ``|B|``.
    """
    tau = as_rational(tau)
    _check_tau(a, b, tau)
    f = convolve_indicators(a, b)
    s = superlevel(f, tau)
    ma, mb, ms = measure(a), measure(b), measure(s)
    # D' through the level-space integral, so the layer-cake identity is
    # exercised rather than assumed
    lhs = (ma - tau) * (mb - tau) - tail_integral_by_levels(f, tau)
    if lhs < 0:
        raise EngineInvariantError(f"negative KPRGT deficit {lhs} for {a}, {b}, tau={tau}")
    d = _deficit(a, b, s, f)
    regime = regime_of(ma, mb, ms)
    if regime == "sandwich":
        sigma = (ma + mb - ms) / 2
        rhs = d + (sigma - tau) ** 2
    elif regime == "above":
        rhs = d + tau * (ms - ma - mb) + tau * tau
    else:
        lo, hi = min(ma, mb), max(ma, mb)
        rhs = d + (lo - tau) * (hi - ms - tau)
    return IdentityReport(regime, lhs, rhs, lhs - rhs)


# ---------------------------------------------------------------------------
# lemma checkers


def superlevel_approx_check(a: IntervalUnion, b: IntervalUnion, e: IntervalUnion) -> CheckReport:
    """A near-extremal ``E`` is close to the superlevel set of matching level.

    Under ``||A|-|B|| + 2√D < |E| < |A|+|B| - 2√D`` with ``D = D(A,B,E)`` and
    ``τ`` defined by ``|E| = |A|+|B|-2τ``, checks
    ``|S(τ) △ E| <= 4√D``, ``||S(τ)| - |E|| <= 4√D`` and
    ``D(A,B,S(τ)) <= D(A,B,E)``.
    """
    name = "superlevel_approx"
    d = deficit_rs(a, b, e)
    ma, mb, me = measure(a), measure(b), measure(e)
    lam = abs(ma - mb)
    if not (me > lam and (me - lam) ** 2 > 4 * d and ma + mb > me and (ma + mb - me) ** 2 > 4 * d):
        return _not_met(name, "|E| not inside the admissible window", deficit=d)
    tau = (ma + mb - me) / 2
    f = convolve_indicators(a, b)
    s = superlevel(f, tau)
    sym = measure(combine(s, e, "symmetric_difference"))
    drift = abs(measure(s) - (ma + mb - 2 * tau))
    d_s = _deficit(a, b, s, f)
    ok_sym = sym * sym <= 16 * d
    ok_drift = drift * drift <= 16 * d
    ok_mono = d_s <= d
    return _report(
        name, ok_sym and ok_drift and ok_mono,
        deficit=d, tau=tau, symdiff=sym, measure_drift=drift, deficit_superlevel=d_s,
        symdiff_ok=ok_sym, drift_ok=ok_drift, monotone_ok=ok_mono,
    )


def difference_inclusion_check(u: IntervalUnion, v: IntervalUnion,
                               alpha1: RationalLike, alpha2: RationalLike) -> CheckReport:
    """``S_{U,V}(α₁) - S_{U,V}(α₂) ⊂ S_{U,-U}(α₁+α₂-|V|)`` up to null sets."""
    name = "inclusion"
    alpha1, alpha2 = as_rational(alpha1), as_rational(alpha2)
    if alpha1 <= 0 or alpha2 <= 0:
        raise InputError("inclusion check needs positive levels")
    f = convolve_indicators(u, v)
    s1 = superlevel(f, alpha1)
    s2 = superlevel(f, alpha2)
    if not s1 or not s2:
        return _report(name, True, vacuous=True, reason="empty superlevel set")
    beta = alpha1 + alpha2 - measure(v)
    if beta < 0:
        # every point of R has autocorrelation >= 0 > beta
        return _report(name, True, vacuous=True, reason="negative right-hand level", beta=beta)
    lhs = difference_set(s1, s2)
    rhs = superlevel(convolve_reflected(u), beta)
    leftover = combine(lhs, rhs, "difference")
    return _report(name, not leftover, vacuous=False, beta=beta,
                   lhs_measure=measure(lhs), rhs_measure=measure(rhs),
                   leftover_measure=measure(leftover))


def keystone_check(a: IntervalUnion, b: IntervalUnion) -> CheckReport:
    """``|A+B| < |A|+|B|+min(|A|,|B|)`` implies ``diam(A) <= |A+B|-|B|``."""
    name = "keystone"
    ma, mb = measure(a), measure(b)
    if ma == 0 or mb == 0:
        raise InputError("keystone check needs sets of positive measure")
    sumset = measure(minkowski_sum(a, b))
    if not sumset < ma + mb + min(ma, mb):
        return _not_met(name, "sumset too large", sumset=sumset)
    diam = diameter(a)
    bound = sumset - mb
    return _report(name, diam <= bound, diameter=diam, bound=bound, sumset=sumset,
                   equality=diam == bound)


def kemperman_check(a: IntervalUnion, b: IntervalUnion) -> CheckReport:
    """``|π(A)+π(B)| >= min(|π(A)|+|π(B)|, 1)`` on R/Z."""
    name = "kemperman"
    if not a or not b:
        raise InputError("kemperman check needs nonempty sets")
    pa, pb = torus_project(a), torus_project(b)
    total = measure(torus_sum(a, b))
    bound = min(measure(pa) + measure(pb), Fraction(1))
    return _report(name, total >= bound, sum_measure=total, bound=bound)


def localization_check(a: IntervalUnion, b: IntervalUnion, c: RationalLike) -> CheckReport:
    """Cutting ``B`` at ``c`` cannot increase the sumset excess.

    With ``I = (-∞, c]``: ``|A+(B∩I)| - |A| - |B∩I| <= |A+B| - |A| - |B|``
    whenever ``B ∩ I`` has positive measure.
    """
    name = "localization"
    c = as_rational(c)
    if not a or not b:
        raise InputError("localization check needs nonempty sets")
    if c <= b.inf:
        return _not_met(name, "B ∩ (-∞, c] is null")
    cut = intersect(b, normalize([(b.inf, c)]))
    ma = measure(a)
    lhs = measure(minkowski_sum(a, cut)) - ma - measure(cut)
    rhs = measure(minkowski_sum(a, b)) - ma - measure(b)
    return _report(name, lhs <= rhs, lhs=lhs, rhs=rhs)


def truncation_identity_residual(a: RationalLike, b: RationalLike, k: RationalLike,
                                 eta: RationalLike, eta_prime: RationalLike) -> Fraction:
    """Residual of the centered-interval truncation identity.

    For centered intervals ``I, J, K`` of lengths ``a, b, k`` the claim is
    ``<1_I*1_J, 1_K> = <1_{I'*}*1_{J'*}, 1_K> + (η+η')k`` where ``I'``,
    ``J'`` are the truncations ``I_{η,η'}``, ``J_{η',η}``.  Both pairings
    are evaluated with the exact engine on actual intervals.
    """
    a, b, k = as_rational(a), as_rational(b), as_rational(k)
    eta, eta_prime = as_rational(eta), as_rational(eta_prime)
    i, j, kk = centered_interval(a), centered_interval(b), centered_interval(k)
    it = rearrange(truncate(i, eta, eta_prime))
    jt = rearrange(truncate(j, eta_prime, eta))
    lhs = pairing(convolve_indicators(i, j), kk)
    rhs = pairing(convolve_indicators(it, jt), kk) + (eta + eta_prime) * k
    return lhs - rhs


def truncation_deficit_check(a: IntervalUnion, b: IntervalUnion, c: IntervalUnion,
                             eta: RationalLike, eta_prime: RationalLike) -> CheckReport:
    """Truncating ``A`` by ``(η, η')`` and ``B`` by ``(η', η)`` does not raise the deficit.

    Also verifies the pointwise bound
    ``(1_A*1_B)(x) <= (1_{A'}*1_{B'})(x) + η + η'`` at every knot of either
    function; both sides are piecewise linear, so this is exhaustive.
    """
    name = "truncation"
    eta, eta_prime = as_rational(eta), as_rational(eta_prime)
    ma, mb, mc = measure(a), measure(b), measure(c)
    s = eta + eta_prime
    if eta < 0 or eta_prime < 0 or not (ma > s and mb > s and 0 < mc <= ma + mb):
        raise InputError("truncation check needs |A|, |B| > η+η' and 0 < |C| <= |A|+|B|")
    at = truncate(a, eta, eta_prime)
    bt = truncate(b, eta_prime, eta)
    f = convolve_indicators(a, b)
    ft = convolve_indicators(at, bt)
    d = _deficit(a, b, c, f)
    dt = _deficit(at, bt, c, ft)
    points = sorted(set(f.knots) | set(ft.knots))
    worst = max((f(x) - ft(x) for x in points), default=Fraction(0))
    pointwise_ok = worst <= s
    return _report(name, dt <= d and pointwise_ok, deficit=d, deficit_truncated=dt,
                   pointwise_excess=worst, pointwise_ok=pointwise_ok,
                   truncated_regime=regime_of(measure(at), measure(bt), mc))


def equal_measure_case_check(a: IntervalUnion, b: IntervalUnion, c: IntervalUnion) -> CheckReport:
    """Equal-measure case: the autocorrelation superlevel set and ``C`` are both controlled.

    Hypotheses: ``|A| = |B|``, η-strict admissibility with η > 0,
    ``√D < η|A|/24`` and ``|C| <= |A| - 4√D``.  With ``γ = |A| - |C|``
    checks ``(|S_{A,-A}(γ)| - 2|C|)² <= 64 D`` and that the best interval
    ``I`` for ``C`` has ``|C △ I|² <= 196 D``.
    """
    from .stability import best_interval

    name = "equal_measure"
    ma, mb, mc = measure(a), measure(b), measure(c)
    if ma != mb:
        return _not_met(name, "|A| != |B|")
    d = deficit_rs(a, b, c)
    eta = admissibility_eta(a, b, c)
    if eta <= 0:
        return _not_met(name, "not strictly admissible", eta=eta)
    if not 576 * d < eta * eta * ma * ma:
        return _not_met(name, "deficit too large relative to η|A|", deficit=d, eta=eta)
    gamma = ma - mc
    if gamma < 0 or gamma * gamma < 16 * d:
        return _not_met(name, "|C| > |A| - 4√D", deficit=d)
    s = superlevel(convolve_reflected(a), gamma)
    drift = measure(s) - 2 * mc
    ok_drift = drift * drift <= 64 * d
    gap = best_interval(c).gap
    ok_gap = gap * gap <= 196 * d
    return _report(name, ok_drift and ok_gap, deficit=d, eta=eta, gamma=gamma,
                   autocorr_drift=drift, c_gap=gap, drift_ok=ok_drift, gap_ok=ok_gap)
