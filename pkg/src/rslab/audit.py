"""Randomized audits: one generator and one checker per property.

Trial ``i`` of an audit with seed ``s`` draws everything from ``Lcg(s + i)``,
so a trial can be replayed alone and serial and parallel runs see the same
corpus.  Every trial returns the SetDocument it was run on, which makes a
FAIL a standalone reproducer.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .calibration import KPRGT_K, MAIN_C0, MAIN_K
from .conv import convolve_indicators, pairing, tail_integral, tail_integral_by_levels
from .functionals import (
    EngineInvariantError,
    Verdict,
    deficit_kprgt,
    deficit_rs,
    difference_inclusion_check,
    equal_measure_case_check,
    identity_check,
    keystone_check,
    kemperman_check,
    rearranged_pairing,
    superlevel_approx_check,
    truncation_deficit_check,
    truncation_identity_residual,
)
from .intervals import IntervalUnion, InputError, centered_interval, measure, normalize, reflect
from .setdoc import SetDocument
from .stability import (
    Lcg,
    best_interval,
    brute_force_best_interval,
    kprgt_eta,
    random_set_from,
    verify_kprgt_stability,
    verify_main_theorem,
    verify_sharpened_rs,
)

# ---------------------------------------------------------------------------
# generators


def _rand_frac(rng: Lcg, lo: Fraction, hi: Fraction, q: int = 64) -> Fraction:
    # uniform on the grid lo + (hi - lo) * k/q, 0 <= k <= q
    return lo + (hi - lo) * Fraction(rng.below(q + 1), q)


def random_union(rng: Lcg, max_components: int = 8, max_denom: int = 64,
                 span: Fraction = Fraction(4)) -> IntervalUnion:
    """Random union with 1..max_components components and denominator <= max_denom."""
    n = rng.between(1, max_components)
    q_min = max(1, math.ceil(n / span))
    q = rng.between(q_min, max_denom)
    return random_set_from(rng, n, q, span)


def small_scale(rng: Lcg, top: Fraction = Fraction(1, 20), octaves: int = 14) -> Fraction:
    """Log-uniform-ish rational in ``(0, top]``: ``top · k/64 · 2^-j``."""
    return top * Fraction(rng.between(1, 64), 64) / 2 ** rng.below(octaves)


def notched_interval(rng: Lcg, center: Fraction, length: Fraction,
                     notch: Fraction) -> IntervalUnion:
    """Interval of the given length and center, perturbed by measure ``notch``.

    Either a hole of measure ``notch`` is cut somewhere inside, or a piece
    of that measure is moved from one end to a small distance beyond it.
    The total measure is preserved by the second kind only.
    """
    lo, hi = center - length / 2, center + length / 2
    if notch <= 0:
        return normalize([(lo, hi)])
    kind = rng.below(3)
    if kind == 0:
        start = _rand_frac(rng, lo, hi - notch)
        return normalize([(lo, start), (start + notch, hi)])
    dist = notch * rng.between(1, 8)
    if kind == 1:
        return normalize([(lo, hi - notch), (hi + dist - notch, hi + dist)])
    return normalize([(lo - dist, lo - dist + notch), (lo + notch, hi)])


def near_extremizer_triple(rng: Lcg) -> tuple[IntervalUnion, IntervalUnion, IntervalUnion]:
    """Triple of notched intervals with centers nearly additive."""
    a = _rand_frac(rng, Fraction(1), Fraction(2), 16)
    b = _rand_frac(rng, Fraction(1), Fraction(2), 16)
    lam = abs(a - b)
    c = _rand_frac(rng, lam + (a + b - lam) / 5, a + b - (a + b - lam) / 5, 32)
    ca = _rand_frac(rng, Fraction(-1), Fraction(1), 8)
    cb = _rand_frac(rng, Fraction(-1), Fraction(1), 8)
    shift = small_scale(rng) if rng.below(2) else Fraction(0)
    cc = ca + cb + (shift if rng.below(2) else -shift)
    top = max(a, b, c)
    mask = rng.between(1, 7)
    sets = []
    for bit, (center, length) in enumerate(((ca, a), (cb, b), (cc, c))):
        notch = small_scale(rng) * top if mask >> bit & 1 else Fraction(0)
        sets.append(notched_interval(rng, center, length, notch))
    return sets[0], sets[1], sets[2]


def near_extremizer_pair(rng: Lcg) -> tuple[IntervalUnion, IntervalUnion]:
    """Two notched intervals of comparable measure."""
    a = _rand_frac(rng, Fraction(1), Fraction(2), 16)
    b = a * _rand_frac(rng, Fraction(4, 5), Fraction(5, 4), 20)
    top = max(a, b)
    mask = rng.between(1, 3)
    out = []
    for bit, length in enumerate((a, b)):
        center = _rand_frac(rng, Fraction(-1), Fraction(1), 8)
        notch = small_scale(rng) * top if mask >> bit & 1 else Fraction(0)
        out.append(notched_interval(rng, center, length, notch))
    return out[0], out[1]


# ---------------------------------------------------------------------------
# trials


@dataclass
class AuditConfig:
    trials: int = 1000
    seed: int = 42
    checks: tuple[str, ...] = ()
    max_components: int = 8
    max_denom: int = 64
    span: Fraction = Fraction(4)
    k: Fraction = MAIN_K
    c0: Fraction = MAIN_C0
    k_kprgt: Fraction = KPRGT_K
    workers: int = 1

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise InputError("trials must be >= 1")
        if not self.checks:
            raise InputError("check list must be nonempty")
        unknown = [c for c in self.checks if c not in CHECKS]
        if unknown:
            raise InputError(f"unknown checks: {', '.join(unknown)}")


@dataclass
class TrialResult:
    index: int
    check: str
    verdict: Verdict
    document: SetDocument
    details: dict = field(default_factory=dict)


def _doc(sets: dict, **params) -> SetDocument:
    return SetDocument(dict(sets), {k: Fraction(v) for k, v in params.items()})


def _verdict(ok: bool) -> Verdict:
    return Verdict.PASS if ok else Verdict.FAIL


def _triple(rng: Lcg, cfg: AuditConfig):
    return tuple(random_union(rng, cfg.max_components, cfg.max_denom, cfg.span) for _ in range(3))


def _pair_tau(rng: Lcg, cfg: AuditConfig):
    a = random_union(rng, cfg.max_components, cfg.max_denom, cfg.span)
    b = random_union(rng, cfg.max_components, cfg.max_denom, cfg.span)
    tau = _rand_frac(rng, Fraction(0), min(measure(a), measure(b)))
    return a, b, tau


def check_deficit_rs(rng: Lcg, cfg: AuditConfig):
    a, b, c = _triple(rng, cfg)
    doc = _doc({"A": a, "B": b, "C": c})
    try:
        d = deficit_rs(a, b, c)
    except EngineInvariantError as exc:
        return Verdict.FAIL, doc, {"error": str(exc)}
    return _verdict(d >= 0), doc, {"deficit": d}


def check_deficit_kprgt(rng: Lcg, cfg: AuditConfig):
    a, b, tau = _pair_tau(rng, cfg)
    doc = _doc({"A": a, "B": b}, tau=tau)
    try:
        d = deficit_kprgt(a, b, tau)
    except EngineInvariantError as exc:
        return Verdict.FAIL, doc, {"error": str(exc)}
    return _verdict(d >= 0), doc, {"deficit": d}


def check_identity(rng: Lcg, cfg: AuditConfig):
    a, b, tau = _pair_tau(rng, cfg)
    doc = _doc({"A": a, "B": b}, tau=tau)
    rep = identity_check(a, b, tau)
    return _verdict(rep.residual == 0), doc, {"regime": rep.regime, "residual": rep.residual}


def check_closed_form(rng: Lcg, cfg: AuditConfig):
    # cycle through the three regimes so each is covered evenly
    a = _rand_frac(rng, Fraction(1, 8), Fraction(4))
    b = _rand_frac(rng, Fraction(1, 8), Fraction(4))
    regime = rng.below(3)
    lam, top = abs(a - b), a + b
    if regime == 0:
        c = _rand_frac(rng, Fraction(0), lam)
    elif regime == 1:
        c = _rand_frac(rng, lam, top)
    else:
        c = _rand_frac(rng, top, top + 4)
    i, j, k = centered_interval(a), centered_interval(b), centered_interval(c)
    closed = rearranged_pairing(a, b, c)
    engine = pairing(convolve_indicators(i, j), k)
    doc = _doc({"A": i, "B": j, "C": k})
    return _verdict(closed == engine), doc, {"closed_form": closed, "engine": engine}


def check_layer_cake(rng: Lcg, cfg: AuditConfig):
    a, b, tau = _pair_tau(rng, cfg)
    doc = _doc({"A": a, "B": b}, tau=tau)
    direct = tail_integral(a, b, tau)
    by_levels = tail_integral_by_levels(convolve_indicators(a, b), tau)
    return _verdict(direct == by_levels), doc, {"tail": direct, "by_levels": by_levels}


def check_inclusion(rng: Lcg, cfg: AuditConfig):
    u = random_union(rng, cfg.max_components, cfg.max_denom, cfg.span)
    v = random_union(rng, 3, cfg.max_denom, Fraction(1))
    top = convolve_indicators(u, v).max_value
    mv = measure(v)
    if 2 * top > mv and rng.below(8):
        # aim for a non-vacuous instance: both levels below the max, sum above |V|
        a1 = _rand_frac(rng, mv - top, top)
        a2 = _rand_frac(rng, mv - a1, top)
        a1, a2 = max(a1, Fraction(1, 10 ** 6)), max(a2, Fraction(1, 10 ** 6))
    else:
        a1 = _rand_frac(rng, Fraction(1, 64), max(top, Fraction(1, 32)))
        a2 = _rand_frac(rng, Fraction(1, 64), max(top, Fraction(1, 32)))
    doc = _doc({"U": u, "V": v}, alpha1=a1, alpha2=a2)
    rep = difference_inclusion_check(u, v, a1, a2)
    return rep.verdict, doc, rep.details


def check_keystone(rng: Lcg, cfg: AuditConfig):
    kind = rng.below(3)
    if kind == 0:
        a, b = (
            normalize([(x, x + _rand_frac(rng, Fraction(1, 8), Fraction(3)))])
            for x in (_rand_frac(rng, Fraction(-2), Fraction(2)), _rand_frac(rng, Fraction(-2), Fraction(2)))
        )
    elif kind == 1:
        a, b = near_extremizer_pair(rng)
    else:
        a = random_union(rng, cfg.max_components, cfg.max_denom, cfg.span)
        b = random_union(rng, cfg.max_components, cfg.max_denom, cfg.span)
    doc = _doc({"A": a, "B": b})
    rep = keystone_check(a, b)
    verdict = rep.verdict
    if len(a) == 1 and len(b) == 1 and not rep.details.get("equality", False):
        verdict = Verdict.FAIL
    return verdict, doc, rep.details


def check_kemperman(rng: Lcg, cfg: AuditConfig):
    a = random_union(rng, cfg.max_components, cfg.max_denom, Fraction(1))
    b = random_union(rng, cfg.max_components, cfg.max_denom, Fraction(1))
    doc = _doc({"A": a, "B": b})
    rep = kemperman_check(a, b)
    return rep.verdict, doc, rep.details


def check_truncation(rng: Lcg, cfg: AuditConfig):
    while True:
        a, b, c = _triple(rng, cfg)
        if measure(c) <= measure(a) + measure(b):
            break
    s = min(measure(a), measure(b)) * Fraction(rng.below(100), 100)
    eta = s * Fraction(rng.below(101), 100)
    eta_p = s - eta
    doc = _doc({"A": a, "B": b, "C": c}, eta=eta, eta_prime=eta_p)
    rep = truncation_deficit_check(a, b, c, eta, eta_p)
    return rep.verdict, doc, rep.details


def check_truncation_identity(rng: Lcg, cfg: AuditConfig):
    """Centered-interval truncation identity on its stated domain ``|K| <= |I|+|J|``."""
    a = _rand_frac(rng, Fraction(1, 16), Fraction(4))
    b = _rand_frac(rng, Fraction(1, 16), Fraction(4))
    s = min(a, b) * Fraction(rng.between(1, 99), 100)
    eta = s * Fraction(rng.between(1, 99), 100)
    eta_p = s - eta
    k = (a + b) * Fraction(rng.between(1, 100), 100)
    res = truncation_identity_residual(a, b, k, eta, eta_p)
    doc = _doc({"I": centered_interval(a), "J": centered_interval(b), "K": centered_interval(k)},
               eta=eta, eta_prime=eta_p)
    return _verdict(res == 0), doc, {"residual": res, "k_exceeds_truncated_sum": k > a + b - 2 * s}


def check_superlevel_approx(rng: Lcg, cfg: AuditConfig):
    a, b, e = near_extremizer_triple(rng)
    doc = _doc({"A": a, "B": b, "E": e})
    rep = superlevel_approx_check(a, b, e)
    return rep.verdict, doc, rep.details


def check_equal_measure(rng: Lcg, cfg: AuditConfig):
    length = _rand_frac(rng, Fraction(1), Fraction(2), 16)
    center = _rand_frac(rng, Fraction(-1), Fraction(1), 8)
    a = normalize([(center - length / 2, center + length / 2)])
    b = notched_interval(rng, -center, length, Fraction(0))
    c_len = length * _rand_frac(rng, Fraction(1, 4), Fraction(3, 4), 16)
    c = notched_interval(rng, Fraction(0), c_len, small_scale(rng, Fraction(1, 100)) * length)
    doc = _doc({"A": a, "B": b, "C": c})
    rep = equal_measure_case_check(a, b, c)
    return rep.verdict, doc, rep.details


def check_best_interval(rng: Lcg, cfg: AuditConfig):
    u = random_union(rng, 12, cfg.max_denom, cfg.span)
    fast, slow = best_interval(u), brute_force_best_interval(u)
    doc = _doc({"A": u})
    ok = fast.gap == slow.gap and fast.interval == slow.interval
    return _verdict(ok), doc, {"gap": fast.gap, "brute_gap": slow.gap}


def check_main_theorem(rng: Lcg, cfg: AuditConfig):
    a, b, c = near_extremizer_triple(rng)
    doc = _doc({"A": a, "B": b, "C": c})
    rep = verify_main_theorem(a, b, c, cfg.k)
    return rep.verdict, doc, {"ratio_gap": rep.ratio_gap, "ratio_center": rep.ratio_center,
                              "epsilon": rep.epsilon, "eta": rep.eta}


def check_sharpened_rs(rng: Lcg, cfg: AuditConfig):
    a, b, c = near_extremizer_triple(rng)
    # <1_A*1_B, 1_C> = <1_B*1_A, 1_C> = <1_C*1_{-B}, 1_A>, so these
    # reorderings keep the deficit and let each set take the scanned slot
    turn = rng.below(3)
    a, b, c = ((a, b, c), (b, a, c), (c, reflect(b), a))[turn]
    doc = _doc({"A": a, "B": b, "C": c})
    rep = verify_sharpened_rs(a, b, c, cfg.c0, cfg.k)
    return rep.verdict, doc, rep.details


def check_kprgt_stability(rng: Lcg, cfg: AuditConfig):
    a, b = near_extremizer_pair(rng)
    lo, hi = sorted((measure(a), measure(b)))
    tau = _rand_frac(rng, lo * 2 / 5, lo * 3 / 5, 20)
    eta = kprgt_eta(measure(a), measure(b), tau)
    doc = _doc({"A": a, "B": b}, tau=tau, eta=eta)
    rep = verify_kprgt_stability(a, b, tau, eta, cfg.k_kprgt)
    return rep.verdict, doc, rep.details


CheckFn = Callable[[Lcg, AuditConfig], tuple]

CHECKS: dict[str, CheckFn] = {
    "deficit_rs": check_deficit_rs,
    "deficit_kprgt": check_deficit_kprgt,
    "identity": check_identity,
    "closed_form": check_closed_form,
    "layer_cake": check_layer_cake,
    "inclusion": check_inclusion,
    "keystone": check_keystone,
    "kemperman": check_kemperman,
    "truncation": check_truncation,
    "truncation_identity": check_truncation_identity,
    "superlevel_approx": check_superlevel_approx,
    "equal_measure": check_equal_measure,
    "best_interval": check_best_interval,
    "main_theorem": check_main_theorem,
    "sharpened_rs": check_sharpened_rs,
    "kprgt_stability": check_kprgt_stability,
}

DEFAULT_CHECKS = ("deficit_rs", "deficit_kprgt", "identity", "inclusion", "keystone",
                  "kemperman", "truncation", "superlevel_approx", "main_theorem",
                  "kprgt_stability")


def run_trial(check: str, index: int, cfg: AuditConfig) -> TrialResult:
    # each check gets its own stream so adding checks never shifts another's corpus
    rng = Lcg(cfg.seed + index)
    verdict, doc, details = CHECKS[check](rng, cfg)
    return TrialResult(index, check, verdict, doc, details)


def _run_chunk(args) -> list[TrialResult]:
    check, indices, cfg = args
    return [run_trial(check, i, cfg) for i in indices]


@dataclass
class AuditSummary:
    results: dict[str, list[TrialResult]]

    def counts(self, check: str) -> Counter:
        return Counter(r.verdict for r in self.results[check])

    def failures(self) -> list[TrialResult]:
        return [r for rs in self.results.values() for r in rs if r.verdict is Verdict.FAIL]

    def vacuous(self, check: str) -> int:
        return sum(1 for r in self.results[check] if r.details.get("vacuous"))

    @property
    def ok(self) -> bool:
        return not self.failures()


def run_audit(cfg: AuditConfig, progress: Optional[Callable[[str], None]] = None) -> AuditSummary:
    """Run every configured check for ``cfg.trials`` trials.

    With ``workers > 1`` trials are farmed out in chunks to a process pool;
    results are reassembled in index order, so output is identical to a
    serial run.
    """
    results: dict[str, list[TrialResult]] = {}
    for check in cfg.checks:
        if progress:
            progress(check)
        if cfg.workers > 1:
            step = max(1, cfg.trials // (cfg.workers * 8))
            chunks = [(check, range(i, min(i + step, cfg.trials)), cfg)
                      for i in range(0, cfg.trials, step)]
            with ProcessPoolExecutor(cfg.workers) as pool:
                out = [r for part in pool.map(_run_chunk, chunks) for r in part]
        else:
            out = [run_trial(check, i, cfg) for i in range(cfg.trials)]
        results[check] = out
    return AuditSummary(results)


def checks_from_arg(arg: Optional[str]) -> tuple[str, ...]:
    if not arg:
        return DEFAULT_CHECKS
    names = tuple(s.strip() for s in arg.split(",") if s.strip())
    if names == ("all",):
        return tuple(CHECKS)
    return names

