"""Command-line interface: ``rslab {eval,audit,probe,approx,check,calibrate}``.

Exit codes: 0 success (all checks passed), 1 at least one FAIL, 2 bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from enum import Enum
from fractions import Fraction
from typing import Any, Optional, Sequence

from . import audit as audit_mod
from .calibration import KPRGT_K, MAIN_C0, MAIN_K, calibrate
from .conv import convolve_indicators, pairing
from .functionals import (
    CheckReport,
    Verdict,
    admissibility_eta,
    deficit_report,
    deficit_rs,
    difference_inclusion_check,
    equal_measure_case_check,
    identity_check,
    keystone_check,
    kemperman_check,
    localization_check,
    rearranged_pairing,
    superlevel_approx_check,
    truncation_deficit_check,
)
from .intervals import Interval, InputError, format_rational, measure, normalize
from .setdoc import SetDocument
from .stability import (
    best_interval,
    sharpness_probe,
    verify_kprgt_stability,
    verify_main_theorem,
    verify_sharpened_rs,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


# ---------------------------------------------------------------------------
# rendering


def _plain(value: Any) -> Any:
    """JSON-safe view: rationals as "p/q" strings, never floats."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, int):
        return format_rational(Fraction(value))
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Interval):
        return [format_rational(value.lo), format_rational(value.hi)]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, float):
        return value
    return str(value)


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6g}"
    p = _plain(value)
    return p if isinstance(p, str) else json.dumps(p)


def _with_floats(rows: list[dict]) -> list[dict]:
    # CSV view: every rational column gets a float twin for plotting
    out = []
    for row in rows:
        new = {}
        for k, v in row.items():
            new[k] = _cell(v)
            if isinstance(v, Fraction):
                new[k + "_float"] = repr(float(v))
        out.append(new)
    return out


def render(rows: list[dict], fmt: str, extra: Optional[dict] = None) -> str:
    if fmt == "json":
        obj = {"rows": _plain(rows)}
        if extra:
            obj.update(_plain(extra))
        return json.dumps(obj, indent=2, sort_keys=False) + "\n"
    if fmt == "csv":
        flat = _with_floats(rows)
        header: list[str] = []
        for row in flat:
            for k in row:
                if k in header:
                    continue
                base = k[: -len("_float")] if k.endswith("_float") else None
                if base in header:
                    header.insert(header.index(base) + 1, k)
                else:
                    header.append(k)
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
        writer.writeheader()
        writer.writerows(flat)
        return buf.getvalue()
    if not rows:
        return "(no rows)\n"
    header = []
    for row in rows:
        header += [k for k in row if k not in header]
    cells = [[_cell(row.get(k)) for k in header] for row in rows]
    widths = [max(len(h), *(len(c[i]) for c in cells)) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)),
             "  ".join("-" * w for w in widths)]
    lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in cells]
    return "\n".join(lines) + "\n"


def emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# argument helpers


def rational_arg(text: str) -> Fraction:
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None
    return value


def rational_list(text: str) -> list[Fraction]:
    return [rational_arg(t) for t in text.split(",") if t.strip()]


def load_document(path: str) -> SetDocument:
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return SetDocument.loads(text)


def _report_row(rep: CheckReport) -> dict:
    return {"check": rep.name, "verdict": rep.verdict, **rep.details}


# ---------------------------------------------------------------------------
# subcommands


def cmd_eval(args) -> int:
    doc = load_document(args.document)
    a, b = doc.get("A"), doc.get("B")
    rows = [{"quantity": "|A|", "value": measure(a)}, {"quantity": "|B|", "value": measure(b)}]
    if "C" in doc.sets:
        c = doc.sets["C"]
        actual = pairing(convolve_indicators(a, b), c)
        rows += [
            {"quantity": "|C|", "value": measure(c)},
            {"quantity": "pairing", "value": actual},
            {"quantity": "rearranged", "value": rearranged_pairing(measure(a), measure(b), measure(c))},
            {"quantity": "D", "value": deficit_rs(a, b, c)},
            {"quantity": "eta", "value": admissibility_eta(a, b, c)},
        ]
    if "tau" in doc.params:
        rep = deficit_report(a, b, doc.params["tau"])
        ident = identity_check(a, b, doc.params["tau"])
        rows += [
            {"quantity": "tau", "value": rep.tau},
            {"quantity": "D_kprgt", "value": rep.d_kprgt},
            {"quantity": "D(A,B,S(tau))", "value": rep.d_rs},
            {"quantity": "sigma", "value": rep.sigma},
            {"quantity": "regime", "value": rep.regime},
            {"quantity": "identity_residual", "value": ident.residual},
        ]
    emit(render(rows, args.format), args.out)
    return EXIT_OK


def cmd_approx(args) -> int:
    doc = load_document(args.document)
    rows = []
    for name, u in doc.sets.items():
        bi = best_interval(u)
        rows.append({"set": name, "measure": measure(u),
                     "lo": bi.interval.lo if bi.interval else None,
                     "hi": bi.interval.hi if bi.interval else None,
                     "gap": bi.gap})
    emit(render(rows, args.format), args.out)
    return EXIT_OK


def cmd_probe(args) -> int:
    if args.document:
        doc = load_document(args.document)
        a, b = doc.get("A"), doc.get("B")
    else:
        a = b = normalize([(-1, 1)])
    points = sharpness_probe(args.gamma, args.deltas, a, b)
    rows = [{"delta": p.delta, "valid": p.valid, "d_rs": p.d_rs, "c_gap": p.c_gap,
             "deficit_ratio": p.deficit_ratio, "slope": p.slope} for p in points]
    emit(render(rows, args.format), args.out)
    return EXIT_OK


def _single_check(name: str, doc: SetDocument, args) -> CheckReport:
    g, p = doc.get, doc.param
    if name == "identity":
        rep = identity_check(g("A"), g("B"), p("tau"))
        return CheckReport(name, Verdict.PASS if rep.residual == 0 else Verdict.FAIL,
                           {"regime": rep.regime, "lhs": rep.lhs, "rhs": rep.rhs,
                            "residual": rep.residual})
    if name == "superlevel_approx":
        return superlevel_approx_check(g("A"), g("B"), g("E") if "E" in doc.sets else g("C"))
    if name == "inclusion":
        return difference_inclusion_check(g("U"), g("V"), p("alpha1"), p("alpha2"))
    if name == "keystone":
        return keystone_check(g("A"), g("B"))
    if name == "kemperman":
        return kemperman_check(g("A"), g("B"))
    if name == "localization":
        return localization_check(g("A"), g("B"), p("c"))
    if name == "truncation":
        return truncation_deficit_check(g("A"), g("B"), g("C"), p("eta"), p("eta_prime"))
    if name == "equal_measure":
        return equal_measure_case_check(g("A"), g("B"), g("C"))
    if name == "main_theorem":
        rep = verify_main_theorem(g("A"), g("B"), g("C"), args.K)
        return CheckReport(name, rep.verdict, {
            "epsilon": rep.epsilon, "eta": rep.eta, "gaps": rep.gaps,
            "center_discrepancy": rep.center_discrepancy, "ratio_gap": rep.ratio_gap,
            "ratio_center": rep.ratio_center, "hypothesis_met": rep.hypothesis_met})
    if name == "sharpened_rs":
        return verify_sharpened_rs(g("A"), g("B"), g("C"), args.c0, args.K)
    if name == "kprgt_stability":
        return verify_kprgt_stability(g("A"), g("B"), p("tau"), p("eta"), args.K_kprgt)
    raise InputError(f"unknown check {name!r}")


SINGLE_CHECKS = ("identity", "superlevel_approx", "inclusion", "keystone", "kemperman",
                 "localization", "truncation", "equal_measure", "main_theorem",
                 "sharpened_rs", "kprgt_stability")


def cmd_check(args) -> int:
    doc = load_document(args.document)
    rep = _single_check(args.name, doc, args)
    emit(render([_report_row(rep)], args.format), args.out)
    return EXIT_FAIL if rep.verdict is Verdict.FAIL else EXIT_OK


def cmd_audit(args) -> int:
    cfg = audit_mod.AuditConfig(
        trials=args.trials, seed=args.seed, checks=audit_mod.checks_from_arg(args.checks),
        max_components=args.components, max_denom=args.denominator, span=args.range,
        k=args.K, c0=args.c0, k_kprgt=args.K_kprgt, workers=args.workers,
    )
    summary = audit_mod.run_audit(cfg)
    if args.format == "csv":
        rows = [{"check": r.check, "trial": r.index, "seed": cfg.seed + r.index,
                 "verdict": r.verdict} for rs in summary.results.values() for r in rs]
        emit(render(rows, "csv"), args.out)
    else:
        rows = []
        for check in cfg.checks:
            counts = summary.counts(check)
            rows.append({"check": check, "pass": counts[Verdict.PASS], "fail": counts[Verdict.FAIL],
                         "hypothesis_not_met": counts[Verdict.HYPOTHESIS_NOT_MET],
                         "vacuous": summary.vacuous(check)})
        fails = summary.failures()
        if args.format == "json":
            extra = {"seed": cfg.seed, "trials": cfg.trials,
                     "failures": [{"check": f.check, "trial": f.index, "document": f.document.to_obj(),
                                   "details": f.details} for f in fails]}
            emit(render(rows, "json", extra), args.out)
        else:
            text = render(rows, "table")
            for f in fails[: args.max_reproducers]:
                text += f"\nFAIL {f.check} trial {f.index} (seed {cfg.seed + f.index})\n"
                text += f.document.dumps() + "\n"
            emit(text, args.out)
    return EXIT_OK if summary.ok else EXIT_FAIL


def cmd_calibrate(args) -> int:
    res = calibrate(args.trials, args.seed, args.K, args.K_kprgt)
    rows = [
        {"quantity": "max_ratio_gap", "value": res.max_ratio_gap},
        {"quantity": "max_ratio_center", "value": res.max_ratio_center},
        {"quantity": "min_c0", "value": res.min_c0},
        {"quantity": "max_kprgt_ratio", "value": res.max_kprgt_ratio},
    ]
    rows += [{"quantity": f"not_met_rate[{c}]", "value": r} for c, r in res.not_met_rates.items()]
    rows += [{"quantity": f"proposed {k}", "value": v} for k, v in res.proposal().items()]
    emit(render(rows, args.format), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "json", "csv"), default="table")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")

    consts = argparse.ArgumentParser(add_help=False)
    consts.add_argument("--K", type=rational_arg, default=MAIN_K,
                        help=f"stability constant K (default {format_rational(MAIN_K)})")
    consts.add_argument("--c0", type=rational_arg, default=MAIN_C0,
                        help=f"sharpened RS constant (default {format_rational(MAIN_C0)})")
    consts.add_argument("--K-kprgt", dest="K_kprgt", type=rational_arg, default=KPRGT_K,
                        help=f"KPRGT stability constant (default {format_rational(KPRGT_K)})")

    parser = argparse.ArgumentParser(
        prog="rslab",
        description="Exact interval-union calculus for Riesz-Sobolev and KPRGT deficits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common],
                       help="pairing and deficits for a SetDocument (sets A, B, optional C, param tau)")
    p.add_argument("document", help="SetDocument JSON path, or - for stdin")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("approx", parents=[common], help="best approximating interval for each set")
    p.add_argument("document")
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser(
        "probe", parents=[common],
        help="sharpness family C = [-g, g] u [g+d, g+2d]",
        description="CSV columns: delta, valid, d_rs, c_gap, deficit_ratio (D_prev/D), slope "
                    "(log-log against the previous valid point); rationals also get a _float column.",
    )
    p.add_argument("--gamma", type=rational_arg, default=Fraction(1, 2))
    p.add_argument("--deltas", type=rational_list,
                   default=[Fraction(1, 2 ** k) for k in range(3, 11)])
    p.add_argument("document", nargs="?", help="optional SetDocument with A and B (default A=B=(-1,1))")
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("check", parents=[common, consts], help="run one named check on a SetDocument")
    p.add_argument("name", choices=SINGLE_CHECKS)
    p.add_argument("document")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser(
        "audit", parents=[common, consts],
        help="randomized property suite",
        description="Table/json: per-check pass/fail/hypothesis-not-met counts. "
                    "CSV columns: check, trial, seed (seed+trial), verdict.",
    )
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--checks", help="comma-separated subset of: " + ", ".join(audit_mod.CHECKS)
                   + " (or 'all')")
    p.add_argument("--components", type=int, default=8, help="max components per random set")
    p.add_argument("--denominator", type=int, default=64, help="max endpoint denominator")
    p.add_argument("--range", type=rational_arg, default=Fraction(4), help="sets lie in [-range, range]")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--max-reproducers", type=int, default=5)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("calibrate", parents=[common, consts],
                       help="measure stability ratios on the near-extremizer corpus")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_calibrate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"rslab: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
