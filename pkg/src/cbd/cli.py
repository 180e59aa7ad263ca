"""Command-line interface: ``cbd analyze | estimate | consistency``.

Exit codes
  0  success (consistency: consistently connected)
  1  unreadable input, parse or validation error
  2  assignment space over the cap and no closed form applies
  3  LP and closed form disagree (a defect, never resolved silently)
  4  consistency: strictly inconsistently connected
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .coupling import (
    DEFAULT_CAP_BITS,
    Method,
    connection_maxima,
    contextuality_measure,
    decode_assignment,
    slot_layout,
)
from .cyclic import cyclic_criterion, cyclic_measure, detect_cyclic, s_odd
from .errors import CbdError, TooLarge
from .ingest import estimate_from_trials, parse_system, read_trials_csv, serialize_system
from .model import is_consistently_connected

EXIT_OK, EXIT_INPUT, EXIT_TOO_LARGE, EXIT_DISAGREE, EXIT_INCONSISTENT = 0, 1, 2, 3, 4


def _q(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _load(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CbdError(f"cannot read {path}: {exc.strerror}") from None
    return parse_system(text)


def analyze(system, method: str = "auto", cap_bits: int = DEFAULT_CAP_BITS) -> tuple[int, dict]:
    """Run the requested engines and build the output document."""
    out: dict = {"method": method, "methods_run": [], "cntx": None, "contextual": None,
                 "agree": None, "lp": None, "cyclic": None}
    structure = detect_cyclic(system) if method in ("auto", "cyclic") else None
    if method == "cyclic" and not structure:
        out["error"] = f"not a cyclic system: {structure.reason}"
        return EXIT_INPUT, out
    report = None
    if method in ("auto", "lp"):
        try:
            report = contextuality_measure(system, cap_bits)
        except TooLarge as exc:
            if method == "lp" or not structure:
                out["error"] = str(exc)
                return EXIT_TOO_LARGE, out
    if structure:
        cc = cyclic_measure(structure)
        out["methods_run"].append(Method.CYCLIC.value)
        out["cyclic"] = {
            "rank": structure.rank,
            "object_order": list(structure.object_order),
            "context_order": list(structure.context_order),
            "s_odd": _q(s_odd(structure.product_expectations)),
            "marginal_discrepancy": _q(structure.marginal_discrepancy),
            "cntx": _q(cc),
            "criterion": cyclic_criterion(structure),
        }
        out["cntx"], out["contextual"] = cc, cc > 0
    if report is not None:
        out["methods_run"].insert(0, Method.LP.value)
        out["lp"] = {
            "maxeq_system": _q(report.maxeq_system),
            "maxeq_connections_sum": _q(report.maxeq_connections_sum),
            "cntx": _q(report.cntx),
        }
        if structure:
            out["agree"] = report.cntx == out["cntx"]
        out["cntx"], out["contextual"] = report.cntx, report.contextual
        if report.description is not None:
            layout = slot_layout(system)
            out["description"] = {
                "slots": [list(s) for s in layout.slots],
                "distribution": [
                    {"index": k, "assignment": list(decode_assignment(system, k)), "p": _q(p)}
                    for k, p in sorted(report.description.distribution.items())
                ],
                "per_connection_eq": {q: _q(v) for q, v in report.description.per_connection_eq.items()},
            }
    maxima = report.per_connection_maxeq if report else connection_maxima(system)
    consistency = is_consistently_connected(system)
    out["connections"] = {q: {"maxeq": _q(v)} for q, v in maxima.items()}
    out["consistency"] = {
        "consistent": consistency.consistent,
        "max_discrepancy": {q: _q(v) for q, v in consistency.per_object_max_discrepancy.items()},
    }
    out["cntx_decimal"] = float(out["cntx"])
    out["cntx"] = _q(out["cntx"])
    if out["agree"] is False:
        out["error"] = f"LP cntx {out['lp']['cntx']} != closed form {out['cyclic']['cntx']}"
        return EXIT_DISAGREE, out
    return EXIT_OK, out


def _plain(q: str) -> str:
    return q[:-2] if q.endswith("/1") else q


def _print_analysis(doc: dict) -> None:
    if "error" in doc and doc["cntx"] is None:
        return
    doc = json.loads(json.dumps(doc), object_hook=lambda d: {
        k: _plain(v) if isinstance(v, str) else v for k, v in d.items()})
    print(f"cntx        = {doc['cntx']}  ({doc['cntx_decimal']:.6f})")
    print(f"contextual  = {'yes' if doc['contextual'] else 'no'}")
    print(f"methods     = {', '.join(doc['methods_run'])}"
          + ("" if doc["agree"] is None else f"  (agree: {'yes' if doc['agree'] else 'NO'})"))
    if doc["lp"]:
        print(f"maxeq(system)            = {doc['lp']['maxeq_system']}")
        print(f"sum of maxeq(connection) = {doc['lp']['maxeq_connections_sum']}")
    if doc["cyclic"]:
        c = doc["cyclic"]
        print(f"cyclic rank {c['rank']}: {' -> '.join(c['object_order'])}; "
              f"s_odd = {c['s_odd']}, marginal discrepancy = {c['marginal_discrepancy']}")
    print("connections:")
    for q, info in doc["connections"].items():
        disc = doc["consistency"]["max_discrepancy"][q]
        print(f"  {q}: maxeq = {info['maxeq']}, max discrepancy = {disc}")
    print(f"consistently connected: {'yes' if doc['consistency']['consistent'] else 'no'}")


def cmd_analyze(args) -> int:
    system = _load(args.path)
    code, doc = analyze(system, args.method, args.cap_bits)
    if args.json:
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        _print_analysis(doc)
    if "error" in doc:
        print(f"error: {doc['error']}", file=sys.stderr)
    return code


def cmd_estimate(args) -> int:
    try:
        text = Path(args.trials).read_text(encoding="utf-8")
    except OSError as exc:
        raise CbdError(f"cannot read {args.trials}: {exc.strerror}") from None
    report = estimate_from_trials(read_trials_csv(text), min_trials=args.min_trials)
    body = serialize_system(report.system)
    info = sys.stdout
    if args.out:
        Path(args.out).write_text(body, encoding="utf-8")
    else:
        sys.stdout.write(body)
        info = sys.stderr
    for ctx, n in report.counts.items():
        print(f"{ctx}: {n} trials", file=info)
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def cmd_consistency(args) -> int:
    report = is_consistently_connected(_load(args.path))
    if args.json:
        print(json.dumps({"consistent": report.consistent,
                          "max_discrepancy": {q: _q(v) for q, v in
                                              report.per_object_max_discrepancy.items()}},
                         indent=2, sort_keys=True))
    else:
        for q, v in report.per_object_max_discrepancy.items():
            print(f"{q}: {_plain(_q(v))}")
        print("consistently connected" if report.consistent else "inconsistently connected")
    return EXIT_OK if report.consistent else EXIT_INCONSISTENT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cbd", description="Contextuality analysis of systems of measurements.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="compute cntx and the contextuality verdict")
    p.add_argument("path")
    p.add_argument("--method", choices=("auto", "lp", "cyclic"), default="auto")
    p.add_argument("--json", action="store_true")
    p.add_argument("--cap-bits", type=int, default=DEFAULT_CAP_BITS,
                   help="refuse LPs with more than 2**N assignment variables (default %(default)s)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("estimate", help="build a system file from a trial CSV")
    p.add_argument("trials")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--min-trials", type=int, default=10,
                   help="warn for contexts with fewer trials (default %(default)s)")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("consistency", help="report per-object marginal discrepancies")
    p.add_argument("path")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_consistency)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CbdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def run() -> None:
    sys.exit(main())
