"""Reading and writing system files, and estimating systems from trials.

System files are JSON::

    {"objects":  [{"id": "q1", "alphabet": ["+1", "-1"]}, ...],
     "contexts": [{"id": "c1", "members": ["q1", "q2"],
                   "distribution": [{"outcome": ["+1", "+1"], "p": "1/2"}, ...]}, ...]}

Probabilities are "num/den" strings or decimal strings; bare JSON numbers
are read from their literal text, so ``0.1`` means exactly 1/10.  Unknown
keys are rejected.  Trial files are long-format CSV with the header
``trial_id,context,object,value``.
"""
from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import (
    DuplicateId,
    EmptyInput,
    FileSyntaxError,
    InconsistentMembership,
    TrialFormatError,
    ValidationError,
)
from .model import BINARY_SYMBOLS, System, build_system

TRIAL_COLUMNS = ("trial_id", "context", "object", "value")
DEFAULT_MIN_TRIALS = 10


class _Numeral(str):
    """Literal text of a JSON number, kept exact."""


def _expect_keys(obj, allowed: set, required: set, where: str):
    if not isinstance(obj, dict):
        raise FileSyntaxError(f"{where}: expected an object, got {type(obj).__name__}")
    unknown = set(obj) - allowed
    if unknown:
        raise FileSyntaxError(f"{where}: unknown keys {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise FileSyntaxError(f"{where}: missing keys {sorted(missing)}")


def _string_list(value, where: str) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(v, str) and not isinstance(v, _Numeral)
                                              for v in value):
        raise FileSyntaxError(f"{where}: expected a list of strings")
    return list(value)


def _check_id(value, where: str):
    if not isinstance(value, str) or isinstance(value, _Numeral):
        raise FileSyntaxError(f"{where}: ids must be strings")


def parse_system(text: str) -> System:
    try:
        doc = json.loads(text, parse_float=_Numeral, parse_int=_Numeral)
    except json.JSONDecodeError as exc:
        raise FileSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    _expect_keys(doc, {"objects", "contexts"}, {"objects", "contexts"}, "top level")
    if not isinstance(doc["objects"], list) or not isinstance(doc["contexts"], list):
        raise FileSyntaxError("top level: 'objects' and 'contexts' must be lists")

    objects = []
    for k, obj in enumerate(doc["objects"]):
        _expect_keys(obj, {"id", "alphabet"}, {"id", "alphabet"}, f"objects[{k}]")
        _check_id(obj["id"], f"objects[{k}].id")
        objects.append((obj["id"], _string_list(obj["alphabet"], f"objects[{k}].alphabet")))

    contexts, tables = [], []
    for k, ctx in enumerate(doc["contexts"]):
        _expect_keys(ctx, {"id", "members", "distribution"}, {"id", "members", "distribution"},
                     f"contexts[{k}]")
        name = ctx["id"]
        _check_id(name, f"contexts[{k}].id")
        members = _string_list(ctx["members"], f"context {name!r} members")
        if not isinstance(ctx["distribution"], list):
            raise FileSyntaxError(f"context {name!r}: distribution must be a list")
        table = []
        for e, entry in enumerate(ctx["distribution"]):
            _expect_keys(entry, {"outcome", "p"}, {"outcome", "p"},
                         f"context {name!r} distribution[{e}]")
            outcome = _string_list(entry["outcome"], f"context {name!r} distribution[{e}].outcome")
            if len(outcome) != len(members):
                raise FileSyntaxError(
                    f"context {name!r}: outcome {outcome} has arity {len(outcome)}, "
                    f"expected {len(members)}")
            p = entry["p"]
            if not isinstance(p, str):
                raise FileSyntaxError(f"context {name!r}: probability must be a string or number")
            try:
                p = Fraction(p.strip())
            except ValueError:
                raise FileSyntaxError(f"context {name!r}: cannot read probability {p!r}") from None
            table.append((tuple(outcome), p))
        contexts.append((name, members))
        tables.append((name, table))

    names = [c for c, _ in contexts]
    if len(set(names)) != len(names):
        raise DuplicateId(f"context ids repeated: {sorted(c for c, n in Counter(names).items() if n > 1)}")
    return build_system(objects, contexts, dict(tables))


def _p(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def system_to_dict(system: System) -> dict:
    return {
        "objects": [{"id": q, "alphabet": list(a.symbols)} for q, a in system.alphabets.items()],
        "contexts": [
            {"id": b.context, "members": list(b.members),
             "distribution": [{"outcome": list(o), "p": _p(p)} for o, p in b.table.items()]}
            for b in system.bunches
        ],
    }


def serialize_system(system: System) -> str:
    """Canonical text: ids sorted, outcomes in alphabet order, rationals in lowest terms."""
    return json.dumps(system_to_dict(system), indent=2, ensure_ascii=False) + "\n"


# -- trials ---------------------------------------------------------------

@dataclass(frozen=True)
class TrialRecord:
    trial_id: str
    context: str
    outcomes: Mapping[str, str] = field(compare=False)

    def __eq__(self, other):
        if not isinstance(other, TrialRecord):
            return NotImplemented
        return (self.trial_id, self.context, dict(self.outcomes)) == (
            other.trial_id, other.context, dict(other.outcomes))


def _normalize_value(v: str) -> str:
    v = v.strip()
    return "+1" if v in ("1", "+1", "+") else "-1" if v in ("-1", "-") else v


def read_trials_csv(text: str) -> list[TrialRecord]:
    """Group long-format rows into one record per trial_id (first-seen order)."""
    if not text.strip():
        raise EmptyInput("trial file is empty")
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = [h.strip() for h in next(reader)]
    except csv.Error as exc:
        raise TrialFormatError(str(exc), 1) from None
    if tuple(header) != TRIAL_COLUMNS:
        raise TrialFormatError(f"header must be {','.join(TRIAL_COLUMNS)}, got {','.join(header)}", 1)
    trials: dict[str, tuple[str, dict[str, str]]] = {}
    row_no = 1
    try:
        for row in reader:
            row_no += 1
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 4:
                raise TrialFormatError(f"expected 4 fields, got {len(row)}", row_no)
            trial, ctx, obj, value = (c.strip() for c in row)
            if not (trial and ctx and obj and value):
                raise TrialFormatError("empty field", row_no)
            value = _normalize_value(value)
            if trial not in trials:
                trials[trial] = (ctx, {})
            seen_ctx, outcomes = trials[trial]
            if seen_ctx != ctx:
                raise TrialFormatError(
                    f"trial {trial!r} is in context {seen_ctx!r}, row says {ctx!r}", row_no)
            if obj in outcomes:
                raise TrialFormatError(f"trial {trial!r} records {obj!r} twice", row_no)
            outcomes[obj] = value
    except csv.Error as exc:
        raise TrialFormatError(str(exc), row_no) from None
    if not trials:
        raise EmptyInput("trial file has a header but no rows")
    return [TrialRecord(t, c, o) for t, (c, o) in trials.items()]


@dataclass(frozen=True)
class EstimationReport:
    system: System
    counts: Mapping[str, int] = field(compare=False)
    warnings: tuple[str, ...] = ()


def _alphabet(observed: set[str]) -> tuple[str, ...]:
    if observed <= set(BINARY_SYMBOLS):
        return BINARY_SYMBOLS
    return tuple(sorted(observed))


def estimate_from_trials(records: Iterable[TrialRecord],
                         min_trials: int = DEFAULT_MIN_TRIALS,
                         alphabets: Mapping[str, Iterable[str]] | None = None) -> EstimationReport:
    """Empirical-frequency system from trial records (no smoothing).

    Context members are listed in sorted id order, so the result does not
    depend on the order of the records.  An object's alphabet is the set of
    values it shows anywhere, or ('+1', '-1') when all of them are +-1;
    ``alphabets`` overrides that per object.
    """
    records = list(records)
    if not records:
        raise EmptyInput("no trial records")
    membership: dict[str, frozenset] = {}
    counts: dict[str, Counter] = {}
    observed: dict[str, set] = {}
    for rec in records:
        members = frozenset(rec.outcomes)
        if not members:
            raise ValidationError(f"trial {rec.trial_id!r} records no outcomes")
        if membership.setdefault(rec.context, members) != members:
            raise InconsistentMembership(
                f"context {rec.context!r} has members {sorted(membership[rec.context])} "
                f"but trial {rec.trial_id!r} has {sorted(members)}")
        order = sorted(members)
        counts.setdefault(rec.context, Counter())[tuple(rec.outcomes[q] for q in order)] += 1
        for q, v in rec.outcomes.items():
            observed.setdefault(q, set()).add(v)

    chosen = {q: _alphabet(v) for q, v in observed.items()}
    for q, symbols in (alphabets or {}).items():
        chosen[q] = tuple(symbols)
    for q, symbols in chosen.items():
        if len(symbols) < 2:
            raise ValidationError(
                f"object {q!r} only ever shows {symbols[0]!r}; pass its alphabet explicitly")

    totals = {c: sum(cnt.values()) for c, cnt in counts.items()}
    system = build_system(
        sorted(chosen.items()),
        [(c, sorted(membership[c])) for c in sorted(membership)],
        {c: {o: Fraction(k, totals[c]) for o, k in cnt.items()} for c, cnt in counts.items()},
    )
    warnings = tuple(f"context {c!r} has only {n} trials (< {min_trials})"
                     for c, n in sorted(totals.items()) if n < min_trials)
    return EstimationReport(system, dict(sorted(totals.items())), warnings)


def trials_to_csv(records: Iterable[TrialRecord]) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(TRIAL_COLUMNS)
    for rec in records:
        for q, v in rec.outcomes.items():
            w.writerow([rec.trial_id, rec.context, q, v])
    return out.getvalue()
