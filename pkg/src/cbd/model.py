"""Systems of measurements: objects, contexts, bunches and connections.

A system is built once, validated, and never mutated.  Objects and contexts
are plain string ids; after construction they are stored sorted by id, which
fixes the canonical slot order used by the coupling engine.  Probabilities
are always :class:`fractions.Fraction`.

Random variables from different bunches have no joint distribution, so a
:class:`System` deliberately offers nothing but per-bunch queries.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .errors import (
    AlphabetMismatch,
    DuplicateId,
    EmptyContext,
    ProbabilitySumNotOne,
    UnknownObject,
    ValidationError,
)
from .lp import as_fraction

BINARY_SYMBOLS = ("+1", "-1")
_SIGN = {"+1": 1, "-1": -1}


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]

    def __post_init__(self):
        if len(self.symbols) < 2:
            raise ValidationError(f"alphabet {self.symbols!r} needs at least 2 symbols")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValidationError(f"alphabet {self.symbols!r} repeats a symbol")
        for s in self.symbols:
            if not isinstance(s, str) or not s:
                raise ValidationError(f"alphabet symbols must be nonempty strings, got {s!r}")

    @property
    def binary(self) -> bool:
        return self.symbols == BINARY_SYMBOLS

    def __len__(self) -> int:
        return len(self.symbols)

    def index(self, symbol: str) -> int:
        return self.symbols.index(symbol)

    def sign(self, symbol: str) -> int:
        """Numeric value +1/-1 of a binary symbol."""
        if not self.binary:
            raise ValueError("sign() is only defined on the binary alphabet")
        return _SIGN[symbol]


@dataclass(frozen=True)
class Bunch:
    """Exact joint distribution of the measurements recorded in one context.

    ``table`` maps outcome tuples (one symbol per member, in member order) to
    probabilities; tuples absent from the table have probability zero.
    """

    context: str
    members: tuple[str, ...]
    table: Mapping[tuple[str, ...], Fraction] = field(compare=False)

    def __eq__(self, other):
        if not isinstance(other, Bunch):
            return NotImplemented
        return (self.context, self.members, dict(self.table)) == (
            other.context, other.members, dict(other.table))

    def prob(self, outcome: Sequence[str]) -> Fraction:
        return self.table.get(tuple(outcome), Fraction(0))

    def marginal(self, obj: str) -> dict[str, Fraction]:
        pos = self.members.index(obj)
        out: dict[str, Fraction] = {}
        for outcome, p in self.table.items():
            out[outcome[pos]] = out.get(outcome[pos], Fraction(0)) + p
        return out

    def expectation(self, objs: Sequence[str]) -> Fraction:
        """E[product of the +-1 values of ``objs``]; binary members only."""
        pos = [self.members.index(o) for o in objs]
        total = Fraction(0)
        for outcome, p in self.table.items():
            sign = 1
            for i in pos:
                sign *= _SIGN[outcome[i]]
            total += sign * p
        return total


@dataclass(frozen=True)
class Connection:
    """Distributions of one object in every context that contains it.

    ``marginals`` maps context id to a tuple of probabilities aligned with
    ``alphabet.symbols``.  These are not jointly distributed.
    """

    object: str
    alphabet: Alphabet
    marginals: Mapping[str, tuple[Fraction, ...]] = field(compare=False)

    def __eq__(self, other):
        if not isinstance(other, Connection):
            return NotImplemented
        return (self.object, self.alphabet, dict(self.marginals)) == (
            other.object, other.alphabet, dict(other.marginals))

    @property
    def contexts(self) -> tuple[str, ...]:
        return tuple(self.marginals)

    def expectations(self) -> list[Fraction]:
        """<R_q^C> for each context (binary alphabets only)."""
        if not self.alphabet.binary:
            raise ValueError(f"object {self.object!r} is not binary")
        return [dist[0] - dist[1] for dist in self.marginals.values()]


@dataclass(frozen=True)
class System:
    alphabets: Mapping[str, Alphabet] = field(compare=False)
    bunches: tuple[Bunch, ...]

    def __eq__(self, other):
        if not isinstance(other, System):
            return NotImplemented
        return dict(self.alphabets) == dict(other.alphabets) and self.bunches == other.bunches

    @property
    def objects(self) -> tuple[str, ...]:
        return tuple(self.alphabets)

    @property
    def contexts(self) -> tuple[str, ...]:
        return tuple(b.context for b in self.bunches)

    def bunch(self, context: str) -> Bunch:
        for b in self.bunches:
            if b.context == context:
                return b
        raise KeyError(context)

    def contexts_of(self, obj: str) -> tuple[str, ...]:
        if obj not in self.alphabets:
            raise UnknownObject(f"unknown object {obj!r}")
        return tuple(b.context for b in self.bunches if obj in b.members)

    def relabel(self, objects: Mapping[str, str] | None = None,
                contexts: Mapping[str, str] | None = None) -> "System":
        """Rename ids through the given bijections (missing keys keep their name)."""
        om = dict(objects or {})
        cm = dict(contexts or {})
        return build_system(
            [(om.get(q, q), a.symbols) for q, a in self.alphabets.items()],
            [(cm.get(b.context, b.context), [om.get(q, q) for q in b.members]) for b in self.bunches],
            {cm.get(b.context, b.context): dict(b.table) for b in self.bunches},
        )


def _pairs(items) -> list:
    if isinstance(items, Mapping):
        return list(items.items())
    return list(items)


def build_system(objects: Iterable, contexts: Iterable, bunches) -> System:
    """Validate raw inputs and assemble a :class:`System`.

    ``objects`` is a sequence of ``(object_id, alphabet_symbols)`` pairs (or a
    mapping), ``contexts`` a sequence of ``(context_id, members)`` pairs, and
    ``bunches`` maps each context id to its table, given either as a mapping or
    as a sequence of ``(outcome_tuple, probability)`` pairs.  Probabilities may
    be ints, Fractions or strings such as ``"1/3"`` and ``"0.25"``.
    """
    alphabets: dict[str, Alphabet] = {}
    for obj, symbols in _pairs(objects):
        if not isinstance(obj, str) or not obj:
            raise ValidationError(f"object ids must be nonempty strings, got {obj!r}")
        if obj in alphabets:
            raise DuplicateId(f"object {obj!r} declared twice")
        alphabets[obj] = Alphabet(tuple(symbols))

    members_of: dict[str, tuple[str, ...]] = {}
    for ctx, members in _pairs(contexts):
        if not isinstance(ctx, str) or not ctx:
            raise ValidationError(f"context ids must be nonempty strings, got {ctx!r}")
        if ctx in members_of:
            raise DuplicateId(f"context {ctx!r} declared twice")
        members = tuple(members)
        if not members:
            raise EmptyContext(f"context {ctx!r} has no members")
        if len(set(members)) != len(members):
            raise DuplicateId(f"context {ctx!r} lists an object twice")
        for q in members:
            if q not in alphabets:
                raise UnknownObject(f"context {ctx!r} refers to unknown object {q!r}")
        members_of[ctx] = members

    tables = dict(_pairs(bunches))
    extra = set(tables) - set(members_of)
    if extra:
        raise ValidationError(f"distributions given for undeclared contexts {sorted(extra)}")

    built = []
    for ctx in sorted(members_of):
        members = members_of[ctx]
        if ctx not in tables:
            raise ValidationError(f"context {ctx!r} has no distribution")
        table: dict[tuple[str, ...], Fraction] = {}
        for outcome, p in _pairs(tables[ctx]):
            outcome = (outcome,) if isinstance(outcome, str) else tuple(outcome)
            if len(outcome) != len(members):
                raise ValidationError(
                    f"context {ctx!r}: outcome {outcome!r} has arity {len(outcome)}, "
                    f"expected {len(members)}")
            for q, s in zip(members, outcome):
                if s not in alphabets[q].symbols:
                    raise AlphabetMismatch(
                        f"context {ctx!r}: symbol {s!r} is not in the alphabet of {q!r}")
            if outcome in table:
                raise DuplicateId(f"context {ctx!r}: outcome {outcome!r} listed twice")
            try:
                p = as_fraction(p)
            except (TypeError, ValueError) as exc:
                raise ValidationError(f"context {ctx!r}: bad probability {p!r}") from exc
            if p < 0:
                raise ValidationError(f"context {ctx!r}: negative probability {p} for {outcome!r}")
            table[outcome] = p
        total = sum(table.values(), Fraction(0))
        if total != 1:
            raise ProbabilitySumNotOne(ctx, total)
        order = {o: _outcome_key(o, members, alphabets) for o in table}
        clean = {o: table[o] for o in sorted(table, key=order.__getitem__) if table[o] != 0}
        built.append(Bunch(ctx, members, MappingProxyType(clean)))

    used = {q for b in built for q in b.members}
    unused = sorted(set(alphabets) - used)
    if unused:
        raise ValidationError(f"objects {unused} appear in no context")

    return System(MappingProxyType({q: alphabets[q] for q in sorted(alphabets)}), tuple(built))


def _outcome_key(outcome, members, alphabets):
    return tuple(alphabets[q].index(s) for q, s in zip(members, outcome))


def all_outcomes(system: System, bunch: Bunch):
    """Every outcome tuple of a bunch, in alphabet order (zero-probability ones included)."""
    return itertools.product(*(system.alphabets[q].symbols for q in bunch.members))


def connection_of(system: System, obj: str) -> Connection:
    if obj not in system.alphabets:
        raise UnknownObject(f"unknown object {obj!r}")
    alphabet = system.alphabets[obj]
    marginals = {}
    for b in system.bunches:
        if obj in b.members:
            m = b.marginal(obj)
            marginals[b.context] = tuple(m.get(s, Fraction(0)) for s in alphabet.symbols)
    return Connection(obj, alphabet, MappingProxyType(marginals))


def connections(system: System) -> dict[str, Connection]:
    return {q: connection_of(system, q) for q in system.objects}


def total_variation(p: Sequence[Fraction], r: Sequence[Fraction]) -> Fraction:
    return sum((abs(a - b) for a, b in zip(p, r)), Fraction(0)) / 2


@dataclass(frozen=True)
class ConsistencyReport:
    consistent: bool
    per_object_max_discrepancy: Mapping[str, Fraction] = field(compare=False)


def is_consistently_connected(system: System) -> ConsistencyReport:
    """Check that each object has the same distribution in every context.

    The discrepancy of an object is the largest total-variation distance
    between two of its context marginals (0 when it sits in one context).
    """
    worst = {}
    for q in system.objects:
        dists = list(connection_of(system, q).marginals.values())
        worst[q] = max((total_variation(a, b) for a, b in itertools.combinations(dists, 2)),
                       default=Fraction(0))
    return ConsistencyReport(all(v == 0 for v in worst.values()), MappingProxyType(worst))
