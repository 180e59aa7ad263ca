"""Couplings of a whole system and the contextuality measure.

A coupling assigns one random variable to every (context, object) slot and
gives them a single joint distribution whose restriction to each context
reproduces that context's bunch.  The slots are ordered by context id and,
within a context, by the bunch's member order.  A global assignment (one
symbol per slot) is encoded as a mixed-radix integer with the first slot
most significant, i.e. the order of ``itertools.product``.

``max_eq_system`` maximizes the expected number of objects whose slots all
agree; subtracting it from the sum of per-connection maxima gives ``cntx``.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping

import numpy as np

from . import _kernels
from .connection import max_eq_connection
from .errors import ShapeMismatch, TooLarge
from .lp import LinearProgram, LpVerdict, solve
from .model import System, all_outcomes, connection_of

DEFAULT_CAP_BITS = 20


@dataclass(frozen=True)
class SlotLayout:
    slots: tuple[tuple[str, str], ...]  # (context, object)
    radices: tuple[int, ...]

    @property
    def size(self) -> int:
        return math.prod(self.radices)

    @property
    def strides(self) -> tuple[int, ...]:
        out, acc = [], 1
        for r in reversed(self.radices):
            out.append(acc)
            acc *= r
        return tuple(reversed(out))


def slot_layout(system: System) -> SlotLayout:
    slots = tuple((b.context, q) for b in system.bunches for q in b.members)
    return SlotLayout(slots, tuple(len(system.alphabets[q]) for _, q in slots))


def assignment_count(system: System) -> int:
    return slot_layout(system).size


def decode_assignment(system: System, index: int) -> tuple[str, ...]:
    layout = slot_layout(system)
    if not 0 <= index < layout.size:
        raise ShapeMismatch(f"assignment index {index} outside [0, {layout.size})")
    digits = np.unravel_index(index, layout.radices) if layout.radices else ()
    return tuple(system.alphabets[q].symbols[int(d)] for (_, q), d in zip(layout.slots, digits))


def encode_assignment(system: System, symbols) -> int:
    layout = slot_layout(system)
    symbols = tuple(symbols)
    if len(symbols) != len(layout.slots):
        raise ShapeMismatch(f"expected {len(layout.slots)} symbols, got {len(symbols)}")
    idx = 0
    for (_, q), r, s in zip(layout.slots, layout.radices, symbols):
        idx = idx * r + system.alphabets[q].index(s)
    return idx


def _structure(system: System, layout: SlotLayout):
    """Per-assignment LP row of every bunch and the count of agreeing objects."""
    n = layout.size
    radices = np.array(layout.radices, dtype=np.int64)
    strides = np.array(layout.strides, dtype=np.int64)
    bunch_start = [0]
    row_offset = [0]
    for b in system.bunches:
        bunch_start.append(bunch_start[-1] + len(b.members))
        row_offset.append(row_offset[-1] + math.prod(len(system.alphabets[q]) for q in b.members))
    obj_slots, obj_start = [], [0]
    for q in system.objects:
        obj_slots.extend(i for i, (_, o) in enumerate(layout.slots) if o == q)
        obj_start.append(len(obj_slots))
    rows = np.empty((n, len(system.bunches)), dtype=np.int64)
    agree = np.empty(n, dtype=np.int64)
    _kernels.coupling_structure(
        n, radices, strides, np.array(bunch_start, dtype=np.int64),
        np.array(row_offset[:-1], dtype=np.int64), np.array(obj_slots, dtype=np.int64),
        np.array(obj_start, dtype=np.int64), rows, agree)
    return rows, agree, row_offset[-1]


def build_coupling_lp(system: System, cap_bits: int = DEFAULT_CAP_BITS) -> LinearProgram:
    """LP over all couplings: one variable per global assignment.

    Each bunch contributes one equality row per outcome tuple, so the full
    joint table is reproduced.  The objective coefficient of an assignment is
    the number of objects whose slots all agree in it.
    """
    layout = slot_layout(system)
    n = layout.size
    if n > 2**cap_bits:
        raise TooLarge(n, 2**cap_bits)
    rows, agree, m = _structure(system, layout)
    A = np.zeros((m, n), dtype=np.int8)
    cols = np.arange(n)
    for b in range(rows.shape[1]):
        A[rows[:, b], cols] = 1
    rhs = [b.prob(o) for b in system.bunches for o in all_outcomes(system, b)]
    return LinearProgram(agree, A, tuple(rhs))


@dataclass(frozen=True)
class CouplingSolution:
    distribution: Mapping[int, Fraction] = field(compare=False)
    per_connection_eq: Mapping[str, Fraction] = field(compare=False)
    total: Fraction

    def __eq__(self, other):
        if not isinstance(other, CouplingSolution):
            return NotImplemented
        return (dict(self.distribution), dict(self.per_connection_eq), self.total) == (
            dict(other.distribution), dict(other.per_connection_eq), other.total)


def _digits(layout: SlotLayout, indices) -> np.ndarray:
    idx = np.asarray(list(indices), dtype=np.int64)
    strides = np.array(layout.strides, dtype=np.int64)
    radices = np.array(layout.radices, dtype=np.int64)
    return (idx[:, None] // strides) % radices


def connection_eq(system: System, distribution: Mapping[int, Fraction]) -> dict[str, Fraction]:
    """eq(S_q) for every object: probability that all slots of q carry one symbol."""
    layout = slot_layout(system)
    keys = list(distribution)
    digits = _digits(layout, keys)
    out = {}
    for q in system.objects:
        cols = [i for i, (_, o) in enumerate(layout.slots) if o == q]
        same = np.all(digits[:, cols] == digits[:, cols[:1]], axis=1) if keys else []
        out[q] = sum((distribution[k] for k, s in zip(keys, same) if s), Fraction(0))
    return out


def _solution(system: System, distribution: dict[int, Fraction]) -> CouplingSolution:
    eqs = connection_eq(system, distribution)
    return CouplingSolution(MappingProxyType(distribution), MappingProxyType(eqs),
                            sum(eqs.values(), Fraction(0)))


def independent_coupling(system: System) -> CouplingSolution:
    """The coupling in which the bunches are mutually independent."""
    layout = slot_layout(system)
    strides = layout.strides
    per_bunch = []
    pos = 0
    for b in system.bunches:
        entries = []
        for outcome, p in b.table.items():
            off = sum(system.alphabets[q].index(s) * strides[pos + i]
                      for i, (q, s) in enumerate(zip(b.members, outcome)))
            entries.append((off, p))
        per_bunch.append(entries)
        pos += len(b.members)
    dist: dict[int, Fraction] = {}
    for combo in itertools.product(*per_bunch):
        idx = sum(off for off, _ in combo)
        dist[idx] = math.prod((p for _, p in combo), start=Fraction(1))
    return _solution(system, dist)


def solve_coupling_lp(system: System, cap_bits: int = DEFAULT_CAP_BITS) -> LpVerdict:
    verdict = solve(build_coupling_lp(system, cap_bits))
    # the independent coupling is always feasible and the objective is bounded by |Q|
    assert verdict.optimal, f"coupling LP returned {verdict.status}"
    return verdict


def max_eq_system(system: System, cap_bits: int = DEFAULT_CAP_BITS) -> Fraction:
    return solve_coupling_lp(system, cap_bits).value


class Method(enum.Enum):
    LP = "lp"
    CYCLIC = "cyclic"
    BOTH = "both"


@dataclass(frozen=True)
class ContextualityReport:
    maxeq_system: Fraction
    maxeq_connections_sum: Fraction
    cntx: Fraction
    contextual: bool
    description: CouplingSolution | None
    method: Method
    per_connection_maxeq: Mapping[str, Fraction] = field(default_factory=dict, compare=False)


def connection_maxima(system: System) -> dict[str, Fraction]:
    return {q: max_eq_connection(connection_of(system, q)).value for q in system.objects}


def contextuality_measure(system: System, cap_bits: int = DEFAULT_CAP_BITS) -> ContextualityReport:
    maxima = connection_maxima(system)
    total = sum(maxima.values(), Fraction(0))
    verdict = solve_coupling_lp(system, cap_bits)
    cntx = total - verdict.value
    if cntx < 0:
        raise AssertionError(f"coupling LP exceeded the connection bound: {verdict.value} > {total}")
    description = None
    if cntx == 0:
        dist = {int(j): p for j, p in enumerate(verdict.solution) if p}
        description = _solution(system, dist)
    return ContextualityReport(
        maxeq_system=verdict.value,
        maxeq_connections_sum=total,
        cntx=cntx,
        contextual=cntx > 0,
        description=description,
        method=Method.LP,
        per_connection_maxeq=MappingProxyType(maxima),
    )


def verify_description(system: System, coupling) -> bool:
    """True iff ``coupling`` is a coupling of ``system`` that is maximally connected.

    ``coupling`` is a CouplingSolution or a mapping from assignment index to
    probability.  Indices outside the assignment space raise ShapeMismatch.
    """
    dist = coupling.distribution if isinstance(coupling, CouplingSolution) else coupling
    layout = slot_layout(system)
    for k in dist:
        if not isinstance(k, (int, np.integer)) or not 0 <= k < layout.size:
            raise ShapeMismatch(f"assignment index {k!r} outside [0, {layout.size})")
    probs = {int(k): Fraction(v) for k, v in dist.items()}
    if any(p < 0 for p in probs.values()) or sum(probs.values(), Fraction(0)) != 1:
        return False
    keys = [k for k, p in probs.items() if p]
    digits = _digits(layout, keys)
    start = 0
    for b in system.bunches:
        width = len(b.members)
        marginal: dict[tuple[str, ...], Fraction] = {}
        for key, row in zip(keys, digits[:, start:start + width] if keys else []):
            outcome = tuple(system.alphabets[q].symbols[d] for q, d in zip(b.members, row))
            marginal[outcome] = marginal.get(outcome, Fraction(0)) + probs[key]
        if marginal != dict(b.table):
            return False
        start += width
    eqs = connection_eq(system, {k: probs[k] for k in keys})
    return all(eqs[q] == v for q, v in connection_maxima(system).items())
