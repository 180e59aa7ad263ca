"""Cyclic systems of binary measurements and their closed-form measure.

A cyclic system of rank n has objects q_1..q_n and contexts
C_i = (q_i, q_{i+1}) with indices taken mod n; every object sits in exactly
two neighbouring contexts.  Rank 2 is allowed: its two contexts contain the
same pair of objects and are told apart only by their labels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import EmptyInput, OracleTooLarge, ValidationError
from .lp import as_fraction
from .model import System

S_ODD_ORACLE_MAX = 24


@dataclass(frozen=True)
class CyclicStructure:
    """Cycle order and the expectations the closed form needs.

    ``marginal_expectations[i]`` is the pair (<R_i in C_i>, <R_i in C_{i-1}>).
    """

    rank: int
    object_order: tuple[str, ...]
    context_order: tuple[str, ...]
    product_expectations: tuple[Fraction, ...]
    marginal_expectations: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        n = self.rank
        if n < 2:
            raise ValidationError("cyclic rank must be at least 2")
        if not (len(self.object_order) == len(self.context_order) == len(self.product_expectations)
                == len(self.marginal_expectations) == n):
            raise ValidationError("cyclic structure fields disagree on the rank")
        values = list(self.product_expectations) + [v for pair in self.marginal_expectations for v in pair]
        if any(abs(v) > 1 for v in values):
            raise ValidationError("expectations of +-1 variables lie in [-1, 1]")

    @property
    def marginal_discrepancy(self) -> Fraction:
        return sum((abs(a - b) for a, b in self.marginal_expectations), Fraction(0))


@dataclass(frozen=True)
class NotCyclic:
    reason: str

    def __bool__(self) -> bool:
        return False


def detect_cyclic(system: System) -> CyclicStructure | NotCyclic:
    """Recognize a cyclic system and orient it canonically.

    The cycle starts at the smallest object id and first steps to the smaller
    of its two neighbours.  For rank 2 both neighbours coincide and the
    context with the smaller id becomes C_1.
    """
    for q, alphabet in system.alphabets.items():
        if not alphabet.binary:
            return NotCyclic(f"object {q!r} does not have the binary alphabet ('+1', '-1')")
    for b in system.bunches:
        if len(b.members) != 2:
            return NotCyclic(f"context {b.context!r} has {len(b.members)} objects, not 2")
    by_object = {q: [b for b in system.bunches if q in b.members] for q in system.objects}
    for q, bs in by_object.items():
        if len(bs) != 2:
            return NotCyclic(f"object {q!r} is in {len(bs)} contexts, not 2")

    def other(bunch, q):
        return bunch.members[1] if bunch.members[0] == q else bunch.members[0]

    start = system.objects[0]
    first = min(by_object[start], key=lambda b: (other(b, start), b.context))
    objects, contexts = [start], [first]
    q, b = start, first
    while True:
        q = other(b, q)
        if q == start:
            break
        b = next(c for c in by_object[q] if c is not b)
        objects.append(q)
        contexts.append(b)
    if len(contexts) != len(system.bunches):
        return NotCyclic("contexts do not form a single cycle")

    n = len(objects)
    products = tuple(c.expectation(c.members) for c in contexts)
    marginals = tuple(
        (contexts[i].expectation([objects[i]]), contexts[i - 1].expectation([objects[i]]))
        for i in range(n))
    return CyclicStructure(n, tuple(objects), tuple(c.context for c in contexts), products, marginals)


def s_odd(xs: Sequence) -> Fraction:
    """Max of +-x_1 +- ... +- x_k over sign choices with an odd number of minuses."""
    vals = [as_fraction(x) for x in xs]
    if not vals:
        raise EmptyInput("s_odd needs at least one value")
    total = sum((abs(v) for v in vals), Fraction(0))
    if sum(1 for v in vals if v < 0) % 2 == 1:
        return total
    return total - 2 * min(abs(v) for v in vals)


def s_odd_oracle(xs: Sequence) -> Fraction:
    """s_odd by enumerating every odd-parity sign vector."""
    vals = [as_fraction(x) for x in xs]
    if not vals:
        raise EmptyInput("s_odd needs at least one value")
    if len(vals) > S_ODD_ORACLE_MAX:
        raise OracleTooLarge(f"enumeration limited to {S_ODD_ORACLE_MAX} values, got {len(vals)}")
    d = math.lcm(*(v.denominator for v in vals))
    ints = [int(v * d) for v in vals]
    if _kernels.fits_int64(sum(abs(v) for v in ints) * 3):
        best = int(_kernels.max_odd_signs(np.array(ints, dtype=np.int64)))
    else:
        best = max(sum(-x if (mask >> i) & 1 else x for i, x in enumerate(ints))
                   for mask in range(1 << len(ints)) if bin(mask).count("1") % 2)
    return Fraction(best, d)


def cyclic_measure(structure: CyclicStructure) -> Fraction:
    excess = s_odd(structure.product_expectations) - structure.marginal_discrepancy - (structure.rank - 2)
    return max(excess, Fraction(0)) / 2


def cyclic_criterion(structure: CyclicStructure) -> bool:
    return s_odd(structure.product_expectations) > (structure.rank - 2) + structure.marginal_discrepancy
