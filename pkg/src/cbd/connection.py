"""Maximal agreement probability within a single connection.

For a connection with finite alphabet, the largest probability with which
all of its measurements can coincide in some coupling is the total mass of
the pointwise minimum of the context marginals.  ``max_eq_oracle`` gets the
same number the slow way, by linear programming over every joint
distribution of the connection.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from .errors import OracleTooLarge
from .lp import LinearProgram, as_fraction, solve
from .model import Connection

ORACLE_MAX_CONTEXTS = 6
ORACLE_MAX_SYMBOLS = 4


@dataclass(frozen=True)
class ConnectionMaxEq:
    object: str
    value: Fraction
    witness_submeasure: Mapping[str, Fraction] = field(compare=False)


def max_eq_connection(connection: Connection) -> ConnectionMaxEq:
    dists = list(connection.marginals.values())
    symbols = connection.alphabet.symbols
    if len(dists) == 1:
        # one measurement agrees with itself with certainty
        mu = dict(zip(symbols, dists[0]))
        return ConnectionMaxEq(connection.object, Fraction(1), MappingProxyType(mu))
    mu = {s: min(d[i] for d in dists) for i, s in enumerate(symbols)}
    return ConnectionMaxEq(connection.object, sum(mu.values(), Fraction(0)), MappingProxyType(mu))


def max_eq_binary(expectations: Sequence) -> Fraction:
    """maxeq of a +-1 connection from its expected values alone."""
    ex = [as_fraction(e) for e in expectations]
    if not ex:
        raise ValueError("need at least one expectation")
    if any(abs(e) > 1 for e in ex):
        raise ValueError("expectations of +-1 variables lie in [-1, 1]")
    return 1 - (max(ex) - min(ex)) / 2


def max_eq_oracle(connection: Connection) -> Fraction:
    """maxeq by LP over the full joint distribution of the connection."""
    dists = list(connection.marginals.values())
    k, a = len(dists), len(connection.alphabet)
    if k > ORACLE_MAX_CONTEXTS or a > ORACLE_MAX_SYMBOLS:
        raise OracleTooLarge(
            f"oracle handles <= {ORACLE_MAX_CONTEXTS} contexts and <= {ORACLE_MAX_SYMBOLS} "
            f"symbols, got {k} and {a}")
    if k == 1:
        return Fraction(1)
    cells = list(itertools.product(range(a), repeat=k))
    A = np.zeros((k * a, len(cells)), dtype=np.int64)
    for j, cell in enumerate(cells):
        for c, x in enumerate(cell):
            A[c * a + x, j] = 1
    rhs = [d[x] for d in dists for x in range(a)]
    objective = np.array([int(len(set(cell)) == 1) for cell in cells], dtype=np.int64)
    verdict = solve(LinearProgram.create(objective, A, rhs))
    assert verdict.optimal, verdict.status
    return verdict.value
