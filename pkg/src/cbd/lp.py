"""Exact rational linear programming.

Standard form only: maximize ``c @ x`` subject to ``A @ x == b`` and
``x >= 0``.  The solver is a two-phase revised simplex that keeps the basis
inverse as a matrix of :class:`fractions.Fraction` and picks pivots with
Bland's rule, so it terminates on degenerate problems and produces the same
vertex on every run.

Pricing is the only step that touches every column.  Constraint rows are
scaled to integers once, the dual vector is scaled to integers at every
iteration, and the sign of each reduced cost is then an int64 computation
handled by :mod:`cbd._kernels`.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import DimensionMismatch

ZERO = Fraction(0)


def as_fraction(value) -> Fraction:
    """Convert an exact scalar (int, Fraction, numeric string) to Fraction.

    Floats are refused: approximate inputs have to be rationalized by the
    caller, deliberately.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (bool, float, np.floating)):
        raise TypeError(f"refusing inexact value {value!r}; pass a Fraction or a string")
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def _exact_array(values) -> np.ndarray:
    if isinstance(values, np.ndarray) and (values.dtype.kind in "iu" or values.dtype == object):
        return values
    if isinstance(values, np.ndarray) and values.dtype.kind == "f":
        raise TypeError("floating-point arrays are not accepted")
    raw = np.array(values, dtype=object)
    flat = [as_fraction(v) for v in raw.ravel()]
    if all(f.denominator == 1 and abs(f.numerator) < _kernels.INT64_SAFE for f in flat):
        return np.array([f.numerator for f in flat], dtype=np.int64).reshape(raw.shape)
    out = np.empty(len(flat), dtype=object)
    out[:] = flat
    return out.reshape(raw.shape)


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """maximize objective @ x  s.t.  constraint_matrix @ x == rhs,  x >= 0.

    ``objective`` and ``constraint_matrix`` are numpy arrays holding either an
    integer dtype or Python Fractions (dtype=object).  Use :meth:`create` to
    build one from ordinary sequences.
    """

    objective: np.ndarray
    constraint_matrix: np.ndarray
    rhs: tuple[Fraction, ...]

    def __post_init__(self):
        m, n = self.constraint_matrix.shape
        if self.objective.shape != (n,):
            raise DimensionMismatch(
                f"objective has shape {self.objective.shape}, matrix has {n} columns")
        if len(self.rhs) != m:
            raise DimensionMismatch(f"rhs has {len(self.rhs)} entries, matrix has {m} rows")

    @classmethod
    def create(cls, objective, constraint_matrix, rhs) -> "LinearProgram":
        c = _exact_array(objective)
        A = _exact_array(constraint_matrix)
        if A.size == 0:
            A = np.zeros((0 if A.ndim < 2 else A.shape[0], len(c)), dtype=np.int64)
        if c.ndim != 1 or A.ndim != 2:
            raise DimensionMismatch(f"objective must be 1-d and matrix 2-d, got {c.shape}, {A.shape}")
        b = tuple(as_fraction(v) for v in rhs)
        return cls(c, A, b)

    @property
    def variable_count(self) -> int:
        return self.constraint_matrix.shape[1]

    @property
    def constraint_count(self) -> int:
        return self.constraint_matrix.shape[0]


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True, eq=False)
class LpVerdict:
    status: LpStatus
    value: Fraction | None = None
    solution: np.ndarray | None = None  # dtype=object, Fractions
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


def _lcm_denominators(values) -> int:
    d = 1
    for v in values:
        if isinstance(v, Fraction):
            d = math.lcm(d, v.denominator)
    return d


def _integer_rows(A: np.ndarray, b: Sequence[Fraction]):
    """Scale each row of (A | b) to integers; flip rows so that b >= 0."""
    m, n = A.shape
    b_int: list[int] = []
    if A.dtype.kind in "iu":
        scales = [_lcm_denominators([bi]) for bi in b]
        if all(s == 1 for s in scales):
            A_int = A
        else:
            A_int = A.astype(object) * np.array(scales, dtype=object)[:, None]
        b_int = [int(bi * s) for bi, s in zip(b, scales)]
    else:
        rows = []
        for i in range(m):
            row = [as_fraction(v) for v in A[i]]
            s = math.lcm(_lcm_denominators(row), b[i].denominator)
            rows.append([int(v * s) for v in row])
            b_int.append(int(b[i] * s))
        A_int = np.array(rows, dtype=object).reshape(m, n)
    if any(bi < 0 for bi in b_int):
        sign = np.array([-1 if bi < 0 else 1 for bi in b_int], dtype=np.int64)
        A_int = A_int * sign[:, None]
        b_int = [abs(bi) for bi in b_int]
    return _narrow(A_int), b_int


def _narrow(arr: np.ndarray) -> np.ndarray:
    if arr.dtype != object:
        return arr
    if arr.size == 0:
        return arr.astype(np.int64)
    top = max(abs(int(v)) for v in arr.ravel())
    if _kernels.fits_int64(top):
        return arr.astype(np.int64)
    return arr


def _integer_objective(c: np.ndarray):
    if c.dtype.kind in "iu":
        return c.astype(np.int64, copy=False), 1
    fr = [as_fraction(v) for v in c]
    scale = _lcm_denominators(fr)
    return _narrow(np.array([int(v * scale) for v in fr], dtype=object)), scale


class _RevisedSimplex:
    """Revised simplex on integer data with a fraction-free basis inverse.

    The basis inverse is kept as ``adj / det``: an integer matrix ``adj`` and
    the integer ``det`` of the current basis.  Pivoting uses the exact-division
    update of integer-preserving elimination, so no gcd work happens inside
    the loop.  ``xb`` holds ``det * x_B``.

    Column indices 0..n-1 are structural, n..n+m-1 are the artificials of
    phase one (artificial n+i is the unit column of row i).
    """

    def __init__(self, A_int: np.ndarray, b_int: list[int]):
        self.m, self.n = A_int.shape
        self.at = np.ascontiguousarray(A_int.T)
        self.exact_at = self.at.dtype == object
        self.col_abs_max = int(np.abs(self.at).sum(axis=1).max()) if self.at.size else 0
        self.basis = [self.n + i for i in range(self.m)]
        self.adj = [[int(i == k) for k in range(self.m)] for i in range(self.m)]
        self.det = 1
        self.xb = [int(v) for v in b_int]
        self.is_basic = np.zeros(self.n, dtype=bool)
        self.iterations = 0

    # -- linear algebra on the basis inverse --------------------------------

    def column(self, j: int) -> list[int]:
        """det * B^-1 a_j."""
        if j >= self.n:
            k = j - self.n
            return [row[k] for row in self.adj]
        a = self.at[j]
        nz = [(k, int(a[k])) for k in np.flatnonzero(a)]
        return [sum(row[k] * v for k, v in nz) for row in self.adj]

    def pivot(self, r: int, j: int, u: list[int]) -> None:
        ur, det = u[r], self.det
        prow, xr = self.adj[r], self.xb[r]
        for i in range(self.m):
            if i == r:
                continue
            f = u[i]
            if f:
                self.adj[i] = [(ur * a - f * p) // det for a, p in zip(self.adj[i], prow)]
                self.xb[i] = (ur * self.xb[i] - f * xr) // det
            elif ur != det:
                self.adj[i] = [ur * a // det for a in self.adj[i]]
                self.xb[i] = ur * self.xb[i] // det
        self.det = ur
        old = self.basis[r]
        if old < self.n:
            self.is_basic[old] = False
        self.basis[r] = j
        if j < self.n:
            self.is_basic[j] = True
        self.iterations += 1

    def ratio_row(self, u: list[int]) -> int | None:
        # Bland: minimum ratio, ties to the smallest basic variable index
        s = 1 if self.det > 0 else -1
        best = None
        for i, ui in enumerate(u):
            ui *= s
            if ui > 0:
                xi = self.xb[i] * s
                if best is None:
                    best = (xi, ui, i)
                    continue
                lhs, rhs = xi * best[1], best[0] * ui
                if lhs < rhs or (lhs == rhs and self.basis[i] < self.basis[best[2]]):
                    best = (xi, ui, i)
        return None if best is None else best[2]

    def value(self, i: int) -> Fraction:
        return Fraction(self.xb[i], self.det)

    # -- integer pricing ----------------------------------------------------

    @staticmethod
    def _reduced(vec: list[int], d: int) -> tuple[list[int], int]:
        if d < 0:
            vec, d = [-v for v in vec], -d
        g = math.gcd(d, *vec)
        if g > 1:
            vec, d = [v // g for v in vec], d // g
        return vec, d

    def entering(self, cost: np.ndarray, basis_cost: list[int]) -> int:
        y = [0] * self.m
        for ci, row in zip(basis_cost, self.adj):
            if ci:
                y = [yk + ci * rk for yk, rk in zip(y, row)]
        Y, d = self._reduced(y, self.det)
        cmax = int(np.abs(cost).max()) if cost.size else 0
        bound = cmax * d + max((abs(v) for v in Y), default=0) * self.col_abs_max
        if not self.exact_at and cost.dtype != object and _kernels.fits_int64(bound):
            return int(_kernels.first_positive(
                self.at, np.array(Y, dtype=np.int64), cost, np.int64(d), self.is_basic))
        red = cost.astype(object) * d - self.at.astype(object) @ np.array(Y, dtype=object)
        hits = [j for j in range(self.n) if red[j] > 0 and not self.is_basic[j]]
        return hits[0] if hits else -1

    def nonzero_in_row(self, r: int) -> int:
        W, _ = self._reduced(self.adj[r], 1)
        bound = max((abs(v) for v in W), default=0) * self.col_abs_max
        if not self.exact_at and _kernels.fits_int64(bound):
            return int(_kernels.first_nonzero(self.at, np.array(W, dtype=np.int64), self.is_basic))
        prod = self.at.astype(object) @ np.array(W, dtype=object)
        hits = [j for j in range(self.n) if prod[j] != 0 and not self.is_basic[j]]
        return hits[0] if hits else -1

    # -- phases ---------------------------------------------------------------

    def run(self, cost: np.ndarray, basis_cost) -> bool:
        """Iterate to optimality; False means unbounded."""
        while True:
            j = self.entering(cost, [basis_cost(v) for v in self.basis])
            if j < 0:
                return True
            u = self.column(j)
            r = self.ratio_row(u)
            if r is None:
                return False
            self.pivot(r, j, u)

    def drive_out_artificials(self) -> None:
        for r in range(self.m):
            if self.basis[r] >= self.n:
                j = self.nonzero_in_row(r)
                if j >= 0:
                    self.pivot(r, j, self.column(j))
                # otherwise row r is redundant; the artificial stays basic at zero


def solve(lp: LinearProgram) -> LpVerdict:
    """Solve ``lp`` exactly.  Raises DimensionMismatch on malformed input."""
    A = lp.constraint_matrix
    m, n = A.shape
    if lp.objective.shape != (n,) or len(lp.rhs) != m:
        raise DimensionMismatch("objective/rhs do not match the constraint matrix")
    A_int, b_int = _integer_rows(A, lp.rhs)
    C, _ = _integer_objective(lp.objective)

    simplex = _RevisedSimplex(A_int, b_int)
    zero_cost = np.zeros(n, dtype=np.int64)
    simplex.run(zero_cost, lambda v: -1 if v >= n else 0)
    infeasibility = sum((simplex.value(i) for i, v in enumerate(simplex.basis) if v >= n), ZERO)
    if infeasibility > 0:
        return LpVerdict(LpStatus.INFEASIBLE, iterations=simplex.iterations)
    simplex.drive_out_artificials()

    def basis_cost(v):
        return 0 if v >= n else int(C[v])

    if not simplex.run(C, basis_cost):
        return LpVerdict(LpStatus.UNBOUNDED, iterations=simplex.iterations)

    x = np.full(n, ZERO, dtype=object)
    value = ZERO
    for i, v in enumerate(simplex.basis):
        if v < n:
            x[v] = simplex.value(i)
            value += as_fraction(lp.objective[v]) * x[v]
    return LpVerdict(LpStatus.OPTIMAL, value=value, solution=x, iterations=simplex.iterations)
