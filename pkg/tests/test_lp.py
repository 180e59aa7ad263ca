import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from cbd.errors import DimensionMismatch
from cbd.lp import LinearProgram, LpStatus, as_fraction, solve


def _row_reduce(rows):
    """Reduced row echelon form over Fractions; returns (rref, pivot columns)."""
    M = [list(r) for r in rows]
    pivots, r = [], 0
    ncols = len(M[0]) if M else 0
    for c in range(ncols - 1):
        p = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        M[r] = [v / M[r][c] for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    return M, pivots


def _consistent(M):
    return all(any(v != 0 for v in row[:-1]) or row[-1] == 0 for row in M)


def vertex_oracle(c, A, b):
    """Best objective over basic feasible solutions, by enumerating column subsets."""
    c = [as_fraction(v) for v in c]
    A = [[as_fraction(v) for v in row] for row in A]
    b = [as_fraction(v) for v in b]
    n = len(c)
    M, _ = _row_reduce([row + [bi] for row, bi in zip(A, b)])
    rank = len(_row_reduce([row + [0] for row in A])[1])
    if not _consistent(M):
        return None
    best = None
    for cols in itertools.combinations(range(n), rank):
        sub = [[row[j] for j in cols] + [bi] for row, bi in zip(A, b)]
        M, p = _row_reduce(sub)
        if len(p) != rank or not _consistent(M):
            continue
        x = [Fraction(0)] * n
        for i, j in enumerate(cols):
            x[j] = M[i][rank]
        if all(v >= 0 for v in x):
            val = sum(ci * xi for ci, xi in zip(c, x))
            best = val if best is None else max(best, val)
    return best


def check_solution(lp, verdict):
    x = verdict.solution
    assert all(v >= 0 for v in x)
    A = lp.constraint_matrix
    for i in range(lp.constraint_count):
        assert sum(as_fraction(A[i, j]) * x[j] for j in range(lp.variable_count)) == lp.rhs[i]
    assert verdict.value == sum(as_fraction(lp.objective[j]) * x[j] for j in range(lp.variable_count))


def test_objective_equals_constraint():
    v = solve(LinearProgram.create([1, 1], [[1, 1]], [1]))
    assert v.status is LpStatus.OPTIMAL and v.value == 1


def test_vertex_solution():
    v = solve(LinearProgram.create([2, 1], [[1, 1]], [1]))
    assert v.value == 2 and list(v.solution) == [1, 0]


def test_sign_contradiction_infeasible():
    assert solve(LinearProgram.create([1], [[1]], [-1])).status is LpStatus.INFEASIBLE


def test_unbounded():
    assert solve(LinearProgram.create([1, 0], [[1, -1]], [0])).status is LpStatus.UNBOUNDED


def test_no_constraints():
    assert solve(LinearProgram.create([0, -1], [], [])).value == 0
    assert solve(LinearProgram.create([0, 1], [], [])).status is LpStatus.UNBOUNDED


def test_rational_data():
    lp = LinearProgram.create(["1/2", "1/3"], [["1/2", 1], [1, 0]], ["3/4", "1/2"])
    v = solve(lp)
    assert v.value == Fraction(5, 12)
    check_solution(lp, v)


def test_beale_cycling_example_terminates():
    # classic LP on which the textbook largest-coefficient rule cycles
    c = ["3/4", -20, "1/2", -6, 0, 0, 0]
    A = [["1/4", -8, -1, 9, 1, 0, 0],
         ["1/2", -12, "-1/2", 3, 0, 1, 0],
         [0, 0, 1, 0, 0, 0, 1]]
    lp = LinearProgram.create(c, A, [0, 0, 1])
    v = solve(lp)
    assert v.value == Fraction(5, 4)
    check_solution(lp, v)


def test_redundant_rows():
    lp = LinearProgram.create([1, 2, 3], [[1, 1, 1], [2, 2, 2], [1, 0, 0]], [1, 2, "1/4"])
    v = solve(lp)
    assert v.value == Fraction(1, 4) + 3 * Fraction(3, 4)
    check_solution(lp, v)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        LinearProgram.create([1, 2], [[1, 1, 1]], [1])
    with pytest.raises(DimensionMismatch):
        LinearProgram.create([1, 2], [[1, 1]], [1, 2])


def test_floats_refused():
    with pytest.raises(TypeError):
        LinearProgram.create([0.5], [[1]], [1])


def test_huge_coefficients_use_exact_path():
    big = 10**30
    lp = LinearProgram.create([big, 1], [[big, 1]], [big])
    v = solve(lp)
    assert v.value == big * 1
    check_solution(lp, v)


def test_deterministic():
    rng = np.random.default_rng(3)
    A = rng.integers(-3, 4, size=(3, 8))
    A[0] = 1
    lp = LinearProgram.create(rng.integers(-5, 6, 8), A, [1, 0, 0])
    a, b = solve(lp), solve(lp)
    assert a.status == b.status
    if a.optimal:
        assert a.value == b.value and list(a.solution) == list(b.solution)


small_lps = st.integers(2, 7).flatmap(lambda n: st.tuples(
    st.lists(st.integers(-4, 4), min_size=n, max_size=n),
    st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n), min_size=0, max_size=3),
    st.lists(st.integers(-3, 3), min_size=3, max_size=3),
    st.integers(1, 4),
))


@settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(small_lps)
def test_matches_vertex_enumeration_on_probability_polytopes(data):
    c, rows, rhs, den = data
    n = len(c)
    # a sum-to-one row keeps the region bounded
    A = [[1] * n] + rows
    b = [Fraction(1)] + [Fraction(v, den) for v in rhs[:len(rows)]]
    lp = LinearProgram.create(c, A, b)
    v = solve(lp)
    expected = vertex_oracle(c, A, b)
    if expected is None:
        assert v.status is LpStatus.INFEASIBLE
    else:
        assert v.status is LpStatus.OPTIMAL
        assert v.value == expected
        assert min(c) <= v.value <= max(c)
        check_solution(lp, v)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_agrees_with_scipy(seed):
    scipy_opt = pytest.importorskip("scipy.optimize")
    rng = np.random.default_rng(seed)
    m, n = rng.integers(1, 5), rng.integers(2, 10)
    A = rng.integers(0, 4, size=(m, n))
    x0 = rng.integers(0, 3, size=n)
    b = A @ x0  # feasible by construction
    c = rng.integers(-5, 2, size=n)
    v = solve(LinearProgram.create(c, A, b))
    ref = scipy_opt.linprog(-c, A_eq=A, b_eq=b, bounds=[(0, None)] * n, method="highs")
    if ref.status == 3:
        assert v.status is LpStatus.UNBOUNDED
    else:
        assert ref.status == 0 and v.optimal
        assert float(v.value) == pytest.approx(-ref.fun, abs=1e-7)
