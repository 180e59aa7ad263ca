import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cbd.connection import max_eq_binary, max_eq_connection, max_eq_oracle
from cbd.errors import OracleTooLarge
from cbd.model import Alphabet, Connection

from conftest import distributions

F = Fraction


def conn(*dists, symbols=None):
    symbols = symbols or (("+1", "-1") if len(dists[0]) == 2 else tuple("abcd"[:len(dists[0])]))
    return Connection("q", Alphabet(symbols), {f"c{i}": tuple(F(v) for v in d) for i, d in enumerate(dists)})


def two_binary_coupling_max(p, r, steps=100):
    """Sweep P(+,+) over its feasible range on a grid; both endpoints are on the grid here."""
    lo, hi = max(F(0), p + r - 1), min(p, r)
    best = None
    for k in range(steps + 1):
        t = lo + (hi - lo) * F(k, steps)
        eq = t + (1 - p - r + t)
        best = eq if best is None else max(best, eq)
    return best


def test_binary_example():
    p, r = F(3, 5), F(9, 10)
    assert two_binary_coupling_max(p, r) == F(7, 10)
    c = conn((p, 1 - p), (r, 1 - r))
    result = max_eq_connection(c)
    assert result.value == F(7, 10)
    assert dict(result.witness_submeasure) == {"+1": F(3, 5), "-1": F(1, 10)}
    assert max_eq_oracle(c) == F(7, 10)
    assert max_eq_binary([F(1, 5), F(4, 5)]) == F(7, 10)


def test_zero_maxeq():
    c = conn((1, 0), (0, 1))
    assert max_eq_connection(c).value == 0
    assert max_eq_oracle(c) == 0
    assert max_eq_binary([1, -1]) == 0


def test_ternary_example():
    c = conn((F(1, 2), F(3, 10), F(1, 5)), (F(1, 5), F(3, 10), F(1, 2)))
    assert max_eq_connection(c).value == F(7, 10)
    assert max_eq_oracle(c) == F(7, 10)


def test_ternary_example_against_scipy():
    opt = pytest.importorskip("scipy.optimize")
    a = [0.5, 0.3, 0.2]
    b = [0.2, 0.3, 0.5]
    cells = list(itertools.product(range(3), repeat=2))
    A = [[1.0 if cell[0] == x else 0.0 for cell in cells] for x in range(3)] + \
        [[1.0 if cell[1] == x else 0.0 for cell in cells] for x in range(3)]
    res = opt.linprog([-1.0 if i == j else 0.0 for i, j in cells], A_eq=A, b_eq=a + b,
                      bounds=[(0, None)] * 9, method="highs")
    assert -res.fun == pytest.approx(0.7, abs=1e-9)


def test_consistent_connection_is_one():
    c = conn((F(1, 3), F(2, 3)), (F(1, 3), F(2, 3)), (F(1, 3), F(2, 3)))
    assert max_eq_connection(c).value == 1
    assert max_eq_binary([F(-1, 3)] * 3) == 1


def test_singleton_connection():
    c = conn((F(1, 4), F(3, 4)))
    assert max_eq_connection(c).value == 1
    assert max_eq_oracle(c) == 1


def test_uniform_in_three_contexts():
    assert max_eq_oracle(conn(*[(F(1, 2), F(1, 2))] * 3)) == 1


def test_oracle_bounds():
    with pytest.raises(OracleTooLarge):
        max_eq_oracle(conn(*[(F(1, 2), F(1, 2))] * 7))
    with pytest.raises(OracleTooLarge):
        max_eq_oracle(conn((F(1, 5),) * 5, (F(1, 5),) * 5, symbols=tuple("abcde")))


def test_binary_rejects_bad_input():
    with pytest.raises(ValueError):
        max_eq_binary([])
    with pytest.raises(ValueError):
        max_eq_binary([F(3, 2)])


connections = st.integers(2, 4).flatmap(
    lambda a: st.lists(distributions(a), min_size=1, max_size=4))


@settings(max_examples=150, deadline=None)
@given(connections)
def test_closed_form_matches_oracle(dists):
    c = conn(*dists)
    result = max_eq_connection(c)
    assert result.value == max_eq_oracle(c)
    assert result.value == sum(result.witness_submeasure.values())
    assert 0 <= result.value <= 1
    for d in dists:
        assert all(m <= p for m, p in zip(result.witness_submeasure.values(), d))
    consistent = all(d == dists[0] for d in dists)
    assert (result.value == 1) == consistent
    if len(dists[0]) == 2:
        assert max_eq_binary(c.expectations()) == result.value


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 4).flatmap(lambda a: st.tuples(
    st.lists(distributions(a), min_size=1, max_size=4), distributions(a))))
def test_adding_a_context_never_increases(data):
    dists, extra = data
    assert max_eq_connection(conn(*dists, extra)).value <= max_eq_connection(conn(*dists)).value
