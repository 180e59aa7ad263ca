"""The numba and numpy versions of every kernel must agree exactly."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cbd import _kernels

BACKENDS = _kernels.backends()
needs_numba = pytest.mark.skipif(not _kernels.USING_NUMBA, reason="numba disabled or missing")


def impls(name):
    return [f for f in (BACKENDS[name]["numpy"], BACKENDS[name]["numba"]) if f is not None]


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_first_positive_agrees(seed):
    rng = np.random.default_rng(seed)
    n, m = rng.integers(1, 40), rng.integers(1, 6)
    at = rng.integers(-2, 3, size=(n, m)).astype(np.int64)
    y = rng.integers(-50, 50, size=m).astype(np.int64)
    c = rng.integers(-3, 4, size=n).astype(np.int64)
    d = np.int64(rng.integers(1, 20))
    blocked = rng.random(n) < 0.3
    red = c * d - at @ y
    expected = next((j for j in range(n) if red[j] > 0 and not blocked[j]), -1)
    for f in impls("first_positive"):
        assert f(at, y, c, d, blocked) == expected


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_first_nonzero_agrees(seed):
    rng = np.random.default_rng(seed)
    n, m = rng.integers(1, 40), rng.integers(1, 6)
    at = rng.integers(0, 2, size=(n, m)).astype(np.int8)
    w = rng.integers(-2, 3, size=m).astype(np.int64)
    blocked = rng.random(n) < 0.3
    prod = at.astype(np.int64) @ w
    expected = next((j for j in range(n) if prod[j] != 0 and not blocked[j]), -1)
    for f in impls("first_nonzero"):
        assert f(at, w, blocked) == expected


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-10**6, 10**6), min_size=1, max_size=10))
def test_max_odd_signs_agrees(xs):
    x = np.array(xs, dtype=np.int64)
    expected = max(sum(-v if (mask >> i) & 1 else v for i, v in enumerate(xs))
                   for mask in range(1 << len(xs)) if bin(mask).count("1") % 2)
    for f in impls("max_odd_signs"):
        assert f(x) == expected


def test_max_odd_signs_numpy_chunks():
    x = np.arange(1, 15, dtype=np.int64)
    assert _kernels._max_odd_signs_numpy(x, chunk_bits=3) == _kernels._max_odd_signs_numpy(x)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(2, 3), min_size=1, max_size=6), st.integers(0, 2**32 - 1))
def test_coupling_structure_agrees(radix_list, seed):
    rng = np.random.default_rng(seed)
    radices = np.array(radix_list, dtype=np.int64)
    s = len(radix_list)
    strides = np.array([int(np.prod(radices[i + 1:])) for i in range(s)], dtype=np.int64)
    n = int(np.prod(radices))
    cuts = sorted(set(rng.integers(1, s, size=rng.integers(0, s)).tolist())) if s > 1 else []
    bunch_start = np.array([0] + cuts + [s], dtype=np.int64)
    sizes = [int(np.prod(radices[a:b])) for a, b in zip(bunch_start[:-1], bunch_start[1:])]
    row_offset = np.cumsum([0] + sizes[:-1]).astype(np.int64)
    groups = np.array_split(rng.permutation(s), rng.integers(1, s + 1))
    obj_slots = np.concatenate(groups).astype(np.int64)
    obj_start = np.cumsum([0] + [len(g) for g in groups]).astype(np.int64)
    results = []
    for f in impls("coupling_structure"):
        rows = np.empty((n, len(sizes)), dtype=np.int64)
        agree = np.empty(n, dtype=np.int64)
        f(n, radices, strides, bunch_start, row_offset, obj_slots, obj_start, rows, agree)
        results.append((rows, agree))
    digits = np.array(np.unravel_index(np.arange(n), radix_list)).T
    ref_agree = sum(np.all(digits[:, g] == digits[:, g[:1]], axis=1).astype(int) for g in groups)
    for rows, agree in results:
        np.testing.assert_array_equal(agree, ref_agree)
        for b, (lo, hi) in enumerate(zip(bunch_start[:-1], bunch_start[1:])):
            local = np.ravel_multi_index(tuple(digits[:, lo:hi].T), radix_list[lo:hi])
            np.testing.assert_array_equal(rows[:, b], row_offset[b] + local)


@needs_numba
def test_dispatch_by_size():
    small = np.zeros((4, 4), dtype=np.int64)
    assert _kernels._pick("first_positive", small.size) is _kernels._first_positive_numpy
    big = _kernels._pick("first_positive", _kernels.JIT_MIN_WORK)
    assert big is (BACKENDS["first_positive"]["numba"] or _kernels._first_positive_numpy)


def test_disable_flag_selects_numpy(monkeypatch):
    import importlib
    monkeypatch.setenv("CBD_DISABLE_NUMBA", "1")
    mod = importlib.reload(_kernels)
    try:
        assert not mod.USING_NUMBA
        assert mod._pick("first_positive", 1 << 40) is mod._first_positive_numpy
        assert mod.backends()["max_odd_signs"]["numba"] is None
    finally:
        monkeypatch.delenv("CBD_DISABLE_NUMBA")
        importlib.reload(_kernels)
