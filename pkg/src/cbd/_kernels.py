"""Integer hot loops, compiled with numba when available.

Every kernel exists twice: a plain-loop version that numba compiles and a
vectorized numpy version.  Both operate on exact int64 data, so they must
return identical results.  Set ``CBD_DISABLE_NUMBA=1`` to force the numpy
path (useful for debugging and for the benchmark in ``benchmarks/``).

numba is imported and each kernel compiled on first use, and only for
inputs of at least ``JIT_MIN_WORK`` elements.  Smaller inputs run the numpy
version, which beats paying import and compile time.

Callers are responsible for checking that int64 accumulators cannot
overflow; see ``fits_int64``.
"""
from __future__ import annotations

import importlib.util
import os

import numpy as np

INT64_SAFE = 2**62
JIT_MIN_WORK = 1 << 16

_disabled = os.environ.get("CBD_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")
USING_NUMBA = not _disabled and importlib.util.find_spec("numba") is not None


def fits_int64(bound: int) -> bool:
    return bound < INT64_SAFE


# -- simplex pricing -------------------------------------------------------

def _first_positive_loop(at, y, c, d, blocked):
    # smallest j with c[j]*d - at[j] . y > 0, skipping blocked columns
    n, m = at.shape
    for j in range(n):
        if blocked[j]:
            continue
        acc = c[j] * d
        for i in range(m):
            v = at[j, i]
            if v != 0:
                acc -= v * y[i]
        if acc > 0:
            return j
    return -1


def _first_positive_numpy(at, y, c, d, blocked):
    red = c * d - at @ y
    hits = np.flatnonzero((red > 0) & ~blocked)
    return int(hits[0]) if hits.size else -1


def _first_nonzero_loop(at, w, blocked):
    n, m = at.shape
    for j in range(n):
        if blocked[j]:
            continue
        acc = 0
        for i in range(m):
            v = at[j, i]
            if v != 0:
                acc += v * w[i]
        if acc != 0:
            return j
    return -1


def _first_nonzero_numpy(at, w, blocked):
    hits = np.flatnonzero(((at @ w) != 0) & ~blocked)
    return int(hits[0]) if hits.size else -1


# -- coupling polytope structure ------------------------------------------

def _coupling_structure_loop(n_assign, radices, strides, bunch_start, row_offset,
                             obj_slots, obj_start, rows_out, agree_out):
    n_slots = radices.shape[0]
    n_bunch = bunch_start.shape[0] - 1
    n_obj = obj_start.shape[0] - 1
    digits = np.empty(n_slots, np.int64)
    for j in range(n_assign):
        for s in range(n_slots):
            digits[s] = (j // strides[s]) % radices[s]
        for b in range(n_bunch):
            local = 0
            for s in range(bunch_start[b], bunch_start[b + 1]):
                local = local * radices[s] + digits[s]
            rows_out[j, b] = row_offset[b] + local
        count = 0
        for q in range(n_obj):
            first = digits[obj_slots[obj_start[q]]]
            same = True
            for t in range(obj_start[q] + 1, obj_start[q + 1]):
                if digits[obj_slots[t]] != first:
                    same = False
                    break
            if same:
                count += 1
        agree_out[j] = count


def _coupling_structure_numpy(n_assign, radices, strides, bunch_start, row_offset,
                              obj_slots, obj_start, rows_out, agree_out):
    idx = np.arange(n_assign, dtype=np.int64)
    digits = [(idx // strides[s]) % radices[s] for s in range(radices.shape[0])]
    for b in range(bunch_start.shape[0] - 1):
        local = np.zeros(n_assign, dtype=np.int64)
        for s in range(bunch_start[b], bunch_start[b + 1]):
            local = local * radices[s] + digits[s]
        rows_out[:, b] = row_offset[b] + local
    agree_out[:] = 0
    for q in range(obj_start.shape[0] - 1):
        members = obj_slots[obj_start[q]:obj_start[q + 1]]
        same = np.ones(n_assign, dtype=bool)
        for s in members[1:]:
            same &= digits[s] == digits[members[0]]
        agree_out += same


# -- odd-parity sign enumeration ------------------------------------------

def _max_odd_signs_loop(x):
    # max over masks with odd popcount of sum(x) - 2 * sum(x[mask])
    k = x.shape[0]
    total = 0
    for i in range(k):
        total += x[i]
    best = 0
    found = False
    for mask in range(1, 1 << k):
        parity = 0
        neg = 0
        for i in range(k):
            if (mask >> i) & 1:
                parity ^= 1
                neg += x[i]
        if parity == 1:
            val = total - 2 * neg
            if not found or val > best:
                best = val
                found = True
    return best


def _max_odd_signs_numpy(x, chunk_bits=16):
    k = x.shape[0]
    total = int(x.sum())
    bits = np.arange(k, dtype=np.int64)
    best = None
    size = 1 << k
    step = 1 << min(chunk_bits, k)
    for lo in range(0, size, step):
        masks = np.arange(lo, min(lo + step, size), dtype=np.int64)
        sel = (masks[:, None] >> bits) & 1
        odd = (sel.sum(axis=1) & 1) == 1
        if not odd.any():
            continue
        vals = total - 2 * (sel[odd] @ x)
        top = int(vals.max())
        if best is None or top > best:
            best = top
    return best


_compiled: dict = {}


def _jit(name: str):
    """Compiled version of kernel ``name``, or None without numba."""
    if not USING_NUMBA:
        return None
    if name not in _compiled:
        from numba import njit
        _compiled[name] = njit(cache=True)(globals()[f"_{name}_loop"])
    return _compiled[name]


def _pick(name: str, work: int):
    if work >= JIT_MIN_WORK:
        fast = _jit(name)
        if fast is not None:
            return fast
    return globals()[f"_{name}_numpy"]


def first_positive(at, y, c, d, blocked):
    return _pick("first_positive", at.size)(at, y, c, d, blocked)


def first_nonzero(at, w, blocked):
    return _pick("first_nonzero", at.size)(at, w, blocked)


def coupling_structure(n_assign, radices, strides, bunch_start, row_offset,
                       obj_slots, obj_start, rows_out, agree_out):
    return _pick("coupling_structure", n_assign * radices.shape[0])(
        n_assign, radices, strides, bunch_start, row_offset, obj_slots, obj_start,
        rows_out, agree_out)


def max_odd_signs(x):
    return _pick("max_odd_signs", x.shape[0] << x.shape[0])(x)


_NAMES = ("first_positive", "first_nonzero", "coupling_structure", "max_odd_signs")


def backends():
    """Map kernel name -> {"numpy": f, "numba": f or None}; used by tests and benchmarks."""
    return {name: {"numpy": globals()[f"_{name}_numpy"], "numba": _jit(name)} for name in _NAMES}
