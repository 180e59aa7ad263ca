"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat N]

Compile time for each numba kernel is reported separately from the steady
state timings.  Results from both backends are compared for equality.
"""
from __future__ import annotations

import argparse
import time
import timeit

import numpy as np

from cbd import _kernels


def coupling_case(bits: int = 20):
    # binary cyclic layout of rank bits // 2: 2 slots per context
    n_ctx = bits // 2
    radices = np.full(2 * n_ctx, 2, dtype=np.int64)
    strides = np.array([1 << (2 * n_ctx - 1 - s) for s in range(2 * n_ctx)], dtype=np.int64)
    bunch_start = np.arange(0, 2 * n_ctx + 1, 2, dtype=np.int64)
    row_offset = np.arange(0, 4 * n_ctx, 4, dtype=np.int64)
    obj_slots = np.array([s for q in range(n_ctx) for s in (2 * q, (2 * q - 1) % (2 * n_ctx))],
                         dtype=np.int64)
    obj_start = np.arange(0, 2 * n_ctx + 1, 2, dtype=np.int64)
    n = 1 << (2 * n_ctx)

    def call(f):
        rows = np.empty((n, n_ctx), dtype=np.int64)
        agree = np.empty(n, dtype=np.int64)
        f(n, radices, strides, bunch_start, row_offset, obj_slots, obj_start, rows, agree)
        return rows, agree

    return f"coupling_structure 2^{2 * n_ctx} assignments", call


def pricing_case(n: int = 1 << 16, m: int = 40, seed: int = 0):
    rng = np.random.default_rng(seed)
    at = (rng.random((n, m)) < 0.25).astype(np.int64)
    y = rng.integers(-50, 50, m)
    c = np.ones(n, dtype=np.int64)
    blocked = np.zeros(n, dtype=bool)
    d = int(abs(y).sum()) * 3 + 1  # no column prices out: full scan
    return f"first_positive {n}x{m} full scan", lambda f: f(at, y, c, -d, blocked)


def nonzero_case(n: int = 1 << 16, m: int = 40, seed: int = 1):
    rng = np.random.default_rng(seed)
    at = (rng.random((n, m)) < 0.25).astype(np.int64)
    w = np.zeros(m, dtype=np.int64)
    return f"first_nonzero {n}x{m} full scan", lambda f: f(at, w, np.zeros(n, dtype=bool))


def s_odd_case(k: int = 20, seed: int = 2):
    x = np.random.default_rng(seed).integers(-1000, 1000, k)
    return f"max_odd_signs k={k}", lambda f: f(x)


CASES = {
    "coupling_structure": coupling_case,
    "first_positive": pricing_case,
    "first_nonzero": nonzero_case,
    "max_odd_signs": s_odd_case,
}


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(np.array_equal(x, y) for x, y in zip(a, b))
    return a == b


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    backends = _kernels.backends()
    print(f"numba available: {_kernels.USING_NUMBA}")
    print(f"{'case':42} {'numpy s':>10} {'numba s':>10} {'speedup':>8} {'compile s':>10}")
    for name, make in CASES.items():
        label, call = make()
        np_f, nb_f = backends[name]["numpy"], backends[name]["numba"]
        t_np = min(timeit.repeat(lambda: call(np_f), number=1, repeat=args.repeat))
        if nb_f is None:
            print(f"{label:42} {t_np:10.4f} {'-':>10} {'-':>8} {'-':>10}")
            continue
        start = time.perf_counter()
        first = call(nb_f)
        compile_s = time.perf_counter() - start
        t_nb = min(timeit.repeat(lambda: call(nb_f), number=1, repeat=args.repeat))
        if not _same(first, call(np_f)):
            print(f"{label}: backends disagree")
            return 1
        print(f"{label:42} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f} {compile_s:10.3f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
