"""Named example systems.

The same systems ship as JSON files under ``cbd/data`` for the CLI; the
test suite checks that the two stay identical.
"""
from __future__ import annotations

from fractions import Fraction
from importlib import resources
from typing import Sequence

from .lp import as_fraction
from .model import BINARY_SYMBOLS, System, build_system

TSIRELSON_R = Fraction(665857, 941664)


def pair_table(product, mean_a=0, mean_b=0) -> dict:
    """Joint table of two +-1 variables with the given first and second moments."""
    r, a, b = (as_fraction(v) for v in (product, mean_a, mean_b))
    table = {}
    for x in (1, -1):
        for y in (1, -1):
            p = (1 + x * a + y * b + x * y * r) / 4
            if p < 0:
                raise ValueError(f"moments ({r}, {a}, {b}) are not realizable")
            table[(f"{x:+d}", f"{y:+d}")] = p
    return table


def cyclic_system(products: Sequence, means: Sequence[tuple] | None = None,
                  prefix_object: str = "q", prefix_context: str = "c") -> System:
    """Binary cyclic system of rank len(products).

    Context c_i holds (q_i, q_{i+1}); ``means[i]`` gives the two marginal
    expectations inside c_i, zero by default.
    """
    n = len(products)
    objects = [f"{prefix_object}{i + 1}" for i in range(n)]
    contexts, bunches = [], {}
    for i in range(n):
        name = f"{prefix_context}{i + 1}"
        members = (objects[i], objects[(i + 1) % n])
        a, b = means[i] if means else (0, 0)
        contexts.append((name, members))
        bunches[name] = pair_table(products[i], a, b)
    return build_system([(q, BINARY_SYMBOLS) for q in objects], contexts, bunches)


def pr_box() -> System:
    return cyclic_system([1, 1, 1, -1])


def classical4() -> System:
    return cyclic_system([1, 1, 1, 1])


def anticorrelated_triangle() -> System:
    return cyclic_system([-1, -1, -1])


def tsirelson4() -> System:
    r = TSIRELSON_R
    return cyclic_system([r, r, r, -r])


def opposed_pair() -> System:
    """Rank-2 system: contexts (q1, q2) and (q2, q1), perfectly correlated then anticorrelated."""
    return build_system(
        [("q1", BINARY_SYMBOLS), ("q2", BINARY_SYMBOLS)],
        [("c1", ("q1", "q2")), ("c2", ("q2", "q1"))],
        {"c1": pair_table(1), "c2": pair_table(-1)},
    )


def zero_maxeq() -> System:
    """One object, certainly +1 in context A and certainly -1 in context B."""
    return build_system([("q", BINARY_SYMBOLS)], [("A", ["q"]), ("B", ["q"])],
                        {"A": {("+1",): 1}, "B": {("-1",): 1}})


def single_context() -> System:
    return build_system([("q1", BINARY_SYMBOLS)], [("c1", ["q1"])], {"c1": {("+1",): 1}})


NAMED = {
    "pr_box": pr_box,
    "classical4": classical4,
    "triangle": anticorrelated_triangle,
    "tsirelson4": tsirelson4,
    "opposed_pair": opposed_pair,
    "zero_maxeq": zero_maxeq,
    "single_context": single_context,
}


def data_path(name: str):
    """Path of the bundled JSON file ``<name>.json``."""
    return resources.files("cbd") / "data" / f"{name}.json"
