import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from cbd import fixtures
from cbd.model import BINARY_SYMBOLS, build_system

BIN_OUTCOMES = [("+1", "+1"), ("+1", "-1"), ("-1", "+1"), ("-1", "-1")]


def random_distribution(rng: random.Random, size: int, max_weight: int = 12) -> list[Fraction]:
    w = [rng.randint(0, max_weight) for _ in range(size)]
    if not any(w):
        w[rng.randrange(size)] = 1
    total = sum(w)
    return [Fraction(x, total) for x in w]


def random_cyclic_system(rng: random.Random, n: int):
    """Binary cyclic system of rank n with random rational bunch tables.

    Half of the draws perturb a PR-box-like pattern so that contextual cases
    are well represented; the rest are unconstrained tables.
    """
    objects = [f"q{i + 1}" for i in range(n)]
    contexts, bunches = [], {}
    odd = rng.randrange(n)
    boxy = rng.random() < 0.5
    for i in range(n):
        members = (objects[i], objects[(i + 1) % n]) if n > 2 or i == 0 else (objects[1], objects[0])
        name = f"c{i + 1}"
        if boxy:
            eps = random_distribution(rng, 4, 3)
            anti = i == odd
            base = [Fraction(0), Fraction(1, 2), Fraction(1, 2), Fraction(0)] if anti else \
                [Fraction(1, 2), Fraction(0), Fraction(0), Fraction(1, 2)]
            mix = Fraction(rng.randint(0, 6), 10)
            table = [(1 - mix) * b + mix * e for b, e in zip(base, eps)]
        else:
            table = random_distribution(rng, 4)
        contexts.append((name, members))
        bunches[name] = dict(zip(BIN_OUTCOMES, table))
    return build_system([(q, BINARY_SYMBOLS) for q in objects], contexts, bunches)


@st.composite
def rationals(draw, lo=-1, hi=1, max_den=12):
    den = draw(st.integers(1, max_den))
    num = draw(st.integers(lo * den, hi * den))
    return Fraction(num, den)


@st.composite
def distributions(draw, size, max_weight=9):
    w = draw(st.lists(st.integers(0, max_weight), min_size=size, max_size=size))
    if not any(w):
        w[draw(st.integers(0, size - 1))] = 1
    return tuple(Fraction(x, sum(w)) for x in w)


@pytest.fixture
def pr_box():
    return fixtures.pr_box()


@pytest.fixture
def classical4():
    return fixtures.classical4()


# -- acceptance reporting ---------------------------------------------------

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def criterion(request):
    """Record one pass/fail line for an acceptance criterion.

    Use as ``criterion(n, detail)`` at the start of the test; the verdict is
    filled in from the test outcome once it finishes.
    """
    state = {}

    def declare(number: int, title: str):
        state.update(number=number, title=title, notes=[])
        return state["notes"]

    yield declare
    if not state:
        return
    report = getattr(request.node, "rep_call", None)
    ok = report is not None and report.passed
    notes = "; ".join(state["notes"])
    line = f"criterion {state['number']:>2}: {'PASS' if ok else 'FAIL'}  {state['title']}"
    ACCEPTANCE_LINES[state["number"]] = line + (f"  [{notes}]" if notes else "")
    print(ACCEPTANCE_LINES[state["number"]])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
