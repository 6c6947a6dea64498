"""Hypothesis strategies and small helpers shared by the test modules."""

import random
from fractions import Fraction

from hypothesis import strategies as st

from psmanip import AssignmentProblem, UtilityFunction


@st.composite
def problems(draw, n=(1, 3), m=(1, 5), partial0=False):
    n_ = draw(st.integers(*n))
    m_ = draw(st.integers(*m))
    prefs = [draw(st.permutations(range(m_))) for _ in range(n_)]
    if partial0:
        k = draw(st.integers(0, m_))
        prefs[0] = prefs[0][:k]
    return AssignmentProblem(tuple(tuple(p) for p in prefs), m_)


@st.composite
def consistent_utility(draw, pref):
    vals = draw(st.lists(st.integers(1, 60), min_size=len(pref), max_size=len(pref), unique=True))
    vals.sort(reverse=True)
    u = [Fraction(0)] * len(pref)
    for h, v in zip(pref, vals):
        u[h] = Fraction(v)
    return UtilityFunction(tuple(u))


def rand_problem(rng: random.Random, n: int, m: int) -> AssignmentProblem:
    prefs = []
    for _ in range(n):
        p = list(range(m))
        rng.shuffle(p)
        prefs.append(tuple(p))
    return AssignmentProblem(tuple(prefs), m)


def rand_utility(rng: random.Random, pref) -> UtilityFunction:
    vals = sorted(rng.sample(range(1, 10 * len(pref) + 1), len(pref)), reverse=True)
    u = [Fraction(0)] * len(pref)
    for h, v in zip(pref, vals):
        u[h] = Fraction(v)
    return UtilityFunction(tuple(u))


def rows_of(alloc):
    return [tuple(alloc[a]) for a in range(len(alloc))]
