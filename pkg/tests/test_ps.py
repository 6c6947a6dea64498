from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psmanip import AssignmentProblem, Comparison, InstanceError, est, ps, ps1, sd_compare

from strategies import problems, rows_of

SMALL3 = AssignmentProblem.from_lists([[0, 1, 2], [1, 0, 2], [1, 2, 0]])


def naive_ps(prefs, m):
    """Textbook PS: everyone eats its best non-exhausted listed house until the next exhaustion."""
    left = [F(1)] * m
    got = [[F(0)] * m for _ in prefs]
    while True:
        eating = {}
        for a, lst in enumerate(prefs):
            for h in lst:
                if left[h] > 0:
                    eating[a] = h
                    break
        if not eating:
            return got
        count = {}
        for h in eating.values():
            count[h] = count.get(h, 0) + 1
        dt = min(left[h] / k for h, k in count.items())
        for a, h in eating.items():
            got[a][h] += dt
        for h, k in count.items():
            left[h] -= k * dt


def test_small3_run():
    alloc, trace = ps(SMALL3)
    assert rows_of(alloc) == [
        (F(3, 4), 0, F(1, 4)),
        (F(1, 4), F(1, 2), F(1, 4)),
        (0, F(1, 2), F(1, 2)),
    ]
    assert est(SMALL3) == {0: 0, 1: 0, 2: F(1, 2)}
    assert [t for t, _ in trace.events] == [F(1, 2), F(3, 4), F(1)]
    assert trace.end_time == 1


def test_small3_misreport():
    alloc, _ = ps(SMALL3.with_report((1, 0, 2)))
    third = F(1, 3)
    assert rows_of(alloc) == [
        (F(1, 2), third, F(1, 6)),
        (F(1, 2), third, F(1, 6)),
        (0, third, F(2, 3)),
    ]


def test_single_agent():
    alloc, trace = ps(AssignmentProblem.from_lists([[2, 0, 1]]))
    assert rows_of(alloc) == [(1, 1, 1)]
    assert trace.start == {2: 0, 0: 1, 1: 2}


def test_identical_preferences_start_times():
    n = 4
    prob = AssignmentProblem.from_lists([[3, 1, 4, 0, 2]] * n)
    start = est(prob)
    for k, h in enumerate([3, 1, 4, 0, 2]):
        assert start[h] == F(k, n)


def test_ps1_views():
    assert ps1([0], SMALL3) == (F(3, 4), 0, 0)
    assert ps1([], SMALL3) == (0, 0, 0)
    assert ps1([0, 1, 2], SMALL3) == tuple(ps(SMALL3)[0][0])
    with pytest.raises(InstanceError, match="duplicate"):
        ps1([0, 0], SMALL3)
    with pytest.raises(InstanceError, match="unknown"):
        ps1([7], SMALL3)


def test_partial_list_leaves_house_uneaten():
    prob = AssignmentProblem.from_lists([[0]], m=2)
    alloc, trace = ps(prob)
    assert rows_of(alloc) == [(1, 0)]
    assert 1 not in trace.start


def test_simultaneous_exhaustion_is_one_batch():
    # two pairs finish their houses at t=1/2 together
    prob = AssignmentProblem.from_lists([[0, 1, 2, 3], [0, 2, 1, 3], [1, 0, 2, 3], [1, 3, 0, 2]])
    _, trace = ps(prob)
    assert trace.events[0] == (F(1, 2), (0, 1))
    assert trace.end_time == 1


@settings(max_examples=300, deadline=None)
@given(problems(n=(1, 4), m=(1, 6), partial0=True))
def test_matches_textbook_ps(prob):
    alloc, trace = ps(prob)
    assert [list(r) for r in rows_of(alloc)] == naive_ps(prob.prefs, prob.m)
    times = [t for t, _ in trace.events]
    assert times == sorted(times)
    # consumption bookkeeping agrees with the matrix
    for (a, h), x in trace.consumption.items():
        assert alloc[a][h] == x
    assert sum(len(b) for _, b in trace.events) == len(trace.start)


@settings(max_examples=200, deadline=None)
@given(problems(n=(1, 4), m=(1, 6)))
def test_complete_lists(prob):
    alloc, trace = ps(prob)
    alloc.check(complete=True)
    assert trace.end_time == F(prob.m, prob.n)
    assert len(trace.events) <= prob.m
    assert ps(prob) == (alloc, trace)


@settings(max_examples=200, deadline=None)
@given(problems(n=(3, 4), m=(1, 6)), st.data())
def test_anonymity_among_rivals(prob, data):
    perm = [0] + data.draw(st.permutations(range(1, prob.n)))
    moved = AssignmentProblem(tuple(prob.prefs[a] for a in perm), prob.m)
    a1, _ = ps(prob)
    a2, _ = ps(moved)
    for new, old in enumerate(perm):
        assert a2[new] == a1[old]


@settings(max_examples=200, deadline=None)
@given(problems(n=(2, 4), m=(1, 6)))
def test_sd_envy_free(prob):
    alloc, _ = ps(prob)
    for i in range(prob.n):
        for j in range(prob.n):
            assert sd_compare(alloc[i], alloc[j], prob.prefs[i]) is not Comparison.SECOND


@settings(max_examples=150, deadline=None)
@given(problems(n=(2, 4), m=(1, 6), partial0=True))
def test_ps1_is_row_zero(prob):
    assert ps1(prob.prefs[0], prob) == ps(prob)[0][0]
