import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from psmanip import (
    AssignmentProblem,
    Comparison,
    InstanceError,
    OracleCapError,
    UtilityFunction,
    brute_force_best_response,
    is_manipulable,
    sd_compare,
)
from psmanip.oracle import report_table

from strategies import problems, rand_problem, rand_utility

SMALL3 = AssignmentProblem.from_lists([[0, 1, 2], [1, 0, 2], [1, 2, 0]])


def test_manipulation_example_value():
    best = brute_force_best_response(SMALL3, "eu", UtilityFunction((7, 6, 0)))
    assert best.best_value == F(11, 2)
    assert best.optimal_reports and all(r[0] == 1 for r in best.optimal_reports)
    assert not best.truthful_is_optimal


def test_small3_truthful_under_dl():
    best = brute_force_best_response(SMALL3, "dl")
    assert best.truthful_is_optimal
    assert best.best_allocations == (best.truthful_row,)


def test_lone_agent():
    best = brute_force_best_response(AssignmentProblem.from_lists([[2, 0, 1]]), "dl")
    assert len(best.optimal_reports) == 6
    assert best.best_allocations == ((1, 1, 1),)


def test_cap_and_force():
    prob = rand_problem(random.Random(0), 2, 4)
    with pytest.raises(OracleCapError, match="cap of 3"):
        brute_force_best_response(prob, "dl", cap=3)
    forced = brute_force_best_response(prob, "dl", cap=3, force=True)
    assert forced == brute_force_best_response(prob, "dl")
    with pytest.raises(InstanceError, match="utility"):
        brute_force_best_response(prob, "eu")


def test_table_is_lexicographic():
    reports = [r for r, _ in report_table(SMALL3)]
    assert reports == sorted(reports) and len(reports) == 6


def test_is_manipulable_examples():
    assert is_manipulable(SMALL3, "eu", UtilityFunction((7, 6, 0)))[0] is True
    assert is_manipulable(SMALL3, "dl") == (False, False, False)
    same = AssignmentProblem.from_lists([[2, 0, 3, 1]] * 3)
    rng = random.Random(1)
    utils = [rand_utility(rng, same.prefs[0]) for _ in range(3)]
    assert is_manipulable(same, "eu", utils) == (False, False, False)
    assert is_manipulable(same, "sd") == (False, False, False)
    with pytest.raises(InstanceError):
        is_manipulable(same, "eu")


def test_no_dl_manipulation_when_m_at_most_n():
    rng = random.Random(4)
    for _ in range(30):
        n = rng.randint(2, 4)
        prob = rand_problem(rng, n, rng.randint(1, n))
        assert not any(is_manipulable(prob, "dl"))


@settings(max_examples=80, deadline=None)
@given(problems(n=(1, 3), m=(1, 5)))
def test_partial_reports_never_win(prob):
    # the partial sweep raises if a partial list beats every complete one
    dl = brute_force_best_response(prob, "dl")
    sd = brute_force_best_response(prob, "sd")
    assert len(dl.best_allocations) == 1
    assert dl.best_allocations[0] in sd.best_allocations
    for row in sd.best_allocations:
        assert sd_compare(row, dl.best_allocations[0], prob.prefs[0]) is not Comparison.FIRST
    assert brute_force_best_response(prob, "dl") == dl
