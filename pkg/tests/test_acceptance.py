"""Acceptance criteria, one test (and one printed PASS/FAIL line) per criterion.

Run with ``pytest tests/test_acceptance.py -v`` or directly as a script.
"""

import random
import sys
import time
import timeit
from fractions import Fraction as F

import pytest

from psmanip import (
    AssignmentProblem,
    InstanceError,
    dl_best_response,
    dl_rounds,
    eu_best_response_2,
    eu_value,
    half_house_reduction,
    ps,
    sequential_allocation,
    UtilityFunction,
)
from psmanip.experiments import ExperimentConfig, run_experiment
from psmanip.hardness import (
    example_formula,
    random_exactly_twice,
    reduce_3sat,
    sweep,
    timing_audit,
)
from psmanip.oracle import brute_force_best_response, report_table

from strategies import rand_problem, rand_utility

half = F(1, 2)
SMALL3 = AssignmentProblem.from_lists([[0, 1, 2], [1, 0, 2], [1, 2, 0]])


RESULTS: list[str] = []  # collected for the terminal summary (see conftest.py)
_CAPSYS = None


@pytest.fixture(autouse=True)
def _live(capsys):
    # lets announce() print past pytest's output capture
    global _CAPSYS
    _CAPSYS = capsys
    yield


def announce(number, ok, detail):
    line = f"[criterion {number:>2}] {'PASS' if ok else 'FAIL'}: {detail}"
    RESULTS.append(line)
    with _CAPSYS.disabled():
        print("\n" + line)
    assert ok, line


def two_agent_corpus(count=300, seed=606):
    rng = random.Random(seed)
    return [rand_problem(rng, 2, rng.randint(1, 8)) for _ in range(count)]


def test_criterion_01_three_agent_run():
    alloc, trace = ps(SMALL3)
    rows = [tuple(alloc[a]) for a in range(3)]
    want = [(F(3, 4), 0, F(1, 4)), (F(1, 4), half, F(1, 4)), (0, half, half)]
    runtime = min(timeit.repeat(lambda: ps(SMALL3), number=50, repeat=5)) / 50
    ok = rows == want and trace.start == {0: 0, 1: 0, 2: half} and runtime < 1e-3
    announce(1, ok, f"three-agent matrix and start times exact; one run takes {runtime * 1e6:.0f} us")


def test_criterion_02_manipulation_example():
    alloc, _ = ps(SMALL3.with_report((1, 0, 2)))
    third = F(1, 3)
    want = [(half, third, F(1, 6)), (half, third, F(1, 6)), (0, third, F(2, 3))]
    u = UtilityFunction((7, 6, 0))
    truthful = eu_value(ps(SMALL3)[0][0], u)
    manipulated = eu_value(alloc[0], u)
    ok = [tuple(alloc[a]) for a in range(3)] == want and truthful == F(21, 4) and manipulated == F(11, 2)
    announce(2, ok, f"misreport matrix exact; expected utility {truthful} truthful vs {manipulated} manipulated")


def test_criterion_03_dl_reference_lists():
    two = AssignmentProblem.from_lists([[0, 1, 2, 3, 4, 5], [2, 5, 3, 4, 0, 1]])
    r4 = [r for r in dl_rounds(two) if r.i == 4][0]
    ten = AssignmentProblem.from_lists(
        [list(range(10)), [7, 2, 4, 1, 9, 0, 5, 6, 3, 8], [8, 3, 6, 0, 1, 5, 4, 2, 7, 9]]
    )
    final, _ = dl_best_response(ten)
    ok = r4.list == (2, 0, 3, 1) and r4.alloc[:4] == (1, 1, half, half) and final == (2, 1, 0, 5)
    announce(3, ok, "two-agent stingy prefix (h3,h1,h4,h2) with (1,1,1/2,1/2); ten-house final list (h3,h2,h1,h6)")


def test_criterion_04_dl_oracle_equivalence():
    rng = random.Random(404)
    start = time.perf_counter()
    agree = total = 0
    for _ in range(500):
        prob = rand_problem(rng, rng.randint(1, 3), rng.randint(1, 6))
        _, alloc = dl_best_response(prob)
        best = brute_force_best_response(prob, "dl", partial_sweep=False)
        total += 1
        agree += best.best_allocations == (tuple(alloc[0]),)
    elapsed = time.perf_counter() - start
    announce(4, agree == total and elapsed < 300,
             f"{agree}/{total} instances equal the DL oracle optimum in {elapsed:.1f} s")


def test_criterion_05_eu_oracle_equivalence():
    rng = random.Random(505)
    start = time.perf_counter()
    good = cases = 0
    for _ in range(300):
        prob = rand_problem(rng, 2, rng.randint(1, 7))
        _, alloc = eu_best_response_2(prob)
        table = report_table(prob)
        for _ in range(10):
            u = rand_utility(rng, prob.prefs[0])
            best = brute_force_best_response(prob, "eu", u, table=table, partial_sweep=False)
            cases += 1
            good += eu_value(alloc[0], u) == best.best_value
    elapsed = time.perf_counter() - start
    announce(5, good == cases and elapsed < 600,
             f"{good}/{cases} (instance, utility) cases attain the EU oracle optimum in {elapsed:.1f} s")


def test_criterion_06_half_house_identity():
    corpus = two_agent_corpus()[:200]
    same = 0
    for prob in corpus:
        inst, hmap = half_house_reduction(prob)
        same += hmap.average(sequential_allocation(inst)) == ps(prob)[0]
    announce(6, same == len(corpus), f"PS equals the half-house picking average on {same}/{len(corpus)} instances")


def test_criterion_07_dl_equals_eu_for_two_agents():
    corpus = two_agent_corpus()
    equal = support = 0
    for prob in corpus:
        equal += dl_best_response(prob)[1] == eu_best_response_2(prob)[1]
        support += all(x in (0, half, 1) for row in ps(prob)[0].matrix for x in row)
    n = len(corpus)
    announce(7, equal == n and support == n,
             f"identical DL/EU allocations on {equal}/{n}; shares in {{0,1/2,1}} on {support}/{n}")


def test_criterion_08_truthful_when_m_at_most_n():
    rng = random.Random(808)
    same = 0
    for _ in range(200):
        n = rng.randint(1, 5)
        prob = rand_problem(rng, n, rng.randint(1, n))
        same += dl_best_response(prob)[1] == ps(prob)[0]
    announce(8, same == 200, f"DL best response equals truthful PS on {same}/200 instances with m <= n")


def _sound(formula, audit_all=True):
    res = sweep(formula)
    inst = reduce_3sat(formula)
    assignments = [r[0] for r in res.rows] if audit_all else [r[0] for r in res.rows[:: max(1, len(res.rows) // 4)]]
    audits = [timing_audit(inst, a) for a in assignments]
    return res, audits


def test_criterion_09_reduction_soundness():
    # no exactly-twice formula has 4 variables: 4n literal slots must fill clauses of three
    with pytest.raises(InstanceError):
        random_exactly_twice(4, random.Random(0))
    counting_rules_out_4 = all((4 * n) % 3 == 0 for n in (3, 6)) and (4 * 4) % 3 != 0

    rng = random.Random(909)
    formulas = [example_formula()] + [random_exactly_twice(3, rng) for _ in range(20)]
    search = random.Random(1)
    unsat = []
    while len(unsat) < 2:
        f = random_exactly_twice(3, search)
        if not f.is_satisfiable():
            unsat.append(f)
    formulas += unsat
    big = random_exactly_twice(6, random.Random(6))
    failures, slowest = [], 0.0
    for f in formulas + [big]:
        start = time.perf_counter()
        res, audits = _sound(f, audit_all=f.n <= 3)
        slowest = max(slowest, time.perf_counter() - start)
        if not (res.equivalent and res.pointwise):
            failures.append(f"sweep mismatch on {f.clauses}")
        for rep in audits:
            if not rep.ok:
                failures.append("; ".join(rep.failures))
            if any(c != half for c in rep.round_costs[:-1]):
                failures.append("round cost differs from 1/2")
    n_unsat = sum(not f.is_satisfiable() for f in formulas + [big])
    ok = not failures and counting_rules_out_4 and slowest < 300
    announce(
        9, ok,
        f"{len(formulas) + 1} formulas (n=3 and one n=6; n=4 admits no exactly-twice formula), "
        f"{n_unsat} unsatisfiable; sweep equivalence and timing audits hold; slowest {slowest:.1f} s"
        + (f"; problems: {failures[:2]}" if failures else ""),
    )


def test_criterion_10_performance():
    rng = random.Random(1010)
    dl_times = []
    for _ in range(3):
        prob = rand_problem(rng, 50, 100)
        start = time.perf_counter()
        dl_best_response(prob)
        dl_times.append(time.perf_counter() - start)
    prob = rand_problem(rng, 200, 400)
    start = time.perf_counter()
    ps(prob)
    ps_time = time.perf_counter() - start
    ok = max(dl_times) <= 10 and ps_time <= 2
    announce(10, ok, f"DL best response n=50,m=100 worst {max(dl_times):.2f} s; PS n=200,m=400 {ps_time:.2f} s")


def test_criterion_11_experiment_trend():
    cfg = ExperimentConfig(ns=(3,), ms=(3, 4, 5, 6), trials=200, seed=2024)
    rep = run_experiment(cfg, jobs=2)
    fr = [f for _, f in rep.fractions(3)]
    ok = fr[0] == 0 and all(a <= b for a, b in zip(fr, fr[1:]))
    shown = ", ".join(f"m={m}: {float(f):.3f}" for m, f in rep.fractions(3))
    announce(11, ok, f"DL-manipulable fraction at n=3 ({shown})")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
