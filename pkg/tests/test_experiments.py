import json
import random
from collections import Counter

import pytest

from psmanip import ExperimentConfig, ExperimentReport, InstanceError, is_manipulable, random_profile, run_experiment
from psmanip.experiments import _detect, random_utility


def test_profiles_are_reproducible():
    a = random_profile(3, 5, random.Random("s"))
    b = random_profile(3, 5, random.Random("s"))
    assert a == b
    assert random_profile(1, 4, random.Random(0)).n == 1
    with pytest.raises(InstanceError):
        random_profile(0, 3, random.Random(0))


def test_profiles_are_uniform():
    rng = random.Random(2024)
    counts = Counter(random_profile(1, 3, rng).prefs[0] for _ in range(6000))
    assert len(counts) == 6
    for c in counts.values():
        assert abs(c / 6000 - 1 / 6) <= 0.03


def test_random_utility_is_consistent():
    rng = random.Random(5)
    pref = (3, 0, 2, 1)
    assert random_utility(pref, rng).is_consistent(pref)


def test_square_cells_not_dl_manipulable():
    rep = run_experiment(ExperimentConfig(ns=(3,), ms=(3,), trials=60, seed=9))
    assert rep.cells[0].fraction == 0


def test_parallel_and_serial_agree():
    cfg = ExperimentConfig(ns=(2, 3), ms=(3, 4), trials=12, seed=3)
    serial = run_experiment(cfg, jobs=1)
    parallel = run_experiment(cfg, jobs=3)
    assert serial.to_json() == parallel.to_json()


def test_report_round_trip():
    rep = run_experiment(ExperimentConfig(ns=(2,), ms=(3, 4), trials=15, seed=1, criterion="eu"))
    back = ExperimentReport.from_dict(json.loads(rep.to_json()))
    assert back == rep
    assert all(0 <= c.fraction <= 1 for c in back.cells)
    assert "fraction" in rep.table()


def test_infeasible_cells_are_skipped():
    rep = run_experiment(ExperimentConfig(ns=(3,), ms=(7,), trials=2, criterion="eu"))
    assert rep.cells == () and "m=7" in rep.skipped[0]


def test_two_agent_eu_detection_matches_oracle():
    rng = random.Random(77)
    for _ in range(60):
        m = rng.randint(2, 6)
        prob = random_profile(2, m, rng)
        utils = [random_utility(p, rng) for p in prob.prefs]
        fast = tuple(_detect(prob, i, utils[i], "eu") is not None for i in range(2))
        assert fast == is_manipulable(prob, "eu", utils)


def test_config_validation():
    with pytest.raises(InstanceError):
        ExperimentConfig(trials=0)
    with pytest.raises(InstanceError):
        ExperimentConfig(criterion="sd")
