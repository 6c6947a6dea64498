"""How often is PS manipulable on random profiles, and what does manipulation do to welfare?

Each trial draws a uniform random strict profile and, for every agent in
turn, computes that agent's best response with everybody else truthful.  A
profile counts as manipulable when at least one agent strictly gains.  For
every profitable deviation the change in utilitarian welfare (sum of all
agents' expected utilities) is recorded as well.

Trial ``k`` of cell ``(n, m)`` uses its own generator seeded with
``"{seed}/{n}/{m}/{k}"``, so results never depend on the number of workers.
"""

from __future__ import annotations

import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

from .core import (
    AssignmentProblem,
    Comparison,
    InstanceError,
    UtilityFunction,
    as_manipulator,
    as_rational,
    dl_compare,
    eu_value,
    format_rational,
)
from .dlbr import dl_best_response
from .oracle import brute_force_best_response
from .ps import ps, ps1
from .seqalloc import eu_best_response_2

ORACLE_MAX_M = 6


def random_profile(n: int, m: int, rng: random.Random) -> AssignmentProblem:
    """Every agent ranks all m houses by an independent uniform permutation."""
    if n < 1 or m < 1:
        raise InstanceError("need at least one agent and one house")
    prefs = []
    for _ in range(n):
        order = list(range(m))
        rng.shuffle(order)
        prefs.append(tuple(order))
    return AssignmentProblem(tuple(prefs), m)


def random_utility(pref: Sequence[int], rng: random.Random, top: int | None = None) -> UtilityFunction:
    """Distinct integer utilities in 1..top (default 4m), decreasing along ``pref``."""
    m = len(pref)
    top = top or 4 * m
    values = sorted(rng.sample(range(1, top + 1), m), reverse=True)
    u = [Fraction(0)] * m
    for h, v in zip(pref, values):
        u[h] = Fraction(v)
    return UtilityFunction(tuple(u))


@dataclass(frozen=True)
class ExperimentConfig:
    ns: tuple[int, ...] = (2, 3)
    ms: tuple[int, ...] = (2, 3, 4, 5, 6)
    trials: int = 100
    seed: int = 0
    criterion: str = "dl"

    def __post_init__(self):
        if self.trials < 1:
            raise InstanceError("trials must be at least 1")
        if self.criterion not in ("dl", "eu"):
            raise InstanceError("criterion must be 'dl' or 'eu'")
        object.__setattr__(self, "ns", tuple(self.ns))
        object.__setattr__(self, "ms", tuple(self.ms))


@dataclass(frozen=True)
class CellResult:
    n: int
    m: int
    trials: int
    manipulable: int
    deviations: int
    welfare_up: int
    welfare_down: int
    welfare_same: int
    welfare_delta: Fraction  # summed over deviations

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.manipulable, self.trials)


@dataclass(frozen=True)
class ExperimentReport:
    config: ExperimentConfig
    cells: tuple[CellResult, ...]
    skipped: tuple[str, ...] = ()
    method: dict = field(default_factory=dict)

    def fractions(self, n: int) -> list[tuple[int, Fraction]]:
        return [(c.m, c.fraction) for c in self.cells if c.n == n]

    def trend(self) -> dict[int, bool]:
        """Per n: is the manipulable fraction non-decreasing in m?"""
        out = {}
        for n in sorted({c.n for c in self.cells}):
            fr = [f for _, f in self.fractions(n)]
            out[n] = all(a <= b for a, b in zip(fr, fr[1:]))
        return out

    def to_dict(self) -> dict:
        cells = []
        for c in self.cells:
            d = asdict(c)
            d["welfare_delta"] = format_rational(c.welfare_delta)
            d["fraction"] = format_rational(c.fraction)
            cells.append(d)
        return {
            "config": asdict(self.config),
            "cells": cells,
            "skipped": list(self.skipped),
            "method": dict(self.method),
            "trend_non_decreasing": {str(k): v for k, v in self.trend().items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentReport":
        cfg = ExperimentConfig(**data["config"])
        cells = []
        for d in data["cells"]:
            d = {k: v for k, v in d.items() if k != "fraction"}
            d["welfare_delta"] = as_rational(d["welfare_delta"])
            cells.append(CellResult(**d))
        return cls(cfg, tuple(cells), tuple(data["skipped"]), dict(data["method"]))

    def table(self) -> str:
        head = f"{'n':>3} {'m':>3} {'trials':>6} {'manip':>6} {'fraction':>9} {'dev':>5} {'W+':>4} {'W-':>4} {'W=':>4}  mean dW"
        lines = [head]
        for c in self.cells:
            mean = c.welfare_delta / c.deviations if c.deviations else Fraction(0)
            lines.append(
                f"{c.n:>3} {c.m:>3} {c.trials:>6} {c.manipulable:>6} {float(c.fraction):>9.3f} "
                f"{c.deviations:>5} {c.welfare_up:>4} {c.welfare_down:>4} {c.welfare_same:>4}  "
                f"{format_rational(mean)}"
            )
        for note in self.skipped:
            lines.append(f"skipped: {note}")
        return "\n".join(lines)


def _swap(seq, i):
    out = list(seq)
    out[0], out[i] = out[i], out[0]
    return out


def _detect(problem: AssignmentProblem, i: int, u: UtilityFunction, criterion: str):
    """Best response of agent i; returns the full PS matrix it induces, or None if no gain."""
    sub = as_manipulator(problem, i)
    truth = sub.prefs[0]
    truthful = ps1(truth, sub)
    if criterion == "dl":
        report, alloc = dl_best_response(sub)
        if dl_compare(alloc[0], truthful, truth) is not Comparison.FIRST:
            return None
        return alloc
    if problem.n == 2:
        _, alloc = eu_best_response_2(sub)
    else:
        best = brute_force_best_response(sub, "eu", u, partial_sweep=False)
        alloc, _ = ps(sub.with_report(best.optimal_reports[0]))
    if eu_value(alloc[0], u) <= eu_value(truthful, u):
        return None
    return alloc


def _trial(args) -> tuple[bool, list[Fraction]]:
    seed, n, m, k, criterion = args
    rng = random.Random(f"{seed}/{n}/{m}/{k}")
    problem = random_profile(n, m, rng)
    utils = [random_utility(problem.prefs[a], rng) for a in range(n)]
    truthful, _ = ps(problem)
    base = sum(eu_value(truthful[a], utils[a]) for a in range(n))
    deltas = []
    for i in range(n):
        alloc = _detect(problem, i, utils[i], criterion)
        if alloc is None:
            continue
        perm = _swap(range(n), i)  # row r of alloc is agent perm[r]
        total = sum(eu_value(alloc[r], utils[perm[r]]) for r in range(n))
        deltas.append(total - base)
    return bool(deltas), deltas


def _feasible(n: int, m: int, criterion: str) -> str | None:
    if criterion == "eu" and n >= 3 and m > ORACLE_MAX_M:
        return f"n={n}, m={m}: EU with three or more agents needs the oracle, limited to m <= {ORACLE_MAX_M}"
    return None


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> ExperimentReport:
    cells_args, skipped = [], []
    for n in cfg.ns:
        for m in cfg.ms:
            why = _feasible(n, m, cfg.criterion)
            if why:
                skipped.append(why)
            else:
                cells_args.append((n, m))
    tasks = [(cfg.seed, n, m, k, cfg.criterion) for n, m in cells_args for k in range(cfg.trials)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_trial, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        results = [_trial(t) for t in tasks]
    cells = []
    for idx, (n, m) in enumerate(cells_args):
        chunk = results[idx * cfg.trials : (idx + 1) * cfg.trials]
        deltas = [d for _, ds in chunk for d in ds]
        cells.append(
            CellResult(
                n, m, cfg.trials,
                manipulable=sum(flag for flag, _ in chunk),
                deviations=len(deltas),
                welfare_up=sum(d > 0 for d in deltas),
                welfare_down=sum(d < 0 for d in deltas),
                welfare_same=sum(d == 0 for d in deltas),
                welfare_delta=sum(deltas, Fraction(0)),
            )
        )
    method = (
        {"detector": "dl_best_response"}
        if cfg.criterion == "dl"
        else {"n=2": "eu_best_response_2", "n>=3": "brute-force oracle"}
    )
    return ExperimentReport(cfg, tuple(cells), tuple(skipped), method)
