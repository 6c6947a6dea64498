"""Exhaustive best responses: try every report of the manipulator.

Deliberately naive.  All ``m!`` complete reports are evaluated with a fresh PS
run each; there is no pruning of any kind.  For ``m <= 5`` the partial lists
are swept as well to confirm that they never beat the best complete report.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import (
    AssignmentProblem,
    Comparison,
    InstanceError,
    UtilityFunction,
    as_manipulator,
    eu_value,
    sd_compare,
)
from .ps import ps1

DEFAULT_CAP = 8
PARTIAL_SWEEP_MAX = 5


class Criterion(str, enum.Enum):
    EU = "eu"
    DL = "dl"
    SD = "sd"


class OracleCapError(ValueError):
    """The instance has too many houses for exhaustive enumeration."""


class OracleInvariantError(AssertionError):
    """A partial report beat every complete report."""


@dataclass(frozen=True)
class OracleReport:
    criterion: Criterion
    best_value: object
    best_allocations: tuple[tuple[Fraction, ...], ...]
    optimal_reports: tuple[tuple[int, ...], ...]
    truthful_row: tuple[Fraction, ...]
    truthful_is_optimal: bool


def report_table(
    problem: AssignmentProblem, cap: int = DEFAULT_CAP, force: bool = False
) -> list[tuple[tuple[int, ...], tuple[Fraction, ...]]]:
    """``(report, agent-0 row)`` for every complete report, in lexicographic order."""
    if problem.m > cap and not force:
        raise OracleCapError(
            f"{problem.m} houses exceed the enumeration cap of {cap} ({problem.m}! reports); "
            "pass force=True (--force on the command line) to enumerate anyway"
        )
    return [(r, ps1(r, problem)) for r in itertools.permutations(range(problem.m))]


def _partial_reports(m: int):
    for k in range(m):
        yield from itertools.permutations(range(m), k)


def _scorer(criterion: Criterion, truth: Sequence[int], u):
    if criterion is Criterion.EU:
        if u is None:
            raise InstanceError("the EU criterion needs a utility function")
        return lambda row: eu_value(row, u)
    return lambda row: tuple(row[h] for h in truth)


def brute_force_best_response(
    problem: AssignmentProblem,
    criterion: Criterion | str,
    u: UtilityFunction | Sequence | None = None,
    *,
    true_pref: Sequence[int] | None = None,
    cap: int = DEFAULT_CAP,
    force: bool = False,
    table=None,
    partial_sweep: bool | None = None,
) -> OracleReport:
    """Best report(s) of agent 0 found by enumerating all complete reports.

    For EU the best value is the expected utility; for DL it is the row read
    along the true preference (lexicographically larger is better); SD returns
    every allocation no other allocation stochastically dominates.
    """
    criterion = Criterion(criterion)
    truth = tuple(problem.prefs[0] if true_pref is None else true_pref)
    if sorted(truth) != list(range(problem.m)):
        raise InstanceError("the true preference must rank every house")
    if table is None:
        table = report_table(problem, cap, force)
    truthful_row = ps1(truth, problem)
    if partial_sweep is None:
        partial_sweep = problem.m <= PARTIAL_SWEEP_MAX

    if criterion is Criterion.SD:
        rows = list(dict.fromkeys(row for _, row in table))
        maximal = [
            r for r in rows
            if not any(sd_compare(o, r, truth) is Comparison.FIRST for o in rows)
        ]
        keep = set(maximal)
        optimal = tuple(rep for rep, row in table if row in keep)
        truthful_ok = not any(sd_compare(r, truthful_row, truth) is Comparison.FIRST for r in rows)
        if partial_sweep:
            for rep in _partial_reports(problem.m):
                row = ps1(rep, problem)
                if any(sd_compare(row, r, truth) is Comparison.FIRST for r in maximal):
                    raise OracleInvariantError(f"partial report {rep} dominates a complete optimum")
        return OracleReport(criterion, None, tuple(maximal), optimal, truthful_row, truthful_ok)

    score = _scorer(criterion, truth, u)
    scored = [(score(row), rep, row) for rep, row in table]
    best = max(s for s, _, _ in scored)
    optimal = tuple(rep for s, rep, _ in scored if s == best)
    allocations = tuple(dict.fromkeys(row for s, _, row in scored if s == best))
    if partial_sweep:
        for rep in _partial_reports(problem.m):
            if score(ps1(rep, problem)) > best:
                raise OracleInvariantError(f"partial report {rep} beats every complete report")
    return OracleReport(
        criterion, best, allocations, optimal, truthful_row, score(truthful_row) == best
    )


def is_manipulable(
    problem: AssignmentProblem,
    criterion: Criterion | str,
    utilities=None,
    *,
    cap: int = DEFAULT_CAP,
    force: bool = False,
) -> tuple[bool | None, ...]:
    """Per agent: can a misreport strictly improve on truth-telling, others truthful?

    For EU, ``utilities`` holds one utility function per agent; an entry of
    None skips that agent (its flag is None).  A single utility function is
    taken to be the first agent's.
    """
    criterion = Criterion(criterion)
    if criterion is Criterion.EU:
        if isinstance(utilities, UtilityFunction):
            utilities = [utilities] + [None] * (problem.n - 1)
        if utilities is None or len(utilities) != problem.n:
            raise InstanceError("EU manipulability needs a utility function per agent (None to skip)")
    flags: list[bool | None] = []
    for i in range(problem.n):
        u = utilities[i] if criterion is Criterion.EU else None
        if criterion is Criterion.EU and u is None:
            flags.append(None)
            continue
        sub = as_manipulator(problem, i)
        report = brute_force_best_response(
            sub, criterion, u, cap=cap, force=force, partial_sweep=False
        )
        flags.append(not report.truthful_is_optimal)
    return tuple(flags)
