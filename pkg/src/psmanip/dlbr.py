"""Downward-lexicographic best response of agent 0 under PS.

The response is grown one house at a time along agent 0's true order
``h_1, ..., h_m``.  ``L_i`` is the stingy best response restricted to
``H_i = {h_1, ..., h_i}``: it keeps every share of ``L_{i-1}`` on ``H_{i-1}``,
takes as much of ``h_i`` as that allows, and among equally good lists places
at each position the house whose eating start time comes first (ties by true
preference).

Every PS run here is incremental.  A run of ``L_{i-1}`` is checkpointed after
each of agent 0's houses; a candidate ``L_i^q`` resumes from checkpoint
``q - 1`` and eating-start-time probes fork the current state instead of
re-simulating from time zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .core import ONE, ZERO, AssignmentProblem, FractionalAssignment, InstanceError
from .ps import Eating, ps


@dataclass(frozen=True)
class PartialResponse:
    """Round ``i`` of the construction: the stingy list for ``H_i`` and agent 0's row."""

    list: tuple[int, ...]
    i: int
    alloc: tuple[Fraction, ...]

    def partial_positions(self) -> list[int]:
        return [k for k, h in enumerate(self.list) if ZERO < self.alloc[h] < ONE]


def _true_order(problem: AssignmentProblem, true_pref) -> tuple[int, ...]:
    order = tuple(problem.prefs[0] if true_pref is None else true_pref)
    if sorted(order) != list(range(problem.m)):
        raise InstanceError("the manipulator's true preference must rank every house")
    return order


def _rank(order: Sequence[int], m: int) -> list[int]:
    rank = [0] * m
    for k, h in enumerate(order):
        rank[h] = k
    return rank


class _Context:
    """Shared pieces of one best-response computation."""

    def __init__(self, problem: AssignmentProblem, order: Sequence[int]):
        self.problem = problem
        self.rivals = list(problem.prefs[1:])
        self.rank = _rank(order, problem.m)

    def blank(self) -> Eating:
        return Eating([[]] + self.rivals, self.problem.m)

    def checkpoints(self, lst: Sequence[int]) -> tuple[list[Eating], list[Fraction]]:
        """States with agent 0 idle after each prefix of ``lst``, and its final row."""
        sim = self.blank()
        marks = [sim.fork()]
        for h in lst:
            sim.extend0(h)
            sim.run_until_idle()
            marks.append(sim.fork())
        return marks, sim.row0()


def stingy_order(
    prefix: Sequence[int],
    candidates: Iterable[int],
    problem: AssignmentProblem,
    true_pref: Sequence[int] | None = None,
) -> list[int]:
    """Sort ``candidates`` by eating start time when agent 0 reports ``prefix``.

    Ties go to the house agent 0 truly prefers; houses nobody starts come last.
    """
    prefix = tuple(prefix)
    cands = list(candidates)
    if set(prefix) & set(cands):
        raise InstanceError("candidates must be disjoint from the prefix")
    order = _true_order(problem, true_pref)
    rank = _rank(order, problem.m)
    sim = Eating([list(prefix)] + list(problem.prefs[1:]), problem.m)
    sim.run()
    inf = (1, ZERO)
    return sorted(
        cands,
        key=lambda h: ((0, sim.est[h]) if sim.est[h] is not None else inf, rank[h]),
    )


def _build_candidate(
    ctx: _Context,
    marks: list[Eating],
    prev: Sequence[int],
    prev_row: Sequence[Fraction],
    new: int,
    q: int,
    stop_when_worse: bool,
):
    """Insert ``new`` at 1-based position ``q`` of ``prev`` and complete stingily.

    Returns ``(list, share of new, worse, row)``.  ``worse`` says whether some
    house of ``prev`` changed share.  With ``stop_when_worse`` the construction
    stops at the first changed share and the returned list is truncated.
    """
    sim = marks[q - 1].fork()
    lst = list(prev[: q - 1]) + [new]
    sim.extend0(new)
    sim.run_until_idle()
    share = sim.share0(new)
    if share == ZERO:
        return list(prev), ZERO, False, list(prev_row)
    rest = list(prev[q - 1 :])
    worse = False
    while rest:
        nxt = rest[0] if len(rest) == 1 else sim.first_to_start(rest, ctx.rank)
        rest.remove(nxt)
        lst.append(nxt)
        sim.extend0(nxt)
        sim.run_until_idle()
        if sim.share0(nxt) != prev_row[nxt]:
            worse = True
            if stop_when_worse:
                break
    return lst, share, worse, sim.row0()


def insert_candidate(
    prev: PartialResponse,
    new_house: int,
    q: int,
    problem: AssignmentProblem,
    true_pref: Sequence[int] | None = None,
) -> list[int]:
    """The list ``L_i^q``: ``new_house`` at 1-based position ``q``, rest stingy.

    If agent 0 then gets nothing of ``new_house`` the previous list is returned.
    """
    order = _true_order(problem, true_pref)
    ctx = _Context(problem, order)
    partial = prev.partial_positions()
    p = partial[-1] + 1 if partial else 0
    if not p < q <= len(prev.list) + 1:
        raise ValueError(f"position {q} outside ({p}, {len(prev.list) + 1}]")
    if new_house in prev.list:
        raise InstanceError("house already listed")
    marks, row = ctx.checkpoints(prev.list)
    lst, _, _, _ = _build_candidate(ctx, marks, prev.list, row, new_house, q, False)
    return lst


def _next_round(ctx: _Context, prev: tuple[int, ...], new: int) -> tuple[int, ...]:
    marks, prev_row = ctx.checkpoints(prev)
    p = 0
    for k, h in enumerate(prev, start=1):
        if ZERO < prev_row[h] < ONE:
            p = k
    last = len(prev) + 1
    cache: dict[int, tuple] = {}

    def candidate(q):
        if q not in cache:
            cache[q] = _build_candidate(ctx, marks, prev, prev_row, new, q, True)
        return cache[q]

    # worse[p] plays the always-true sentinel slot
    worse = {p: True}
    fallback = None  # latest non-worse candidate that gave all of `new`
    q = p + 1
    while True:
        lst, share, is_worse, _ = candidate(q)
        worse[q] = is_worse
        if is_worse:
            q += 1
            if q > last:
                # cannot happen: appending at the end never changes H_{i-1}
                raise AssertionError("no admissible insertion position")
            continue
        if share == ZERO:
            return fallback if fallback is not None else prev
        if share < ONE:
            return fallback if fallback is not None else tuple(lst)
        if q == last:
            return tuple(lst)
        later = lst[q:]
        first = marks[q - 1].first_to_start([new] + later, ctx.rank)
        if first == new:
            return tuple(lst)
        fallback = tuple(lst)
        q += 1


def dl_rounds(problem: AssignmentProblem, true_pref: Sequence[int] | None = None):
    """Yield the :class:`PartialResponse` for ``H_1, H_2, ..., H_m`` in turn."""
    order = _true_order(problem, true_pref)
    if not order:
        return
    ctx = _Context(problem, order)
    lst: tuple[int, ...] = (order[0],)
    for i in range(1, problem.m + 1):
        if i > 1:
            lst = _next_round(ctx, lst, order[i - 1])
        _, row = ctx.checkpoints(lst)
        yield PartialResponse(lst, i, tuple(row))


def dl_best_response(
    problem: AssignmentProblem, true_pref: Sequence[int] | None = None
) -> tuple[tuple[int, ...], FractionalAssignment]:
    """Stingy DL best response of agent 0 and the PS outcome when it is reported.

    ``true_pref`` defaults to ``problem.prefs[0]``, which must then be complete.
    The returned list is partial: houses agent 0 would get nothing of are left out.
    """
    last = ()
    for last_round in dl_rounds(problem, true_pref):
        last = last_round.list
    alloc, _ = ps(problem.with_report(last))
    return last, alloc


def sd_best_response(
    problem: AssignmentProblem, true_pref: Sequence[int] | None = None
) -> tuple[int, ...]:
    """A report whose outcome no other report SD-dominates (the DL best response)."""
    return dl_best_response(problem, true_pref)[0]
