"""Exact event-driven simulation of the probabilistic serial (simultaneous eating) rule.

Every agent eats its most preferred listed house that is not yet exhausted at
unit speed.  Between events nothing changes except linear consumption, so the
simulation jumps from one batch of exhaustions to the next.  Each house keeps
its projected exhaustion time on a heap; the projection is refreshed only when
an agent arrives, which keeps the number of rational operations proportional
to the number of (agent, house) visits.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .core import ONE, ZERO, AssignmentProblem, FractionalAssignment, InstanceError


class Eating:
    """Mutable PS state.  Agent 0 may be extended on the fly (see :meth:`extend0`)."""

    __slots__ = (
        "prefs", "n", "m", "t", "remaining", "stamp", "eaters", "gone", "version",
        "heap", "ptr", "target", "arrived", "est", "got0", "full", "eaten",
        "segments", "events", "_own0",
    )

    def __init__(self, prefs: Sequence[Sequence[int]], m: int, full: bool = False):
        self.prefs = [list(prefs[0])] + list(prefs[1:]) if prefs else []
        self._own0 = True
        self.n = len(self.prefs)
        self.m = m
        self.t = ZERO
        self.remaining = [ONE] * m
        self.stamp = [ZERO] * m
        self.eaters = [0] * m
        self.gone = [False] * m
        self.version = [0] * m
        self.heap: list = []
        self.ptr = [0] * self.n
        self.target: list = [None] * self.n
        self.arrived = [ZERO] * self.n
        self.est: list = [None] * m
        self.got0: dict = {}
        self.full = full
        self.eaten: list = [dict() for _ in range(self.n)] if full else []
        self.segments: list = [] if full else None
        self.events: list = [] if full else None
        for a in range(self.n):
            self._retarget(a)

    # -- internals ---------------------------------------------------------

    def _arrive(self, a: int, h: int) -> None:
        t = self.t
        k = self.eaters[h]
        if k:
            self.remaining[h] -= k * (t - self.stamp[h])
        self.stamp[h] = t
        k += 1
        self.eaters[h] = k
        if self.est[h] is None:
            self.est[h] = t
        v = self.version[h] + 1
        self.version[h] = v
        heapq.heappush(self.heap, (t + self.remaining[h] / k, h, v))
        self.target[a] = h
        self.arrived[a] = t

    def _retarget(self, a: int) -> None:
        lst = self.prefs[a]
        i = self.ptr[a]
        gone = self.gone
        end = len(lst)
        while i < end and gone[lst[i]]:
            i += 1
        self.ptr[a] = i
        if i < end:
            self._arrive(a, lst[i])
        else:
            self.target[a] = None

    def _leave(self, a: int, h: int) -> None:
        amount = self.t - self.arrived[a]
        if a == 0:
            self.got0[h] = self.got0.get(h, ZERO) + amount
        if self.full:
            row = self.eaten[a]
            row[h] = row.get(h, ZERO) + amount
            self.segments.append((a, h, self.arrived[a], self.t))

    # -- public API --------------------------------------------------------

    def advance(self) -> list[int]:
        """Process the next batch of simultaneous exhaustions; return the houses."""
        heap = self.heap
        version = self.version
        while heap and heap[0][2] != version[heap[0][1]]:
            heapq.heappop(heap)
        if not heap:
            return []
        t = heap[0][0]
        batch = []
        while heap and heap[0][0] == t:
            _, h, v = heapq.heappop(heap)
            if v == version[h]:
                batch.append(h)
        self.t = t
        gone = self.gone
        for h in batch:
            gone[h] = True
            self.remaining[h] = ZERO
            self.stamp[h] = t
            self.eaters[h] = 0
            version[h] += 1
        movers = [a for a, h in enumerate(self.target) if h is not None and gone[h]]
        for a in movers:
            self._leave(a, self.target[a])
        for a in movers:
            self._retarget(a)
        if self.full:
            self.events.append((t, tuple(sorted(batch))))
        return batch

    def run(self) -> None:
        while self.advance():
            pass

    def run_until_idle(self, agent: int = 0) -> None:
        """Advance until ``agent`` has run out of listed houses."""
        while self.target[agent] is not None:
            if not self.advance():
                break

    def extend0(self, house: int) -> None:
        """Append ``house`` to agent 0's list (agent 0 resumes if idle)."""
        if not self._own0:
            self.prefs[0] = list(self.prefs[0])
            self._own0 = True
        self.prefs[0].append(house)
        if self.target[0] is None:
            self._retarget(0)

    def fork(self) -> "Eating":
        """Cheap copy of the state; the copy shares the rivals' lists."""
        if self.full:
            raise ValueError("fork is only supported for light simulations")
        c = Eating.__new__(Eating)
        c.prefs = list(self.prefs)
        c._own0 = False
        self._own0 = False
        c.n, c.m, c.t = self.n, self.m, self.t
        c.remaining = self.remaining[:]
        c.stamp = self.stamp[:]
        c.eaters = self.eaters[:]
        c.gone = self.gone[:]
        c.version = self.version[:]
        c.heap = self.heap[:]
        c.ptr = self.ptr[:]
        c.target = self.target[:]
        c.arrived = self.arrived[:]
        c.est = self.est[:]
        c.got0 = dict(self.got0)
        c.full = False
        c.eaten, c.segments, c.events = [], None, None
        return c

    def share0(self, house: int) -> Fraction:
        """Agent 0's share of ``house`` so far (final once agent 0 left it)."""
        got = self.got0.get(house, ZERO)
        if self.target[0] == house:
            got += self.t - self.arrived[0]
        return got

    def row0(self) -> list[Fraction]:
        return [self.share0(h) for h in range(self.m)]

    def remaining_now(self, house: int) -> Fraction:
        k = self.eaters[house]
        if not k:
            return self.remaining[house]
        return self.remaining[house] - k * (self.t - self.stamp[house])

    def first_to_start(self, candidates: Iterable[int], rank: Sequence[int]) -> int | None:
        """First house of ``candidates`` by (eating start time, ``rank``).

        Uses a throw-away copy when none of the candidates has started yet;
        houses that never start sort last.
        """
        cands = list(candidates)
        if not cands:
            return None
        started = [c for c in cands if self.est[c] is not None]
        if not started:
            probe = self.fork()
            while True:
                if not probe.advance():
                    return min(cands, key=rank.__getitem__)
                started = [c for c in cands if probe.est[c] is not None]
                if started:
                    est = probe.est
                    break
        else:
            est = self.est
        return min(started, key=lambda c: (est[c], rank[c]))


@dataclass(frozen=True)
class EatingTrace:
    """What happened during one PS run.

    ``start`` maps houses to eating start times (absent if never eaten),
    ``events`` lists exhaustion batches in time order and ``segments`` holds
    one ``(agent, house, begin, end)`` tuple per continuous eating interval.
    """

    start: dict
    events: tuple
    segments: tuple
    consumption: dict

    @property
    def end_time(self) -> Fraction:
        return self.events[-1][0] if self.events else ZERO

    def agent_segments(self, agent: int) -> list[tuple[int, Fraction, Fraction]]:
        return [(h, b, e) for a, h, b, e in self.segments if a == agent]


def simulate(problem: AssignmentProblem, full: bool = True) -> Eating:
    sim = Eating(problem.prefs, problem.m, full=full)
    sim.run()
    return sim


def ps(problem: AssignmentProblem) -> tuple[FractionalAssignment, EatingTrace]:
    """Run the probabilistic serial rule; return the assignment and its trace."""
    sim = simulate(problem, full=True)
    matrix = tuple(
        tuple(sim.eaten[a].get(h, ZERO) for h in range(problem.m)) for a in range(problem.n)
    )
    start = {h: t for h, t in enumerate(sim.est) if t is not None}
    consumption = {
        (a, h): x for a, row in enumerate(sim.eaten) for h, x in row.items() if x
    }
    trace = EatingTrace(start, tuple(sim.events), tuple(sim.segments), consumption)
    return FractionalAssignment(matrix), trace


def est(problem: AssignmentProblem) -> dict[int, Fraction]:
    """Eating start time of every house that somebody eats."""
    sim = simulate(problem, full=False)
    return {h: t for h, t in enumerate(sim.est) if t is not None}


def ps1(report: Sequence[int], problem: AssignmentProblem) -> tuple[Fraction, ...]:
    """Agent 0's row when it reports ``report`` and everybody else is unchanged."""
    report = tuple(report)
    if len(set(report)) != len(report):
        raise InstanceError("duplicate house in report")
    for h in report:
        if not 0 <= h < problem.m:
            raise InstanceError(f"unknown house {h!r}")
    sim = Eating([report] + list(problem.prefs[1:]), problem.m)
    sim.run_until_idle(0)
    return tuple(sim.row0())
