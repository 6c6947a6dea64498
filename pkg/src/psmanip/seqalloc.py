"""Sequential allocation, the half-house reduction and the two-agent EU best response.

With two agents, PS gives every agent 0, 1/2 or 1 of each house, and the PS
outcome equals half the outcome of alternating picking over "half-houses"
(each house split into a first and a second half).  Manipulating PS therefore
reduces to manipulating alternating picking, where the best achievable bundle
is found by growing a target set one object at a time.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import AssignmentProblem, FractionalAssignment, InstanceError
from .ps import ps


@dataclass(frozen=True)
class SAInstance:
    """Agents pick in the order given by ``policy``.

    ``prefs[a]`` is a strict (possibly partial) order of object ids.  ``weak0``
    optionally records the manipulator's weak order as a list of indifference
    tiers; ``prefs[0]`` is then one linearisation of it.
    """

    n_objects: int
    prefs: tuple[tuple[int, ...], ...]
    policy: tuple[int, ...]
    objects: tuple[str, ...] = ()
    weak0: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        m = self.n_objects
        prefs = tuple(tuple(p) for p in self.prefs)
        for a, p in enumerate(prefs):
            if len(set(p)) != len(p) or any(not 0 <= o < m for o in p):
                raise InstanceError(f"agent {a}: invalid object list")
        policy = tuple(self.policy)
        if len(policy) != m or any(not 0 <= a < len(prefs) for a in policy):
            raise InstanceError("policy must name an agent for each of the m' turns")
        object.__setattr__(self, "prefs", prefs)
        object.__setattr__(self, "policy", policy)
        objects = tuple(self.objects) or tuple(f"o{k + 1}" for k in range(m))
        object.__setattr__(self, "objects", objects)
        if self.weak0 is not None:
            tiers = tuple(tuple(t) for t in self.weak0)
            flat = [o for t in tiers for o in t]
            if sorted(flat) != sorted(set(flat)) or any(not 0 <= o < m for o in flat):
                raise InstanceError("weak order tiers must be disjoint object sets")
            object.__setattr__(self, "weak0", tiers)

    @property
    def n(self) -> int:
        return len(self.prefs)

    def with_report(self, report: Sequence[int]) -> "SAInstance":
        return SAInstance(
            self.n_objects, (tuple(report),) + self.prefs[1:], self.policy, self.objects, self.weak0
        )


@dataclass(frozen=True)
class DiscreteAssignment:
    """``owner[o]`` is the agent holding object o, or None."""

    owner: tuple[int | None, ...]

    def bundle(self, agent: int) -> frozenset[int]:
        return frozenset(o for o, a in enumerate(self.owner) if a == agent)


def alternating_policy(m: int, n: int = 2) -> tuple[int, ...]:
    return tuple(k % n for k in range(m))


def sequential_allocation(inst: SAInstance) -> DiscreteAssignment:
    """Each turn, the agent on move takes its best listed unallocated object (if any)."""
    owner: list[int | None] = [None] * inst.n_objects
    ptr = [0] * inst.n
    for a in inst.policy:
        lst = inst.prefs[a]
        i = ptr[a]
        while i < len(lst) and owner[lst[i]] is not None:
            i += 1
        if i < len(lst):
            owner[lst[i]] = a
            i += 1
        ptr[a] = i
    return DiscreteAssignment(tuple(owner))


@dataclass(frozen=True)
class HalfHouseMap:
    """House ``j`` becomes objects ``2j`` (first half) and ``2j + 1`` (second half)."""

    m: int

    def halves(self, house: int) -> tuple[int, int]:
        return 2 * house, 2 * house + 1

    @staticmethod
    def house_of(obj: int) -> int:
        return obj // 2

    def induced(self, pref: Sequence[int]) -> tuple[int, ...]:
        return tuple(o for h in pref for o in (2 * h, 2 * h + 1))

    def project(self, objects: Sequence[int]) -> tuple[int, ...]:
        """House order by first appearance of either half."""
        seen: dict[int, None] = {}
        for o in objects:
            seen.setdefault(o // 2, None)
        return tuple(seen)

    def is_consecutive(self, objects: Sequence[int]) -> bool:
        objs = list(objects)
        for k, o in enumerate(objs):
            if o % 2 == 0 and o + 1 in objs and (k + 1 >= len(objs) or objs[k + 1] != o + 1):
                return False
            if o % 2 == 1 and o - 1 in objs and (k == 0 or objs[k - 1] != o - 1):
                return False
        return True

    def average(self, assignment: DiscreteAssignment, n: int = 2) -> FractionalAssignment:
        half = Fraction(1, 2)
        rows = []
        for a in range(n):
            row = []
            for h in range(self.m):
                o1, o2 = self.halves(h)
                row.append(half * ((assignment.owner[o1] == a) + (assignment.owner[o2] == a)))
            rows.append(tuple(row))
        return FractionalAssignment(tuple(rows))


def _require_two(problem: AssignmentProblem) -> None:
    if problem.n != 2:
        raise InstanceError(f"two agents required, got {problem.n}")
    if any(len(p) != problem.m for p in problem.prefs):
        raise InstanceError("both agents need complete preference lists")


def half_house_reduction(problem: AssignmentProblem) -> tuple[SAInstance, HalfHouseMap]:
    """Alternating picking over half-houses for a two-agent PS problem."""
    _require_two(problem)
    hmap = HalfHouseMap(problem.m)
    names = tuple(f"{h}^{k}" for h in problem.houses for k in (1, 2))
    inst = SAInstance(
        2 * problem.m,
        tuple(hmap.induced(p) for p in problem.prefs),
        alternating_policy(2 * problem.m),
        names,
    )
    return inst, hmap


def _check_alternating(inst: SAInstance) -> None:
    if inst.n != 2:
        raise InstanceError("only two agents are supported")
    if inst.policy != alternating_policy(inst.n_objects):
        raise InstanceError("only the alternating policy 1212... is supported")
    if len(inst.prefs[1]) != inst.n_objects:
        raise InstanceError("the second agent needs a complete strict order")


def _linear_order(inst: SAInstance, tie_break: Sequence[int] | None) -> list[int]:
    """The manipulator's order with indifferences resolved."""
    if inst.weak0 is None:
        return list(inst.prefs[0])
    if tie_break is None:
        tie_break = inst.prefs[1]
    pos = {o: k for k, o in enumerate(tie_break)}
    return [o for tier in inst.weak0 for o in sorted(tier, key=lambda o: pos.get(o, len(pos)))]


def achievable(inst: SAInstance, targets) -> list[int] | None:
    """Can agent 0 secure every object of ``targets`` under alternating picking?

    Agent 0 always takes the outstanding target its opponent ranks highest.
    Returns the order in which the targets were taken, or None.
    """
    rival = inst.prefs[1]
    want = [o for o in rival if o in targets]
    if len(want) != len(targets):
        raise InstanceError("targets must be objects the opponent ranks")
    taken = [False] * inst.n_objects
    got = []
    k = r = 0
    while k < len(want):
        # agent 0's turn
        if taken[want[k]]:
            return None
        taken[want[k]] = True
        got.append(want[k])
        k += 1
        # opponent: best free object
        while r < len(rival) and taken[rival[r]]:
            r += 1
        if r < len(rival):
            taken[rival[r]] = True
    return got


def target_sets(inst: SAInstance, tie_break: Sequence[int] | None = None) -> list[frozenset[int]]:
    """``T_0 = {}``, then ``T_k`` adds the k-th object of agent 0's order whenever achievable."""
    _check_alternating(inst)
    order = _linear_order(inst, tie_break)
    current: frozenset[int] = frozenset()
    out = [current]
    for o in order:
        trial = current | {o}
        if achievable(inst, trial) is not None:
            current = trial
        out.append(current)
    return out


def sa_best_response_2(
    inst: SAInstance, tie_break: Sequence[int] | None = None
) -> tuple[tuple[int, ...], DiscreteAssignment]:
    """Agent 0's optimal report for two-agent alternating picking and its outcome.

    Indifferences in ``inst.weak0`` are broken by ``tie_break`` (default: the
    opponent's order).  The report lists the optimal target set in the order
    the opponent ranks it, then every other object in agent 0's order.
    """
    final = target_sets(inst, tie_break)[-1]
    order = _linear_order(inst, tie_break)
    secured = achievable(inst, final) or []
    report = tuple(secured) + tuple(o for o in order if o not in final)
    report += tuple(o for o in range(inst.n_objects) if o not in report)
    outcome = sequential_allocation(inst.with_report(report))
    if outcome.bundle(0) != final:
        raise AssertionError("report does not realise the optimal target set")
    return report, outcome


def consecutive_report(problem: AssignmentProblem, halves_won: Sequence[int]) -> tuple[int, ...]:
    """House order for agent 0 that wins ``halves_won[h]`` halves of every house h.

    Two PS eaters move in lock step: each round the opponent starts its best
    remaining house ``b``.  If agent 0 is owed one half of ``b`` it joins
    ``b``; if it is owed nothing of ``b`` it eats the house it is owed in full
    that the opponent ranks highest.  Houses owed in full must never become the
    opponent's top choice.
    """
    _require_two(problem)
    rival = problem.prefs[1]
    rrank = {h: k for k, h in enumerate(rival)}
    full = sorted((h for h in range(problem.m) if halves_won[h] == 2), key=rrank.__getitem__)
    free = [True] * problem.m
    order: list[int] = []
    r = f = 0
    while True:
        while r < len(rival) and not free[rival[r]]:
            r += 1
        if r == len(rival):
            break
        b = rival[r]
        if halves_won[b] == 1:
            order.append(b)
            free[b] = False
        elif halves_won[b] == 0:
            while f < len(full) and not free[full[f]]:
                f += 1
            if f == len(full):
                raise InstanceError("target bundle is not realisable by a house order")
            order.append(full[f])
            free[full[f]] = free[b] = False
        else:
            raise InstanceError("target bundle is not realisable by a house order")
    rest = [h for h in problem.prefs[0] if h not in order]
    return tuple(order) + tuple(rest)


def eu_best_response_2(
    problem: AssignmentProblem, true_pref: Sequence[int] | None = None
) -> tuple[tuple[int, ...], FractionalAssignment]:
    """Report of agent 0 maximising expected utility for every utility consistent with
    its ordinal preference, in a two-agent PS problem, and the resulting PS outcome.

    The optimal bundle comes from the target-set construction on the half-house
    instance in which agent 0 is indifferent between the two halves of a house.
    """
    if problem.n != 2:
        raise InstanceError(f"two agents required, got {problem.n}")
    truth = tuple(problem.prefs[0] if true_pref is None else true_pref)
    if sorted(truth) != list(range(problem.m)) or len(problem.prefs[1]) != problem.m:
        raise InstanceError("complete strict preferences are required")
    problem = problem.with_report(truth)
    inst, hmap = half_house_reduction(problem)
    inst = SAInstance(
        inst.n_objects,
        inst.prefs,
        inst.policy,
        inst.objects,
        weak0=tuple(hmap.halves(h) for h in truth),
    )
    _, outcome = sa_best_response_2(inst)
    bundle = outcome.bundle(0)
    won = [sum(o in bundle for o in hmap.halves(h)) for h in range(problem.m)]
    houses = consecutive_report(problem, won)
    image = hmap.induced(houses)
    check = sequential_allocation(inst.with_report(image)).bundle(0)
    if sorted(o // 2 for o in check) != sorted(o // 2 for o in bundle):
        raise AssertionError("house order does not realise the optimal bundle")
    alloc, _ = ps(problem.with_report(houses))
    if tuple(alloc[0]) != tuple(hmap.average(outcome)[0]):
        raise AssertionError("PS outcome differs from the half-house bundle")
    return houses, alloc
