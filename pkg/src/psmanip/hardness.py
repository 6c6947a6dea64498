"""Instances of the EU best-response problem built from exactly-twice 3SAT.

The instance has 18 nearly disjoint copies ("parts") of one gadget.  Part 1
holds the manipulator (agent 0), parts 2..18 hold one dummy manipulator each,
and every part has two agents per literal.  In choice round r the
manipulator eats the two round-r houses of variable x_r; eating the house of
literal l first encodes "l is true".  A shared slowdown house per round keeps
all 18 manipulators in step.  In the final clause round the manipulator eats
the prize alone until some clause triplet is finished; that happens early
exactly when a clause is falsified.

Agents of a literal that was set true end the choice rounds 1/9 ahead of the
manipulator, agents of a false literal are in step with it.  A clause's
three houses are eaten by the agents of the negations of its literals, so a
falsified clause has all three eaters ahead and finishes 24/27 after the
manipulator starts the prize; any satisfied clause needs at least 25/27.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .core import AssignmentProblem, InstanceError, UtilityFunction, eu_value, format_rational
from .ps import Eating, ps1

PARTS = 18
ROUND_COST = Fraction(1, 2)
FIRST_BITE = Fraction(1, 3)
SECOND_BITE = Fraction(1, 9)
SLOWDOWN_BITE = Fraction(1, 18)
LEAD = Fraction(1, 9)
SOLO_FLOOR = Fraction(8, 9)
PRIZE_SHARE = Fraction(25, 27)
SYNC_VALUE_LIMIT = 16


@dataclass(frozen=True)
class Formula3SAT:
    """A CNF over variables 1..n; literals are signed ints as in DIMACS."""

    n: int
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        clauses = tuple(tuple(c) for c in self.clauses)
        object.__setattr__(self, "clauses", clauses)
        if self.n < 1:
            raise InstanceError("a formula needs at least one variable")
        for c in clauses:
            if len(c) != 3:
                raise InstanceError(f"clause {c} does not have three literals")
            for lit in c:
                if lit == 0 or abs(lit) > self.n:
                    raise InstanceError(f"literal {lit} outside variables 1..{self.n}")
        counts = self.literal_counts()
        for lit in sorted(counts, key=lambda x: (abs(x), x < 0)):
            if counts[lit] != 2:
                raise InstanceError(
                    f"literal {lit} occurs {counts[lit]} times; each literal must occur exactly twice"
                )

    def literal_counts(self) -> dict[int, int]:
        counts = {lit: 0 for v in range(1, self.n + 1) for lit in (v, -v)}
        for c in self.clauses:
            for lit in c:
                counts[lit] += 1
        return counts

    def satisfied_by(self, assignment: Sequence[bool]) -> bool:
        return all(any(assignment[abs(l) - 1] == (l > 0) for l in c) for c in self.clauses)

    def is_satisfiable(self) -> bool:
        return any(self.satisfied_by(a) for a in itertools.product((True, False), repeat=self.n))

    @classmethod
    def from_dimacs(cls, text: str) -> "Formula3SAT":
        n = None
        lits: list[int] = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("c"):
                continue
            if line.startswith("%"):
                break
            if line.startswith("p"):
                parts = line.split()
                if len(parts) < 4 or parts[1] != "cnf":
                    raise InstanceError(f"bad problem line: {line!r}")
                n = int(parts[2])
                continue
            lits.extend(int(tok) for tok in line.split())
        clauses, cur = [], []
        for lit in lits:
            if lit == 0:
                clauses.append(tuple(cur))
                cur = []
            else:
                cur.append(lit)
        if cur:
            clauses.append(tuple(cur))
        if n is None:
            n = max((abs(l) for c in clauses for l in c), default=0)
        return cls(n, tuple(clauses))

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.n} {len(self.clauses)}"]
        lines += [" ".join(str(l) for l in c) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"


def example_formula() -> Formula3SAT:
    """(x1 v x2 v x3)(~x1 v ~x2 v ~x3)(x1 v ~x2 v x3)(~x1 v x2 v ~x3)."""
    return Formula3SAT(3, ((1, 2, 3), (-1, -2, -3), (1, -2, 3), (-1, 2, -3)))


def random_exactly_twice(n: int, rng: random.Random) -> Formula3SAT:
    """Uniformly shuffle the 4n literal occurrences into clauses of three.

    Requires n divisible by 3 (4n occurrences must fill whole clauses).
    """
    if n < 1 or (4 * n) % 3:
        raise InstanceError(f"exactly-twice 3SAT needs 4n divisible by 3, got n={n}")
    occ = [lit for v in range(1, n + 1) for lit in (v, v, -v, -v)]
    rng.shuffle(occ)
    return Formula3SAT(n, tuple(tuple(occ[k : k + 3]) for k in range(0, len(occ), 3)))


@dataclass(frozen=True)
class ReductionParams:
    alpha: Fraction = Fraction(4)
    eps: Fraction | None = None
    negligible: Fraction | None = None
    bump: str = "negative"

    def resolved(self, n: int, n_houses: int) -> "ReductionParams":
        alpha = Fraction(self.alpha)
        if alpha <= 0:
            raise InstanceError("alpha must be positive")
        eps = Fraction(1, 2 ** (2 * n + 6)) if self.eps is None else Fraction(self.eps)
        neg = (
            Fraction(1) / (alpha**2 * n_houses**2)
            if self.negligible is None
            else Fraction(self.negligible)
        )
        if eps <= 0:
            raise InstanceError("eps must be positive")
        if self.bump not in ("negative", "positive"):
            raise InstanceError("bump must be 'negative' or 'positive'")
        return ReductionParams(alpha, eps, neg, self.bump)


@dataclass(frozen=True)
class ReductionInstance:
    formula: Formula3SAT
    params: ReductionParams
    problem: AssignmentProblem
    utility: UtilityFunction
    target: Fraction
    round_house: dict = field(repr=False)   # (part, round, literal) -> house
    clause_house: dict = field(repr=False)  # (part, clause, k) -> house
    slowdown: dict = field(repr=False)      # round -> house
    prize: int = 0
    consolation: dict = field(default_factory=dict, repr=False)  # part -> house
    literal_agent: dict = field(default_factory=dict, repr=False)  # (part, literal, k) -> agent
    dummy: dict = field(default_factory=dict, repr=False)  # part -> agent
    triplet_of: dict = field(default_factory=dict, repr=False)  # (part, literal, k) -> clause

    def bumped(self, r: int) -> int:
        """The literal of round r whose house carries the +eps utility."""
        return -r if self.params.bump == "negative" else r

    def head(self, agent: int) -> list[int]:
        """The part of an agent's list that precedes its tail."""
        return list(self.problem.prefs[agent][: self._head_len[agent]])

    @property
    def _head_len(self) -> dict:
        return self.__dict__["_heads"]


def _lit_name(lit: int) -> str:
    return f"x{lit}" if lit > 0 else f"~x{-lit}"


def _assign_triplets(formula: Formula3SAT) -> dict[tuple[int, int], int]:
    """(literal, copy k) -> clause index whose triplet that literal agent eats."""
    owner: dict[tuple[int, int], int] = {}
    for ci, clause in enumerate(formula.clauses):
        for lit in clause:
            neg = -lit
            k = 1 if (neg, 1) not in owner else 2
            owner[(neg, k)] = ci
    return owner


def reduce_3sat(formula: Formula3SAT, params: ReductionParams | None = None) -> ReductionInstance:
    """Build the 18-part EU best-response instance for ``formula``."""
    params = params or ReductionParams()
    n = formula.n
    lits = [lit for v in range(1, n + 1) for lit in (v, -v)]
    names: list[str] = []

    def new_house(name: str) -> int:
        names.append(name)
        return len(names) - 1

    # ids: slowdowns, parts 2..18, part 1, prize -- tails follow id order, so the
    # manipulator's part and the prize come last in every rival's tail
    slowdown = {r: new_house(f"s{r}") for r in range(1, n)}
    round_house, clause_house, consolation = {}, {}, {}
    for part in list(range(2, PARTS + 1)) + [1]:
        for r in range(1, n + 1):
            for lit in lits:
                round_house[(part, r, lit)] = new_house(f"r{r}:{_lit_name(lit)}@{part}")
        for ci in range(len(formula.clauses)):
            for k in (1, 2, 3):
                clause_house[(part, ci, k)] = new_house(f"c{ci + 1}.{k}@{part}")
        if part != 1:
            consolation[part] = new_house(f"cp@{part}")
    prize = new_house("prize")
    m = len(names)
    p = params.resolved(n, m)
    bumped = (lambda r: -r) if p.bump == "negative" else (lambda r: r)

    def manipulator_head(part: int, top: int) -> list[int]:
        head = []
        for r in range(1, n + 1):
            b = bumped(r)
            head += [round_house[(part, r, b)], round_house[(part, r, -b)]]
            if r < n:
                head.append(slowdown[r])
        return head + [top]

    agents: list[str] = ["1"]
    heads: list[list[int]] = [manipulator_head(1, prize)]
    dummy = {}
    for part in range(2, PARTS + 1):
        dummy[part] = len(agents)
        agents.append(f"dummy@{part}")
        heads.append(manipulator_head(part, consolation[part]))
    triplets = _assign_triplets(formula)
    literal_agent, triplet_of = {}, {}
    for part in range(1, PARTS + 1):
        top = prize if part == 1 else consolation[part]
        for lit in lits:
            for k in (1, 2):
                ci = triplets[(lit, k)]
                literal_agent[(part, lit, k)] = len(agents)
                triplet_of[(part, lit, k)] = ci
                agents.append(f"a{k}:{_lit_name(lit)}@{part}")
                head = [round_house[(part, r, lit)] for r in range(1, n + 1)]
                head += [clause_house[(part, ci, j)] for j in (1, 2, 3)]
                heads.append(head + [top])

    prefs = []
    for head in heads:
        listed = set(head)
        prefs.append(tuple(head) + tuple(h for h in range(m) if h not in listed))
    problem = AssignmentProblem(tuple(prefs), m, tuple(agents), tuple(names))

    values = [p.negligible] * m
    values[prize] = Fraction(1)
    for r in range(1, n + 1):
        base = (2 * p.alpha) ** (2 * (n - r))
        b = bumped(r)
        values[round_house[(1, r, b)]] = base + p.eps
        values[round_house[(1, r, -b)]] = base
        if r < n:
            values[slowdown[r]] = (2 * p.alpha) ** (2 * (n - r - 1) + 1)
    small = sum(v for v in values if v == p.negligible) if p.negligible else Fraction(0)
    if small >= 1 / p.alpha:
        raise InstanceError("negligible utilities add up to 1/alpha or more")
    utility = UtilityFunction(tuple(values), tuple(names))

    inst = ReductionInstance(
        formula, p, problem, utility, Fraction(0), round_house, clause_house, slowdown,
        prize, consolation, literal_agent, dummy, triplet_of,
    )
    inst.__dict__["_heads"] = {a: len(h) for a, h in enumerate(heads)}
    object.__setattr__(inst, "target", target_utility(inst))
    return inst


def target_utility(inst: ReductionInstance) -> Fraction:
    """4/9 of each positive round house, 1/18 of each slowdown house, plus 25/27."""
    u = inst.utility
    n = inst.formula.n
    total = PRIZE_SHARE
    for r in range(1, n + 1):
        total += Fraction(4, 9) * u[inst.round_house[(1, r, r)]]
        if r < n:
            total += SLOWDOWN_BITE * u[inst.slowdown[r]]
    return total


def prescribed_report(inst: ReductionInstance, assignment: Sequence[bool]) -> list[int]:
    """Per round: the house of the literal made true, its negation, the slowdown; then the prize."""
    n = inst.formula.n
    if len(assignment) != n:
        raise InstanceError(f"assignment must cover all {n} variables")
    report = []
    for r in range(1, n + 1):
        first = r if assignment[r - 1] else -r
        report += [inst.round_house[(1, r, first)], inst.round_house[(1, r, -first)]]
        if r < n:
            report.append(inst.slowdown[r])
    report.append(inst.prize)
    return report


def evaluate_assignment(inst: ReductionInstance, assignment: Sequence[bool]) -> tuple[Fraction, bool]:
    """Manipulator's exact expected utility under prescribed play, and whether it reaches T."""
    row = ps1(prescribed_report(inst, assignment), inst.problem)
    value = eu_value(row, inst.utility)
    return value, value >= inst.target


@dataclass
class TimingReport:
    round_costs: list
    bites: list
    leads: dict
    prize_start: Fraction
    solo_prize_time: Fraction
    decision_values: set
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures


def timing_audit(inst: ReductionInstance, assignment: Sequence[bool]) -> TimingReport:
    """Check the synchronisation claims of the construction on one prescribed run.

    Failures are reported as readable strings naming the agent group and the
    offending time difference.
    """
    report = prescribed_report(inst, assignment)
    prob = inst.problem.with_report(report)
    sim = Eating(prob.prefs, prob.m, full=True)
    values: set = set()

    def note_decision():
        here = sim.target[0]
        for h in range(prob.m):
            k = sim.eaters[h]
            if k and h != here:
                values.add(sim.remaining_now(h) / (k + (0 if here == h else 1)))

    note_decision()
    while True:
        before = sim.target[0]
        if not sim.advance():
            break
        if sim.target[0] != before and sim.target[0] is not None:
            note_decision()

    n = inst.formula.n
    failures: list[str] = []
    mine = [(h, b, e) for a, h, b, e in sim.segments if a == 0]
    spent = {h: e - b for h, b, e in mine}
    started = {h: b for h, b, e in mine}
    round_costs, bites = [], []
    for r in range(1, n + 1):
        first = r if assignment[r - 1] else -r
        houses = [inst.round_house[(1, r, first)], inst.round_house[(1, r, -first)]]
        if r < n:
            houses.append(inst.slowdown[r])
        got = [spent.get(h, Fraction(0)) for h in houses]
        want = [FIRST_BITE, SECOND_BITE, SLOWDOWN_BITE][: len(houses)]
        bites.append(got)
        round_costs.append(sum(got))
        if got != want:
            failures.append(
                f"manipulator, round {r}: bites {[format_rational(x) for x in got]}, "
                f"expected {[format_rational(x) for x in want]}"
            )
        if r < n and sum(got) != ROUND_COST:
            failures.append(
                f"manipulator, round {r}: cost {format_rational(sum(got))}, expected 1/2"
            )

    t0 = started.get(inst.prize)
    if t0 is None:
        failures.append("manipulator never reached the prize house")
        return TimingReport(round_costs, bites, {}, Fraction(0), Fraction(0), values, failures)

    clause_start: dict[int, Fraction] = {}
    others_on_prize = []
    clause_houses = {inst.clause_house[(1, ci, 1)] for ci in range(len(inst.formula.clauses))}
    for a, h, b, e in sim.segments:
        if h in clause_houses and (a not in clause_start or b < clause_start[a]):
            clause_start[a] = b
        if h == inst.prize and a != 0:
            others_on_prize.append(b)
    leads = {}
    for (part, lit, k), agent in inst.literal_agent.items():
        if part != 1:
            continue
        made_true = assignment[abs(lit) - 1] == (lit > 0)
        lead = t0 - clause_start[agent]
        leads[agent] = lead
        want = LEAD if made_true else Fraction(0)
        if lead != want:
            group = "true-literal agents" if made_true else "false-literal agents"
            failures.append(
                f"{group}: {prob.agents[agent]} leads the manipulator by "
                f"{format_rational(lead)}, expected {format_rational(want)}"
            )
    solo = (min(others_on_prize) if others_on_prize else sim.t) - t0
    if solo < SOLO_FLOOR:
        failures.append(
            f"prize eaters: manipulator ate alone for {format_rational(solo)}, at least 8/9 expected"
        )
    sat = inst.formula.satisfied_by(assignment)
    if sat and solo < PRIZE_SHARE:
        failures.append(
            f"prize eaters: satisfied formula but solo time {format_rational(solo)} < 25/27"
        )
    if not sat and solo >= PRIZE_SHARE:
        failures.append(
            f"prize eaters: falsified clause but solo time {format_rational(solo)} >= 25/27"
        )
    if len(values) > SYNC_VALUE_LIMIT:
        failures.append(
            f"decision points: {len(values)} distinct join times, at most {SYNC_VALUE_LIMIT} expected"
        )
    return TimingReport(round_costs, bites, leads, t0, solo, values, failures)


@dataclass
class SweepResult:
    formula: Formula3SAT
    alpha: Fraction
    eps: Fraction
    target: Fraction
    rows: list  # (assignment, utility, reaches, satisfies)
    satisfiable: bool

    @property
    def reachable(self) -> bool:
        return any(reaches for _, _, reaches, _ in self.rows)

    @property
    def equivalent(self) -> bool:
        """(some assignment reaches T) iff the formula is satisfiable."""
        return self.reachable == self.satisfiable

    @property
    def pointwise(self) -> bool:
        """Every assignment reaches T exactly when it satisfies the formula."""
        return all(reaches == sat for _, _, reaches, sat in self.rows)


def sweep(formula: Formula3SAT, params: ReductionParams | None = None) -> SweepResult:
    """Evaluate prescribed play for all 2^n assignments."""
    inst = reduce_3sat(formula, params)
    rows = []
    for assignment in itertools.product((True, False), repeat=formula.n):
        value, reaches = evaluate_assignment(inst, assignment)
        rows.append((assignment, value, reaches, formula.satisfied_by(assignment)))
    return SweepResult(
        formula, inst.params.alpha, inst.params.eps, inst.target, rows, formula.is_satisfiable()
    )


def verify_reduction(
    formula: Formula3SAT, params: ReductionParams | None = None, max_doublings: int = 6
) -> SweepResult:
    """Run the sweep, doubling alpha until it agrees with the truth table (or giving up)."""
    params = params or ReductionParams()
    result = sweep(formula, params)
    for _ in range(max_doublings):
        if result.equivalent and result.pointwise:
            break
        params = ReductionParams(params.alpha * 2, params.eps, params.negligible, params.bump)
        result = sweep(formula, params)
    return result
