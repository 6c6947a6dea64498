"""Assignment problems, fractional assignments and the SD / DL / EU relations.

Houses and agents are dense integer ids (``0..m-1`` and ``0..n-1``) with a
side table of display names.  Agent ``0`` is the manipulator throughout the
package.  Every quantity is an exact :class:`fractions.Fraction`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

Rational = Fraction
Row = Sequence[Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)


class InstanceError(ValueError):
    """Raised for malformed problems, rows, preference lists or utilities."""


class Comparison(enum.Enum):
    FIRST = "first-preferred"
    SECOND = "second-preferred"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"

    def flipped(self) -> "Comparison":
        if self is Comparison.FIRST:
            return Comparison.SECOND
        if self is Comparison.SECOND:
            return Comparison.FIRST
        return self


def as_rational(value) -> Fraction:
    """Parse ints, Fractions and ``"p/q"`` strings.  Floats are rejected."""
    if isinstance(value, bool):
        raise InstanceError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InstanceError(f"not a rational: {value!r}") from exc
    raise InstanceError(f"not an exact rational: {value!r}")


def format_rational(value: Fraction) -> str:
    """Canonical text form: ``"p/q"`` in lowest terms, bare integer when q == 1."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _check_list(lst, m: int, who: str) -> tuple[int, ...]:
    out = tuple(lst)
    for h in out:
        if isinstance(h, bool) or not isinstance(h, int) or not 0 <= h < m:
            raise InstanceError(f"{who}: unknown house {h!r}")
    if len(set(out)) != len(out):
        raise InstanceError(f"{who}: duplicate house in preference list")
    return out


@dataclass(frozen=True)
class AssignmentProblem:
    """Agents, houses and strict ordinal preferences.

    ``prefs[0]`` (the manipulator) may be any duplicate-free sublist of the
    houses; every other agent must rank all houses.
    """

    prefs: tuple[tuple[int, ...], ...]
    m: int
    agents: tuple[str, ...] = ()
    houses: tuple[str, ...] = ()

    def __post_init__(self):
        m = self.m
        if m < 0:
            raise InstanceError("negative house count")
        prefs = tuple(
            _check_list(lst, m, f"agent {i}") for i, lst in enumerate(self.prefs)
        )
        for i, lst in enumerate(prefs[1:], start=1):
            if len(lst) != m:
                raise InstanceError(f"agent {i}: preference list must rank all {m} houses")
        object.__setattr__(self, "prefs", prefs)
        agents = tuple(self.agents) or tuple(str(i + 1) for i in range(len(prefs)))
        houses = tuple(self.houses) or tuple(f"h{j + 1}" for j in range(m))
        if len(agents) != len(prefs):
            raise InstanceError("agent names do not match preference lists")
        if len(houses) != m:
            raise InstanceError("house names do not match house count")
        if len(set(houses)) != m or len(set(agents)) != len(agents):
            raise InstanceError("duplicate agent or house name")
        object.__setattr__(self, "agents", agents)
        object.__setattr__(self, "houses", houses)

    @property
    def n(self) -> int:
        return len(self.prefs)

    @classmethod
    def from_names(
        cls,
        agents: Sequence[str],
        houses: Sequence[str],
        prefs: Sequence[Sequence[str]],
    ) -> "AssignmentProblem":
        index = {name: j for j, name in enumerate(houses)}
        if len(index) != len(houses):
            raise InstanceError("duplicate house name")
        if len(prefs) != len(agents):
            raise InstanceError("one preference list per agent is required")
        lists = []
        for who, lst in zip(agents, prefs):
            try:
                lists.append(tuple(index[h] for h in lst))
            except KeyError as exc:
                raise InstanceError(f"agent {who}: unknown house {exc.args[0]!r}") from None
        return cls(tuple(lists), len(houses), tuple(agents), tuple(houses))

    @classmethod
    def from_lists(cls, prefs: Sequence[Sequence[int]], m: int | None = None):
        """Build from 0-based id lists; ``m`` defaults to the longest list."""
        if m is None:
            m = max((len(p) for p in prefs), default=0)
        return cls(tuple(tuple(p) for p in prefs), m)

    def with_report(self, report: Sequence[int]) -> "AssignmentProblem":
        """The same problem with the manipulator reporting ``report``."""
        return AssignmentProblem(
            (tuple(report),) + self.prefs[1:], self.m, self.agents, self.houses
        )

    def house_ids(self, names: Sequence[str]) -> tuple[int, ...]:
        index = {name: j for j, name in enumerate(self.houses)}
        try:
            return tuple(index[h] for h in names)
        except KeyError as exc:
            raise InstanceError(f"unknown house {exc.args[0]!r}") from None

    def house_names(self, ids: Sequence[int]) -> list[str]:
        return [self.houses[h] for h in ids]


def as_manipulator(problem: AssignmentProblem, agent: int) -> AssignmentProblem:
    """Swap ``agent`` into position 0 so the manipulation tools apply to it.

    Row ``agent`` of the result corresponds to row ``0`` of the original.
    All lists must be complete.
    """
    if not 0 <= agent < problem.n:
        raise InstanceError(f"no agent {agent}")
    if any(len(p) != problem.m for p in problem.prefs):
        raise InstanceError("relabeling requires complete preference lists")
    order = list(range(problem.n))
    order[0], order[agent] = order[agent], order[0]
    return AssignmentProblem(
        tuple(problem.prefs[a] for a in order),
        problem.m,
        tuple(problem.agents[a] for a in order),
        problem.houses,
    )


@dataclass(frozen=True)
class FractionalAssignment:
    """An n x m matrix of exact shares; ``matrix[i][h]`` is agent i's share of h."""

    matrix: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(Fraction(x) for x in row) for row in self.matrix)
        object.__setattr__(self, "matrix", rows)

    def __getitem__(self, agent: int) -> tuple[Fraction, ...]:
        return self.matrix[agent]

    def __len__(self) -> int:
        return len(self.matrix)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.matrix), (len(self.matrix[0]) if self.matrix else 0)

    def column_sums(self) -> list[Fraction]:
        _, m = self.shape
        return [sum((row[j] for row in self.matrix), ZERO) for j in range(m)]

    def row_sums(self) -> list[Fraction]:
        return [sum(row, ZERO) for row in self.matrix]

    def check(self, complete: bool = False) -> None:
        """Raise :class:`InstanceError` if the matrix is not feasible.

        With ``complete=True`` also require unit columns and equal rows m/n.
        """
        n, m = self.shape
        for row in self.matrix:
            for x in row:
                if not ZERO <= x <= ONE:
                    raise InstanceError(f"share {x} outside [0, 1]")
        for j, s in enumerate(self.column_sums()):
            if s > ONE or (complete and s != ONE):
                raise InstanceError(f"column {j} sums to {s}")
        if complete and n:
            want = Fraction(m, n)
            for i, s in enumerate(self.row_sums()):
                if s != want:
                    raise InstanceError(f"row {i} sums to {s}, expected {want}")

    def to_lists(self) -> list[list[str]]:
        return [[format_rational(x) for x in row] for row in self.matrix]


@dataclass(frozen=True)
class UtilityFunction:
    """Cardinal utilities of one agent, indexed by house id."""

    values: tuple[Fraction, ...]
    names: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(as_rational(v) for v in self.values))

    def __getitem__(self, house: int) -> Fraction:
        return self.values[house]

    def __len__(self) -> int:
        return len(self.values)

    @classmethod
    def from_mapping(cls, houses: Sequence[str], mapping: Mapping[str, object]):
        missing = [h for h in houses if h not in mapping]
        if missing:
            raise InstanceError(f"missing utility for house {missing[0]!r}")
        unknown = set(mapping) - set(houses)
        if unknown:
            raise InstanceError(f"utility for unknown house {sorted(unknown)[0]!r}")
        return cls(tuple(as_rational(mapping[h]) for h in houses), tuple(houses))

    def is_consistent(self, pref: Sequence[int], strict: bool = True) -> bool:
        """True iff utilities decrease along ``pref`` (weakly if not strict)."""
        vals = [self.values[h] for h in pref]
        if strict:
            return all(a > b for a, b in zip(vals, vals[1:]))
        return all(a >= b for a, b in zip(vals, vals[1:]))


def _check_rows(p_row: Row, q_row: Row, pref: Sequence[int]) -> None:
    if len(p_row) != len(q_row):
        raise InstanceError("rows index different house sets")
    if sorted(pref) != list(range(len(p_row))):
        raise InstanceError("preference is not a complete order on the row's houses")


def sd_compare(p_row: Row, q_row: Row, pref: Sequence[int]) -> Comparison:
    """Stochastic-dominance comparison of two allocations along ``pref``."""
    _check_rows(p_row, q_row, pref)
    if tuple(p_row) == tuple(q_row):
        return Comparison.EQUAL
    sp = sq = ZERO
    ge = le = True
    for h in pref:
        sp += p_row[h]
        sq += q_row[h]
        if sp < sq:
            ge = False
        elif sp > sq:
            le = False
    if ge and not le:
        return Comparison.FIRST
    if le and not ge:
        return Comparison.SECOND
    if ge and le:
        # identical prefix sums force identical rows
        return Comparison.EQUAL
    return Comparison.INCOMPARABLE


def dl_compare(p_row: Row, q_row: Row, pref: Sequence[int]) -> Comparison:
    """Downward-lexicographic comparison: the best house where the rows differ decides."""
    _check_rows(p_row, q_row, pref)
    for h in pref:
        if p_row[h] != q_row[h]:
            return Comparison.FIRST if p_row[h] > q_row[h] else Comparison.SECOND
    return Comparison.EQUAL


def eu_value(p_row: Row, u) -> Fraction:
    """Expected utility ``sum_h u(h) * p(h)``, exact."""
    values = u.values if isinstance(u, UtilityFunction) else tuple(u)
    if len(values) < len(p_row):
        raise InstanceError("utility function does not cover every house of the row")
    total = ZERO
    for x, v in zip(p_row, values):
        if x:
            total += Fraction(v) * x
    return total


def eu_compare(p_row: Row, q_row: Row, u) -> Comparison:
    a, b = eu_value(p_row, u), eu_value(q_row, u)
    if a > b:
        return Comparison.FIRST
    if a < b:
        return Comparison.SECOND
    return Comparison.EQUAL
