"""JSON instance files.

An instance file looks like::

    {
      "agents": ["1", "2", "3"],
      "houses": ["h1", "h2", "h3"],
      "prefs": [["h1", "h2", "h3"], ["h2", "h1", "h3"], ["h2", "h3", "h1"]],
      "utilities": {"h1": "7", "h2": "6", "h3": "0"},
      "target": "11/2"
    }

Without ``houses`` the house set is every name in ``prefs``, in order of
first appearance; ``agents`` defaults to "1", "2", ...  Utilities are optional.  A flat house->value mapping (or a list in house
order) belongs to the manipulator, the first agent; several agents' utilities
go in a mapping keyed by agent name.  Every number is an exact rational ("p/q" strings or
integers); floats are rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .core import AssignmentProblem, InstanceError, UtilityFunction, as_rational, format_rational


@dataclass(frozen=True)
class Instance:
    problem: AssignmentProblem
    utilities: dict = field(default_factory=dict)  # agent index -> UtilityFunction
    target: Fraction | None = None
    extra: dict = field(default_factory=dict)


def _utility(problem: AssignmentProblem, raw) -> UtilityFunction:
    if isinstance(raw, dict):
        return UtilityFunction.from_mapping(problem.houses, raw)
    if isinstance(raw, list):
        if len(raw) != problem.m:
            raise InstanceError(f"utility list has {len(raw)} entries for {problem.m} houses")
        return UtilityFunction(tuple(as_rational(v) for v in raw), problem.houses)
    raise InstanceError("a utility must be a mapping or a list")


def instance_from_dict(data: dict) -> Instance:
    if "prefs" not in data:
        raise InstanceError("instance needs a 'prefs' field")
    prefs = data["prefs"]
    houses = data.get("houses")
    if houses is None:
        houses = list(dict.fromkeys(h for lst in prefs for h in lst))
    agents = data.get("agents") or [str(i + 1) for i in range(len(prefs))]
    problem = AssignmentProblem.from_names(agents, houses, prefs)
    utilities = {}
    raw_u = data.get("utilities") or {}
    if isinstance(raw_u, list) or (raw_u and all(k in problem.houses for k in raw_u)):
        raw_u = {problem.agents[0]: raw_u}  # the manipulator's utilities, given flat
    for key, raw in raw_u.items():
        if key not in problem.agents:
            raise InstanceError(f"utility for unknown agent {key!r}")
        utilities[problem.agents.index(key)] = _utility(problem, raw)
    target = data.get("target")
    extra = {k: v for k, v in data.items() if k not in ("agents", "houses", "prefs", "utilities", "target")}
    return Instance(problem, utilities, None if target is None else as_rational(target), extra)


def instance_to_dict(inst: Instance) -> dict:
    p = inst.problem
    out: dict = {
        "agents": list(p.agents),
        "houses": list(p.houses),
        "prefs": [p.house_names(lst) for lst in p.prefs],
    }
    if set(inst.utilities) == {0}:
        u = inst.utilities[0]
        out["utilities"] = {p.houses[h]: format_rational(u[h]) for h in range(p.m)}
    elif inst.utilities:
        out["utilities"] = {
            p.agents[a]: {p.houses[h]: format_rational(u[h]) for h in range(p.m)}
            for a, u in sorted(inst.utilities.items())
        }
    if inst.target is not None:
        out["target"] = format_rational(inst.target)
    out.update(inst.extra)
    return out


def load_instance(path) -> Instance:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from None
    return instance_from_dict(data)


def dump_instance(inst: Instance, path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(inst), indent=1) + "\n")
