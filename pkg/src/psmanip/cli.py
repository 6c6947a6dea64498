"""Command-line entry point: ``psmanip <command> ...`` (or ``python -m psmanip``)."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .core import InstanceError, as_manipulator, as_rational, eu_value, format_rational
from .dlbr import dl_best_response
from .experiments import ExperimentConfig, run_experiment
from .hardness import Formula3SAT, ReductionParams, reduce_3sat, verify_reduction
from .io import Instance, dump_instance, load_instance
from .oracle import DEFAULT_CAP, OracleCapError, brute_force_best_response
from .ps import ps, ps1
from .seqalloc import eu_best_response_2

fr = format_rational


def _emit(args, text_lines, payload):
    if args.format == "structured":
        print(json.dumps(payload, indent=1))
    else:
        print("\n".join(text_lines))


def _matrix_lines(problem, alloc):
    width = max(len(a) for a in problem.agents)
    head = " " * width + "  " + "  ".join(f"{h:>6}" for h in problem.houses)
    rows = [
        f"{problem.agents[a]:>{width}}  " + "  ".join(f"{fr(x):>6}" for x in alloc[a])
        for a in range(problem.n)
    ]
    return [head] + rows


def _load(args):
    inst = load_instance(args.instance)
    agent = args.agent - 1 if getattr(args, "agent", None) else 0
    if not 0 <= agent < inst.problem.n:
        raise InstanceError(f"no agent number {args.agent}")
    return inst, agent


def cmd_ps(args):
    inst, _ = _load(args)
    p = inst.problem
    alloc, trace = ps(p)
    lines = _matrix_lines(p, alloc) + ["", "eating start times:"]
    lines += [f"  {p.houses[h]}: {fr(t)}" for h, t in sorted(trace.start.items())]
    payload = {
        "matrix": alloc.to_lists(),
        "est": {p.houses[h]: fr(t) for h, t in sorted(trace.start.items())},
    }
    if args.trace:
        lines += ["", "events:"]
        lines += [f"  t={fr(t)}: {', '.join(p.house_names(b))} exhausted" for t, b in trace.events]
        payload["events"] = [[fr(t), p.house_names(b)] for t, b in trace.events]
    _emit(args, lines, payload)


def cmd_est(args):
    inst, _ = _load(args)
    p = inst.problem
    _, trace = ps(p)
    start = {p.houses[h]: fr(trace.start[h]) if h in trace.start else None for h in range(p.m)}
    lines = [f"{h}: {'never' if t is None else t}" for h, t in start.items()]
    _emit(args, lines, {"est": start})


def cmd_dl_br(args):
    inst, agent = _load(args)
    sub = as_manipulator(inst.problem, agent)
    report, alloc = dl_best_response(sub)
    names = sub.house_names(report)
    row = alloc[0]
    lines = [
        f"best response of agent {sub.agents[0]}: {' '.join(names)}",
        "row: " + " ".join(f"{h}={fr(x)}" for h, x in zip(sub.houses, row)),
    ]
    payload = {"agent": sub.agents[0], "report": names, "row": [fr(x) for x in row]}
    if args.verify:
        if sub.m > 6:
            raise InstanceError("--verify enumerates all reports and is limited to m <= 6")
        best = brute_force_best_response(sub, "dl")
        ok = tuple(row) in best.best_allocations
        lines.append(f"oracle: {'agrees' if ok else 'DISAGREES'}")
        payload["oracle_agrees"] = ok
        if not ok:
            _emit(args, lines, payload)
            return 1
    _emit(args, lines, payload)


def cmd_eu_br_2(args):
    inst, agent = _load(args)
    sub = as_manipulator(inst.problem, agent)
    report, alloc = eu_best_response_2(sub)
    names = sub.house_names(report)
    lines = [f"report of agent {sub.agents[0]}: {' '.join(names)}", ""] + _matrix_lines(sub, alloc)
    payload = {"agent": sub.agents[0], "report": names, "matrix": alloc.to_lists()}
    u = inst.utilities.get(agent)
    if u is not None:
        truthful = eu_value(ps1(sub.prefs[0], sub), u)
        manip = eu_value(alloc[0], u)
        lines += ["", f"expected utility: truthful {fr(truthful)}, manipulated {fr(manip)}"]
        payload.update(truthful_eu=fr(truthful), manipulated_eu=fr(manip))
    _emit(args, lines, payload)


def cmd_oracle(args):
    inst, agent = _load(args)
    sub = as_manipulator(inst.problem, agent)
    u = inst.utilities.get(agent)
    best = brute_force_best_response(sub, args.criterion, u, cap=args.cap, force=args.force)
    reports = [sub.house_names(r) for r in best.optimal_reports]
    lines = [f"criterion {args.criterion}: {len(reports)} optimal report(s)"]
    if best.best_value is not None and args.criterion == "eu":
        lines.append(f"best expected utility: {fr(best.best_value)}")
    lines += ["  " + " ".join(r) for r in reports[:10]]
    if len(reports) > 10:
        lines.append(f"  ... and {len(reports) - 10} more")
    lines.append(f"truth-telling optimal: {'yes' if best.truthful_is_optimal else 'no'}")
    payload = {
        "criterion": args.criterion,
        "optimal_reports": reports,
        "best_allocations": [[fr(x) for x in row] for row in best.best_allocations],
        "truthful_is_optimal": best.truthful_is_optimal,
    }
    if args.criterion == "eu":
        payload["best_value"] = fr(best.best_value)
    _emit(args, lines, payload)


def _params(args) -> ReductionParams:
    return ReductionParams(
        alpha=as_rational(args.alpha),
        eps=None if args.eps is None else as_rational(args.eps),
    )


def cmd_reduce(args):
    formula = Formula3SAT.from_dimacs(Path(args.cnf).read_text())
    ri = reduce_3sat(formula, _params(args))
    out = Path(args.output or Path(args.cnf).with_suffix(".json"))
    params = {"alpha": fr(ri.params.alpha), "eps": fr(ri.params.eps),
              "negligible": fr(ri.params.negligible), "bump": ri.params.bump}
    dump_instance(Instance(ri.problem, extra={"reduction": params}), out)
    sidecar = out.with_name(out.stem + ".utility.json")
    sidecar.write_text(json.dumps({
        "agent": ri.problem.agents[0],
        "utilities": {ri.problem.houses[h]: fr(ri.utility[h]) for h in range(ri.problem.m)},
        "target": fr(ri.target),
        "params": params,
    }, indent=1) + "\n")
    lines = [f"instance: {out} ({ri.problem.n} agents, {ri.problem.m} houses)",
             f"utilities and target: {sidecar}", f"target T = {fr(ri.target)}"]
    _emit(args, lines, {"instance": str(out), "sidecar": str(sidecar), "target": fr(ri.target),
                        "agents": ri.problem.n, "houses": ri.problem.m, "params": params})


def cmd_verify(args):
    formula = Formula3SAT.from_dimacs(Path(args.cnf).read_text())
    res = verify_reduction(formula, _params(args))
    ok = res.equivalent and res.pointwise
    lines = [f"alpha={fr(res.alpha)} eps={fr(res.eps)} T={fr(res.target)}"]
    for a, value, reaches, sat in res.rows:
        bits = "".join("T" if b else "F" for b in a)
        lines.append(f"  {bits}  satisfies={'yes' if sat else 'no ':3}  reaches T={'yes' if reaches else 'no'}")
    lines.append(
        f"satisfiable: {'yes' if res.satisfiable else 'no'}; target reachable: "
        f"{'yes' if res.reachable else 'no'}; verdict: {'EQUIVALENT' if ok else 'MISMATCH'}"
    )
    payload = {
        "alpha": fr(res.alpha), "eps": fr(res.eps), "target": fr(res.target),
        "rows": [{"assignment": list(a), "utility": fr(v), "reaches": r, "satisfies": s}
                 for a, v, r, s in res.rows],
        "satisfiable": res.satisfiable, "reachable": res.reachable, "equivalent": ok,
    }
    _emit(args, lines, payload)
    return 0 if ok else 1


def _int_list(text: str) -> tuple[int, ...]:
    out = []
    for part in text.split(","):
        if "-" in part:
            lo, hi = part.split("-")
            out += range(int(lo), int(hi) + 1)
        else:
            out.append(int(part))
    return tuple(out)


def cmd_experiment(args):
    cfg = ExperimentConfig(args.n, args.m, args.trials, args.seed, args.criterion)
    report = run_experiment(cfg, jobs=args.jobs)
    if args.output:
        Path(args.output).write_text(report.to_json() + "\n")
    lines = [report.table(), "", "non-decreasing in m: " + ", ".join(
        f"n={n}: {'yes' if ok else 'no'}" for n, ok in report.trend().items())]
    if args.format == "structured":
        print(report.to_json())
    else:
        print("\n".join(lines))


def build_parser() -> argparse.ArgumentParser:
    def global_flags(suppress: bool) -> argparse.ArgumentParser:
        # the subcommand copy must not overwrite a flag given before the subcommand
        g = argparse.ArgumentParser(add_help=False)
        d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        g.add_argument("--seed", type=int, default=d(0), help="root random seed")
        g.add_argument("--format", choices=("text", "structured"), default=d("text"))
        g.add_argument("--jobs", type=int, default=d(1), help="worker processes")
        return g

    common = global_flags(True)
    parser = argparse.ArgumentParser(
        prog="psmanip", parents=[global_flags(False)],
        description="Probabilistic serial rule: outcomes, best responses and manipulability.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def instance_cmd(name, func, help_text, agent=True):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.add_argument("instance", help="instance JSON file")
        if agent:
            sp.add_argument("--agent", type=int, default=1, help="manipulating agent (1-based)")
        sp.set_defaults(func=func)
        return sp

    sp = instance_cmd("ps", cmd_ps, "run the PS rule", agent=False)
    sp.add_argument("--trace", action="store_true", help="also print the exhaustion events")
    instance_cmd("est", cmd_est, "eating start times", agent=False)
    sp = instance_cmd("dl-br", cmd_dl_br, "downward-lexicographic best response")
    sp.add_argument("--verify", action="store_true", help="confirm with the oracle (m <= 6)")
    instance_cmd("eu-br-2", cmd_eu_br_2, "expected-utility best response, two agents")
    sp = instance_cmd("oracle", cmd_oracle, "exhaustive best response")
    sp.add_argument("--criterion", choices=("eu", "dl", "sd"), required=True)
    sp.add_argument("--force", action="store_true", help="enumerate beyond the cap")
    sp.add_argument("--cap", type=int, default=DEFAULT_CAP, help="largest m enumerated without --force")

    for name, func, help_text in (
        ("reduce-3sat", cmd_reduce, "build the EU best-response instance for a CNF"),
        ("verify-reduction", cmd_verify, "sweep all assignments of a CNF through the reduction"),
    ):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.add_argument("cnf", help="DIMACS CNF file, every literal exactly twice")
        sp.add_argument("--alpha", default="4")
        sp.add_argument("--eps", default=None)
        if name == "reduce-3sat":
            sp.add_argument("-o", "--output", help="instance file (default: CNF name with .json)")
        sp.set_defaults(func=func)

    sp = sub.add_parser("experiment", parents=[common], help="manipulability on random profiles")
    sp.add_argument("--n", type=_int_list, default=(3,), help="agent counts, e.g. 2,3 or 2-4")
    sp.add_argument("--m", type=_int_list, default=(3, 4, 5, 6), help="house counts")
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--criterion", choices=("dl", "eu"), default="dl")
    sp.add_argument("-o", "--output", help="write the structured report here")
    sp.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args) or 0
    except (InstanceError, OracleCapError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
