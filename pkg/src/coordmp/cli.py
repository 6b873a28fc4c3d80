"""Command-line surface: solve, validate, analyze, preprocess, reduce, gen, render.

Exit codes are total and mutually exclusive: 0 = yes/ok, 1 = no within the
budget, 2 = infeasible, 3 = input error, 4 = resource or applicability
limit.  Solver runs print a machine-parseable summary line
``alg=<a> energy=<e> status=<s>`` and emit the schedule when one exists.
Diagnostics go to standard error.
"""
from __future__ import annotations

import argparse
import os
import sys

from coordmp.approx import approximate, energy_ball_restrict, solve_gcmp1
from coordmp.core import (
    InfeasibleError,
    InputError,
    LimitError,
    UnsupportedStructureError,
    parse_instance,
    parse_schedule,
    render_instance,
    render_schedule,
    validate_schedule,
)
from coordmp.generators import KINDS, generate
from coordmp.hardness import parse_mcc, reduce_mcc
from coordmp.oracle import Limits, default_limits, solve_critical, solve_exact
from coordmp.render import render_dot, render_frames, render_text_trace
from coordmp.structure import ClassificationError, classify_vertex
from coordmp.twdp import parse_td, solve_twdp

EXIT_OK = 0
EXIT_OVER_BUDGET = 1
EXIT_INFEASIBLE = 2
EXIT_INPUT = 3
EXIT_LIMIT = 4

ALGORITHMS = ("oracle", "critical", "gcmp1", "approx", "twdp")


class _Parser(argparse.ArgumentParser):
    """argparse parser whose usage errors surface as InputError (exit 3)."""

    def error(self, message):
        raise InputError(message)


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from None


def _limits(args) -> Limits:
    if getattr(args, "state_cap", None) is not None:
        if args.state_cap < 1:
            raise InputError("state cap must be positive")
        return Limits(max_states=args.state_cap)
    return default_limits()


def _check_threads(args) -> None:
    threads = getattr(args, "threads", None)
    if threads is None:
        return
    if threads < 1:
        raise InputError("thread count must be positive")
    # Solvers are sequential; the cap is recorded so scripted runs that
    # request it are honest about what actually executed.
    print(f"note: worker cap {threads} recorded; solvers run sequentially",
          file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="coordmp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run a solver on an instance file")
    solve.add_argument("--alg", choices=ALGORITHMS, required=True)
    solve.add_argument("-i", "--instance", required=True)
    solve.add_argument("-o", "--out", help="schedule output path")
    solve.add_argument("--state-cap", type=int, help="search state limit")
    solve.add_argument("--checkpoint-budget", type=int)
    solve.add_argument("--visit-cap", type=int, default=2)
    solve.add_argument("--td-file", help="tree decomposition file for twdp")
    solve.add_argument("--threads", type=int)

    val = sub.add_parser("validate", help="check a schedule against an instance")
    val.add_argument("-i", "--instance", required=True)
    val.add_argument("-s", "--schedule", required=True)

    ana = sub.add_parser("analyze", help="report per-vertex haven structure")
    ana.add_argument("-i", "--instance", required=True)
    ana.add_argument("--k", type=int, help="robot count to classify against")

    pre = sub.add_parser("preprocess", help="shrink an instance before solving")
    pre.add_argument("--energy-ball", action="store_true",
                     help="restrict to budget-radius balls around movers")
    pre.add_argument("-i", "--instance", required=True)
    pre.add_argument("-o", "--out", help="sub-instance output path")

    red = sub.add_parser("reduce", help="build a hardness gadget instance")
    red.add_argument("format", choices=["mcc"],
                     help="source problem file format")
    red.add_argument("-i", "--input", required=True)
    red.add_argument("-o", "--out", help="instance output path")
    red.add_argument("--subdiv", type=int,
                     help="experimental subdivision override")

    gen = sub.add_parser("gen", help="generate a seeded benchmark instance")
    gen.add_argument("kind", choices=KINDS)
    gen.add_argument("--n", type=int)
    gen.add_argument("--w", type=int, dest="width")
    gen.add_argument("--h", type=int, dest="height")
    gen.add_argument("--robots", type=int, default=1)
    gen.add_argument("--free", type=int, default=0,
                     help="how many robots get no destination")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--edge-prob", type=float, default=0.3)
    gen.add_argument("--budget", type=int)
    gen.add_argument("-o", "--out")

    ren = sub.add_parser("render", help="render a schedule for inspection")
    ren.add_argument("--format", choices=["trace", "dot", "frames"],
                     required=True)
    ren.add_argument("-i", "--instance", required=True)
    ren.add_argument("-s", "--schedule")
    ren.add_argument("-o", "--out",
                     help="output file (trace/dot) or directory (frames)")
    return parser


def _summary(alg: str, energy, status: str) -> None:
    e = "-" if energy is None else str(energy)
    print(f"alg={alg} energy={e} status={status}")


def _cmd_solve(args) -> int:
    instance = parse_instance(_read(args.instance))
    _check_threads(args)
    limits = _limits(args)
    alg = args.alg
    if alg == "oracle":
        result = solve_exact(instance, limits)
    elif alg == "critical":
        result = solve_critical(instance, limits)
    elif alg == "gcmp1":
        result = solve_gcmp1(instance, limits)
    elif alg == "twdp":
        td = None
        if args.td_file is not None:
            td = parse_td(_read(args.td_file), instance.graph,
                          frozenset(r.start for r in instance.robots)
                          | frozenset(r.goal for r in instance.robots
                                      if r.goal is not None))
        result = solve_twdp(instance, args.checkpoint_budget,
                            visit_cap=args.visit_cap, td=td, limits=limits)
    else:  # approx
        try:
            report = approximate(instance, limits)
        except InfeasibleError as exc:
            print(f"infeasible: {exc}", file=sys.stderr)
            _summary(alg, None, "infeasible")
            return EXIT_INFEASIBLE
        budget = instance.budget
        if budget is None or report.energy <= budget:
            status, code = "ok", EXIT_OK
        elif report.lower_bound > budget:
            # Even a perfect schedule needs more moves than the budget.
            status, code = "budget-exceeded", EXIT_OVER_BUDGET
        else:
            # The found schedule overshoots the budget but the lower bound
            # does not rule out a cheaper one; this run cannot decide.
            status, code = "budget-limited", EXIT_LIMIT
        _summary(alg, report.energy, status)
        sched_text = render_schedule(report.schedule)
        if args.out:
            _write(args.out, sched_text)
        else:
            sys.stdout.write(sched_text)
        return code

    _summary(alg, result.energy, result.status)
    if result.schedule is not None:
        sched_text = render_schedule(result.schedule)
        if args.out:
            _write(args.out, sched_text)
        else:
            sys.stdout.write(sched_text)
    if result.status == "optimal":
        return EXIT_OK
    if result.status == "budget-exceeded":
        return EXIT_OVER_BUDGET
    if result.status == "infeasible":
        return EXIT_INFEASIBLE
    if (
        result.status == "budget-limited"
        and result.energy is not None
        and (instance.budget is None or result.energy <= instance.budget)
    ):
        # Uncertified but witnessed: the checkpoint search found a real
        # schedule at this energy, which answers "yes" within the budget.
        return EXIT_OK
    return EXIT_LIMIT  # state-limit or an exhausted checkpoint budget


def _cmd_validate(args) -> int:
    instance = parse_instance(_read(args.instance))
    schedule = parse_schedule(_read(args.schedule), instance)
    report = validate_schedule(instance, schedule)
    if not report.ok:
        print(f"invalid schedule: {report.violation}", file=sys.stderr)
        return EXIT_INPUT
    print(f"validate ok energy={report.energy}"
          + (" over-budget" if report.over_budget else ""))
    return EXIT_OVER_BUDGET if report.over_budget else EXIT_OK


def _cmd_analyze(args) -> int:
    instance = parse_instance(_read(args.instance))
    k = args.k if args.k is not None else max(instance.k, 1)
    if k < 1:
        raise InputError("classification requires k >= 1")
    graph = instance.graph
    cache: dict = {}
    kinds: dict[str, int] = {}
    lines = []
    for v in range(graph.n):
        try:
            tag = classify_vertex(graph, v, k, cache)
            kind = tag.kind
        except ClassificationError:
            kind = "unclassified"
        kinds[kind] = kinds.get(kind, 0) + 1
        lines.append(f"vertex {v} kind={kind}")
    counts = " ".join(f"{kind}={kinds[kind]}" for kind in sorted(kinds))
    print(f"analyze n={graph.n} m={len(graph.edges)} k={k} {counts}")
    for line in lines:
        print(line)
    return EXIT_OK


def _cmd_preprocess(args) -> int:
    if not args.energy_ball:
        raise InputError("no preprocessing selected; pass --energy-ball")
    instance = parse_instance(_read(args.instance))
    result = energy_ball_restrict(instance)
    if result.no_instance:
        print(f"budget provably insufficient: {result.reason}", file=sys.stderr)
        print("preprocess status=no-instance")
        return EXIT_OVER_BUDGET
    sub = result.instance
    print(f"preprocess status=ok n={sub.graph.n} k={sub.k}")
    for orig in sorted(result.vertex_map):
        print(f"map {orig} {result.vertex_map[orig]}")
    _write(args.out, render_instance(sub))
    return EXIT_OK


def _cmd_reduce(args) -> int:
    mcg = parse_mcc(_read(args.input))
    red = reduce_mcc(mcg, args.subdiv)
    if args.subdiv is not None:
        print("note: experimental subdivision override; the yes/no "
              "equivalence is only guaranteed at the default length",
              file=sys.stderr)
    inst = red.instance
    print(f"reduce kappa={red.kappa} n={inst.graph.n} robots={inst.k} "
          f"budget={inst.budget} subdivision={red.subdivision}")
    for name, vid in sorted(red.names.items(), key=lambda kv: kv[1]):
        print(f"name {name} {vid}")
    _write(args.out, render_instance(inst))
    return EXIT_OK


def _cmd_gen(args) -> int:
    instance = generate(
        args.kind,
        n=args.n,
        width=args.width,
        height=args.height,
        robots=args.robots,
        free_robots=args.free,
        seed=args.seed,
        edge_prob=args.edge_prob,
        budget=args.budget,
    )
    _write(args.out, render_instance(instance))
    return EXIT_OK


def _cmd_render(args) -> int:
    instance = parse_instance(_read(args.instance))
    schedule = None
    if args.schedule is not None:
        schedule = parse_schedule(_read(args.schedule), instance)
        report = validate_schedule(instance, schedule)
        if not report.ok:
            print(f"invalid schedule: {report.violation}", file=sys.stderr)
            return EXIT_INPUT
    if args.format == "dot":
        _write(args.out, render_dot(instance, schedule))
        return EXIT_OK
    if schedule is None:
        raise InputError(f"--format {args.format} requires a schedule")
    if args.format == "trace":
        _write(args.out, render_text_trace(instance, schedule))
        return EXIT_OK
    out_dir = args.out or "frames"
    os.makedirs(out_dir, exist_ok=True)
    frames = render_frames(instance, schedule)
    for i, frame in enumerate(frames):
        _write(os.path.join(out_dir, f"frame_{i:03d}.svg"), frame)
    print(f"render frames={len(frames)} dir={out_dir}")
    return EXIT_OK


_COMMANDS = {
    "solve": _cmd_solve,
    "validate": _cmd_validate,
    "analyze": _cmd_analyze,
    "preprocess": _cmd_preprocess,
    "reduce": _cmd_reduce,
    "gen": _cmd_gen,
    "render": _cmd_render,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (LimitError, UnsupportedStructureError, ClassificationError) as exc:
        print(f"limit reached: {exc}", file=sys.stderr)
        return EXIT_LIMIT


if __name__ == "__main__":
    sys.exit(main())
