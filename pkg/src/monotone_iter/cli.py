"""Command-line front end: ``monotone-iter {iterate,solve,oracle,replay,list}``.

Exit codes: 0 success, 1 malformed problem or arguments, 2 runtime error,
3 the oracle (or a replayed bundle) found a violation.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import io
from .cone import solve
from .engine import StopPolicy, run
from .errors import MonotoneIterError, ProblemSpecError
from .finite import FinitePoset
from .oracle import replay, verify_theorem_suite
from .problems import BUILTINS, Problem, ProblemSpec, make_problem

EXIT_OK, EXIT_SPEC, EXIT_RUNTIME, EXIT_VIOLATION = 0, 1, 2, 3
SEED_ENV = "MONOTONE_ITER_SEED"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_SPEC, f"{self.prog}: error: {message}\n")


def _param(text: str):
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key, json.loads(value)
    except json.JSONDecodeError:
        return key, value


def _add_problem_args(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--builtin", help="registered problem name (see `list`)")
    src.add_argument("--problem", type=Path, help="JSON problem file")
    p.add_argument("--param", type=_param, action="append", default=[], metavar="KEY=VALUE",
                   help="builtin parameter; VALUE is parsed as JSON when possible")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="monotone-iter", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    it = sub.add_parser("iterate", help="run the coupled iteration; writes trace.csv and verdict.json")
    _add_problem_args(it)
    it.add_argument("--steps", type=int,
                    help="record at least this many steps before any early stop")
    it.add_argument("--fixed-horizon", action="store_true",
                    help="run exactly --steps steps with no early stop")
    it.add_argument("--max-steps", type=int)
    it.add_argument("--gap-tol", type=float)

    so = sub.add_parser("solve", help="certified cone solve; writes solve.json")
    _add_problem_args(so)
    so.add_argument("--tol", type=float, default=1e-10)
    so.add_argument("--max-steps", type=int, default=10_000)

    orc = sub.add_parser("oracle", help="randomized verification on small lattices")
    orc.add_argument("--trials", type=int, default=1000)
    orc.add_argument("--seed", type=int, default=0)
    orc.add_argument("--sizes", type=int, nargs=2, default=(2, 8), metavar=("MIN", "MAX"))
    orc.add_argument("--jobs", type=int, default=1)
    orc.add_argument("--generator", choices=("maps", "general"), default="maps",
                     help="f(x) v g(y) style tables, or arbitrary mixed monotone tables")
    orc.add_argument("--out", type=Path, default=Path("."))

    rp = sub.add_parser("replay", help="re-check a counterexample bundle")
    rp.add_argument("bundle", type=Path)

    sub.add_parser("list", help="list builtin problems")
    return parser


def _load_problem(args) -> tuple[Problem, ProblemSpec | None]:
    if args.builtin is not None:
        return make_problem(args.builtin, dict(args.param)), None
    try:
        data = io.read_json(args.problem)
    except (OSError, json.JSONDecodeError) as exc:
        raise ProblemSpecError(f"cannot read {args.problem}: {exc}") from exc
    spec = ProblemSpec.from_json(data)
    if args.param:
        spec.params = {**spec.params, **dict(args.param)}
    return spec.build(), spec


def _out_dir(args, spec: ProblemSpec | None) -> Path:
    if spec is not None and spec.output and args.out == Path("."):
        return Path(spec.output)
    return args.out


def _policy(args, spec: ProblemSpec | None) -> StopPolicy:
    base = spec.stop_policy() if spec is not None else StopPolicy()
    changes = {}
    if args.gap_tol is not None:
        changes["gap_tolerance"] = args.gap_tol
    if args.max_steps is not None:
        changes["max_steps"] = args.max_steps
    if args.steps is not None:
        if args.fixed_horizon:
            changes.update(max_steps=args.steps, early_stop=False)
        else:
            changes.update(min_steps=args.steps,
                           max_steps=max(args.steps, changes.get("max_steps", base.max_steps)))
    elif args.fixed_horizon:
        raise ProblemSpecError("--fixed-horizon needs --steps")
    return StopPolicy(**{**base.__dict__, **changes})


def cmd_iterate(args) -> int:
    problem, spec = _load_problem(args)
    policy = _policy(args, spec)
    x0, y0 = problem.start_pair()
    trace = run(problem.operator, x0, y0, policy)
    verdict = trace.verdict
    out = _out_dir(args, spec)

    gap = None
    if isinstance(problem.universe, FinitePoset):
        def gap(x, y):
            return len(problem.universe.interval_members(x, y)) - 1
    io.write_trace_csv(trace, out / "trace.csv", gap=gap)

    image = problem.operator(verdict.x_star, verdict.x_star) if verdict.x_star is not None else None
    summary = {
        "problem": problem.name,
        "kind": verdict.kind,
        "x_star": verdict.x_star,
        "fixed_point_confirmed": verdict.fixed_point_confirmed,
        "image_of_x_star": image,
        "horizon": trace.horizon,
        "stop_reason": trace.stop_reason,
        "lu_onset": trace.lu_onset,
        "equal_at": trace.equal_at,
        "empty_intersection_at": trace.empty_intersection_at,
        "cycle": trace.cycle,
        "certificate": verdict.certificate,
    }
    io.write_json(summary, out / "verdict.json")
    x_text = io.dumps(verdict.x_star) if verdict.x_star is not None else "-"
    print(f"{verdict.kind.value}({x_text}) fixed_point_confirmed={str(verdict.fixed_point_confirmed).lower()} "
          f"horizon={trace.horizon} stop={trace.stop_reason}")
    return EXIT_OK


def cmd_solve(args) -> int:
    problem, spec = _load_problem(args)
    if not problem.is_cone:
        raise ProblemSpecError(f"{problem.name} is not a cone problem")
    report = solve(problem.operator, problem.phi, problem.u, tol=args.tol, max_steps=args.max_steps)
    out = _out_dir(args, spec)
    io.write_json(report.to_json(), out / "solve.json")
    print(f"x*={io.dumps(report.x_star)} residual={io.fmt_float(report.residual)} "
          f"iterations={report.iterations} lambda_final={io.fmt_float(report.lambda_final)}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    seed = int(os.environ.get(SEED_ENV, args.seed))
    report = verify_theorem_suite(seed, args.trials, tuple(args.sizes), jobs=args.jobs,
                                  generator=args.generator)
    io.write_json(report.to_json(), args.out / "oracle-report.json")
    for k, bundle in enumerate(report.bundles):
        io.write_json(bundle, args.out / f"counterexample-{k}.json")
    print(f"trials={report.trials} seed={seed} violations={report.total_violations} "
          f"attractive_fixed_point_instances={report.attractive_fixed_point_instances}")
    return EXIT_VIOLATION if report.total_violations else EXIT_OK


def cmd_replay(args) -> int:
    try:
        bundle = io.read_json(args.bundle)
        result = replay(bundle)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ProblemSpecError(f"cannot replay {args.bundle}: {exc}") from exc
    expected = bundle.get("violated")
    got = result.violations[0] if result.violations else None
    print(f"expected={expected} reproduced={got} all={','.join(result.violations) or '-'}")
    if got is None:
        return EXIT_OK
    return EXIT_VIOLATION if got == expected else EXIT_RUNTIME


def cmd_list(args) -> int:
    for name, entry in BUILTINS.items():
        params = ", ".join(entry.params) or "-"
        print(f"{name:18s} {entry.summary}  [params: {params}]")
    return EXIT_OK


COMMANDS = {"iterate": cmd_iterate, "solve": cmd_solve, "oracle": cmd_oracle,
            "replay": cmd_replay, "list": cmd_list}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ProblemSpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except MonotoneIterError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
