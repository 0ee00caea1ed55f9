#!/usr/bin/env python3
"""
syncsmith
Main CLI Application

Forge counterexample executions, simulate algorithms on dynamic graphs,
measure dynamic diameters and print the state/time lower bounds.
"""

import argparse
import sys
from typing import Dict, List, Optional

from loguru import logger
from pydantic import ValidationError as PydanticValidationError

from .config import ExitCode, Theorem, config
from .core.adversary import SEED_NAMES, forge, forge_all_seeds, replay_trace
from .core.algorithm import FiniteAlgorithm
from .core.bounds import lower_bounds
from .core.engine import check_mod_p_sync, execute
from .core.graphs import ActivationSchedule, DynamicGraph, diffusive_schedule, dynamic_diameter, parse_graph_spec
from .core.reporting import to_json, write_json, write_trace
from .core.zoo import list_zoo, load_fsm_file, resolve_builtin
from .exceptions import InvalidParameterError, PredictionMismatch, SyncsmithError
from .models.schemas import RunConfig


class SyncsmithArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with the stable usage code instead of argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(ExitCode.USAGE.value)


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = "INFO"
    if verbose or config.DEBUG:
        level = "DEBUG"
    if quiet:
        level = "WARNING"
    logger.remove()
    logger.add(sys.stderr, level=level, format="<level>{level: <8}</level> | {message}")


# =============================================================================
# ARGUMENT PARSING
# =============================================================================

def _add_algorithm_source(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--builtin", help="Built-in algorithm, e.g. modmax:2, floodmax, constant:3")
    source.add_argument("--fsm", metavar="PATH", help="FSM JSON file")


def build_parser() -> SyncsmithArgumentParser:
    parser = SyncsmithArgumentParser(
        prog="syncsmith",
        description="Counterexamples and bounds for mod-P clock synchronization on dynamic graphs",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s forge --theorem 1 --builtin modmax:2 --q0 0 --q1 0 --out r.json
  %(prog)s forge --theorem 4 --builtin modmax:2 --q00 0 --kmax 8
  %(prog)s simulate --builtin floodmax --graph ring:directed:5 --init uniform:0 --starts 1,2,3,4,5 --horizon 40
  %(prog)s diameter --graph thm4:4 --from-round 6
  %(prog)s bounds --n 19
        """,
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    parser.add_argument("--quiet", "-q", action="store_true", help="Warnings only")
    parser.add_argument("--version", action="version", version=f"%(prog)s {config.APP_VERSION}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_forge = sub.add_parser("forge", help="Build a counterexample execution")
    _add_algorithm_source(p_forge)
    p_forge.add_argument("--theorem", required=True, choices=["1", "2", "3", "4", "T1", "T2", "T3", "T4"])
    for seed in ("q0", "q1", "p0", "q00"):
        p_forge.add_argument(f"--{seed}", help=f"Seed state {seed}")
    p_forge.add_argument("--periods", type=int, help="Rounds per period for T1/T2 (default: 20)")
    p_forge.add_argument("--n", type=int, help="Ring size for T3")
    p_forge.add_argument("--horizon", type=int, help="Horizon for T3 (default: n + 4)")
    p_forge.add_argument("--kmax", dest="k_max", type=int, help="Number of 2L blocks for T4 (default: 8)")
    p_forge.add_argument("--all-seeds", action="store_true", help="Forge over every seed assignment")
    p_forge.add_argument("--out", metavar="PATH", help="Report JSON (default: stdout)")
    p_forge.add_argument("--emit-trace", metavar="PATH", help="Also write the JSONL trace")

    p_sim = sub.add_parser("simulate", help="Run an algorithm on a dynamic graph")
    _add_algorithm_source(p_sim)
    p_sim.add_argument("--graph", required=True, help="ring:directed:L, ring:bidir:m, thm4:L, complete:n or a file")
    p_sim.add_argument("--init", required=True, help="uniform:<state> or comma-separated state names")
    p_sim.add_argument("--starts", help="sync, comma-separated start rounds, or diffusive:<spontaneous rounds>")
    p_sim.add_argument("--horizon", type=int, required=True)
    p_sim.add_argument("--min-suffix", type=int)
    p_sim.add_argument("--self-stabilizing", action="store_true", help="Allow initial states outside Q0")
    p_sim.add_argument("--out", "--emit-trace", dest="emit_trace", metavar="PATH", help="JSONL trace")
    p_sim.add_argument("--plot", metavar="PNG", help="Clock heat map")

    p_diam = sub.add_parser("diameter", help="Dynamic diameter of a graph")
    p_diam.add_argument("--graph", required=True)
    p_diam.add_argument("--from-round", type=int, default=1)
    p_diam.add_argument("--d-max", type=int)

    p_bounds = sub.add_parser("bounds", help="State and time lower bounds")
    p_bounds.add_argument("--n", type=int, required=True)

    sub.add_parser("zoo", help="List built-in algorithms")
    return parser


def to_run_config(args: argparse.Namespace) -> RunConfig:
    values = {k: v for k, v in vars(args).items() if k not in ("verbose", "quiet") and v is not None}
    seeds = {s: values.pop(s) for s in ("q0", "q1", "p0", "q00") if s in values}
    if "theorem" in values:
        raw = values["theorem"]
        values["theorem"] = raw if raw.startswith("T") else f"T{raw}"
    try:
        return RunConfig(seeds=seeds, **values)
    except PydanticValidationError as e:
        raise InvalidParameterError(f"Invalid arguments: {e.errors()[0]['msg']}")


# =============================================================================
# COMMANDS
# =============================================================================

def load_algorithm(run: RunConfig) -> FiniteAlgorithm:
    if run.fsm:
        return load_fsm_file(run.fsm)
    return resolve_builtin(run.builtin)


def _emit(payload, out: Optional[str]) -> None:
    if out:
        write_json(payload, out)
    else:
        print(to_json(payload))


def cmd_forge(run: RunConfig) -> int:
    alg = load_algorithm(run)
    params = dict(rounds_per_period=run.periods, n=run.n, horizon=run.horizon, k_max=run.k_max)

    if run.all_seeds:
        if run.emit_trace:
            raise InvalidParameterError("--emit-trace needs a single seed assignment, not --all-seeds")
        reports = forge_all_seeds(run.theorem, alg, **params)
        _emit(reports, run.out)
        return ExitCode.OK.value if all(r.refutes for r in reports) else ExitCode.NEGATIVE.value

    needed = SEED_NAMES[run.theorem]
    missing = [s for s in needed if s not in run.seeds]
    if missing:
        raise InvalidParameterError(
            f"{run.theorem.value} needs " + ", ".join(f"--{s}" for s in missing), {"missing": missing}
        )
    seeds = {k: alg.parse_state(run.seeds[k]) for k in needed}
    report = forge(run.theorem, alg, seeds, **params)
    _emit(report, run.out)
    if run.emit_trace:
        write_trace(replay_trace(report, alg), run.emit_trace)
    return ExitCode.OK.value if report.refutes else ExitCode.NEGATIVE.value


def parse_init(spec: str, alg: FiniteAlgorithm, n: int) -> List:
    if spec.startswith("uniform:"):
        return [alg.parse_state(spec[len("uniform:"):])] * n
    names = [s.strip() for s in spec.split(",")]
    if len(names) != n:
        raise InvalidParameterError(f"--init lists {len(names)} states for {n} nodes")
    return [alg.parse_state(s) for s in names]


def _int_list(raw: str, what: str) -> List[int]:
    try:
        return [int(x) for x in raw.split(",")]
    except ValueError:
        raise InvalidParameterError(f"{what} must be comma-separated integers, got {raw!r}")


def parse_starts(spec: Optional[str], graph: DynamicGraph) -> Optional[ActivationSchedule]:
    """
    'sync', explicit rounds, or 'diffusive:<spontaneous rounds>' resolved on
    the first periodic round of the graph.
    """
    if spec is None:
        return None
    if spec == "sync":
        return ActivationSchedule.synchronous(graph.n)
    if spec.startswith("diffusive:"):
        spontaneous = _int_list(spec[len("diffusive:"):], "--starts")
        return diffusive_schedule(graph.period[0], spontaneous)
    starts = _int_list(spec, "--starts")
    if len(starts) != graph.n:
        raise InvalidParameterError(f"--starts lists {len(starts)} rounds for {graph.n} nodes")
    return ActivationSchedule(tuple(starts))


def cmd_simulate(run: RunConfig) -> int:
    alg = load_algorithm(run)
    graph = parse_graph_spec(run.graph)
    schedule = parse_starts(run.starts, graph)
    init = parse_init(run.init, alg, graph.n)
    trace = execute(alg, graph, init, schedule=schedule, horizon=run.horizon,
                    self_stabilizing=run.self_stabilizing)
    verdict = check_mod_p_sync(trace, min_suffix=run.min_suffix)

    if run.emit_trace:
        write_trace(trace, run.emit_trace)
    if run.plot:
        from .core.visualizer import TraceVisualizer
        TraceVisualizer(trace, title=f"{alg.name} on {run.graph}").plot_clocks(save_path=run.plot)
        logger.info(f"Plot written to {run.plot}")

    print(to_json(verdict))
    return ExitCode.OK.value if verdict.synchronized else ExitCode.NEGATIVE.value


def cmd_diameter(run: RunConfig) -> int:
    graph = parse_graph_spec(run.graph)
    d = dynamic_diameter(graph, from_round=run.from_round, d_max=run.d_max)
    print("none" if d is None else d)
    return ExitCode.OK.value if d is not None else ExitCode.NEGATIVE.value


def cmd_bounds(run: RunConfig) -> int:
    print(to_json(lower_bounds(run.n)))
    return ExitCode.OK.value


def cmd_zoo(run: RunConfig) -> int:
    print(list_zoo().to_string(index=False))
    return ExitCode.OK.value


COMMANDS = {
    "forge": cmd_forge,
    "simulate": cmd_simulate,
    "diameter": cmd_diameter,
    "bounds": cmd_bounds,
    "zoo": cmd_zoo,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else ExitCode.OK.value

    configure_logging(args.verbose, args.quiet)
    try:
        run = to_run_config(args)
        return COMMANDS[run.subcommand](run)
    except PredictionMismatch as e:
        logger.error(f"Prediction mismatch: {e.message}")
        return ExitCode.THEOREM_VIOLATION.value
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return ExitCode.IO.value
    except SyncsmithError as e:
        logger.error(e.message)
        return ExitCode.USAGE.value


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        sys.exit(ExitCode.OK.value)
