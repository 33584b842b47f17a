# Standard library
import argparse
import logging
import sys
import time
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import NoReturn

# Third-party
from rich.console import Console
from rich.logging import RichHandler

# Local imports
from stochreach.core.config import VERSION, Settings, load_settings
from stochreach.core.models import RlParams
from stochreach.core.validation import InputFormatError
from stochreach.managers.manager import ReachabilityManager, fresh_seed, parse_target

logger = logging.getLogger(__name__)

# -----------------------------
# Constants
# -----------------------------

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2

SEEDED_COMMANDS = frozenset({"rl", "simulate"})

Handler = Callable[[argparse.Namespace, ReachabilityManager], None]

# -----------------------------
# Parser
# -----------------------------


class StochreachParser(argparse.ArgumentParser):
    """ArgumentParser that exits with status 1 on usage errors."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def positive_int(raw: str) -> int:
    value = int(raw)
    if value < 1:
        msg = f"expected a positive integer, got {raw}"
        raise argparse.ArgumentTypeError(msg)
    return value


def _common_options() -> argparse.ArgumentParser:
    common = StochreachParser(add_help=False)
    common.add_argument(
        "--out",
        type=Path,
        help="output file (.csv, .parquet or .json); stdout when omitted",
    )
    common.add_argument(
        "--decimal",
        action="store_true",
        help="print probabilities as decimals instead of fractions",
    )
    common.add_argument(
        "--pretty",
        action="store_true",
        help="render stdout tables with rich instead of CSV",
    )
    common.add_argument(
        "--seed",
        type=int,
        help="random seed; a fresh one is drawn and reported when omitted",
    )
    common.add_argument(
        "--threads",
        type=positive_int,
        default=1,
        help="Monte Carlo worker threads (default 1)",
    )
    common.add_argument(
        "--log-level",
        help="DEBUG, INFO, WARNING or ERROR (default STOCHREACH_LOG_LEVEL)",
    )
    common.add_argument(
        "--manifest",
        type=Path,
        help="run manifest file; next to --out, else stderr, when omitted",
    )
    return common


def _learning_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--algo", choices=["sarsa", "qlearning"], default="sarsa")
    parser.add_argument("--episodes", type=positive_int, default=10_000)
    parser.add_argument("--lr", type=float, default=0.1, help="learning rate")
    parser.add_argument("--epsilon", type=float, default=0.1, help="exploration")
    parser.add_argument("--discount", type=float, default=1.0, help="in (0, 1]")


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = StochreachParser(
        prog="stochreach",
        description=(
            "Reachability bounds for stochastic digraphs and mobile-agent SIR "
            "models. Global options go after the subcommand."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    commands = parser.add_subparsers(dest="command", required=True)

    bounds = commands.add_parser(
        "bounds", parents=[common], help="bound matrices; columns matrix,row,1..n"
    )
    bounds.add_argument("--graph", type=Path, required=True)
    bounds.set_defaults(handler=_run_bounds)

    pset = commands.add_parser(
        "pset", parents=[common], help="enumerate P; columns matrix,row,1..n"
    )
    pset.add_argument("--graph", type=Path, required=True)
    pset.add_argument("--cap", type=positive_int, help="maximum nu")
    pset.add_argument("--dedup", action="store_true", help="drop repeated matrices")
    pset.set_defaults(handler=_run_pset)

    mdp = commands.add_parser(
        "mdp", parents=[common], help="local MDP listing; columns i,a,tuple,j,p"
    )
    mdp.add_argument("--graph", type=Path, required=True)
    mdp.set_defaults(handler=_run_mdp)

    reach = commands.add_parser(
        "reach",
        parents=[common],
        help=(
            "weak reachability or strong recurrence; columns k,node,value,action "
            "(node,value,action with --infinite)"
        ),
    )
    reach.add_argument("--graph", type=Path, required=True)
    reach.add_argument(
        "--target",
        type=parse_target,
        required=True,
        help="comma-separated target nodes, e.g. 4 or 2,3",
    )
    reach.add_argument("--horizon", type=int, default=10)
    reach.add_argument("--mode", choices=["weak", "strong"], default="weak")
    reach.add_argument(
        "--infinite", action="store_true", help="solve the infinite-horizon problem"
    )
    reach.add_argument(
        "--policy-out", type=Path, help="greedy policy file; columns k,node,action"
    )
    reach.set_defaults(handler=_run_reach)

    rl = commands.add_parser(
        "rl", parents=[common], help="learned reach probability (JSON)"
    )
    rl.add_argument("--graph", type=Path, required=True)
    rl.add_argument("--target", type=parse_target, required=True)
    rl.add_argument("--start", type=positive_int, default=1)
    rl.add_argument("--mode", choices=["weak", "strong"], default="weak")
    rl.add_argument(
        "--trace", type=Path, help="per-episode estimates; columns episode,estimate"
    )
    _learning_options(rl)
    rl.set_defaults(handler=_run_rl)

    sir = commands.add_parser("sir", help="mobile-agent SIR analyses")
    sir_commands = sir.add_subparsers(dest="sir_command", required=True)

    analyze = sir_commands.add_parser(
        "analyze", parents=[common], help="columns k,expected,lower,upper"
    )
    analyze.add_argument("--config", type=Path, required=True)
    analyze.add_argument("--horizon", type=int, default=50)
    analyze.set_defaults(handler=_run_sir_analyze)

    simulate = sir_commands.add_parser(
        "simulate", parents=[common], help="columns k,mean,stderr"
    )
    simulate.add_argument("--config", type=Path, required=True)
    simulate.add_argument("--horizon", type=int, default=50)
    simulate.add_argument("--samples", type=positive_int, default=100_000)
    simulate.set_defaults(handler=_run_sir_simulate)

    sir_rl = sir_commands.add_parser(
        "rl", parents=[common], help="learned infection bounds (JSON)"
    )
    sir_rl.add_argument("--config", type=Path, required=True)
    _learning_options(sir_rl)
    sir_rl.set_defaults(handler=_run_sir_rl)

    validate = commands.add_parser(
        "validate", parents=[common], help="standing-assumption check (JSON)"
    )
    validate.add_argument("--graph", type=Path, required=True)
    validate.add_argument(
        "--augment", type=Path, help="write the sink-augmented graph here"
    )
    validate.set_defaults(handler=_run_validate)

    return parser


# -----------------------------
# Handlers
# -----------------------------


def _run_bounds(args: argparse.Namespace, dm: ReachabilityManager) -> None:
    frame = dm.bounds(args.graph)
    dm.emit(frame, args.out, pretty=args.pretty, title="Bound matrices")


def _run_pset(args: argparse.Namespace, dm: ReachabilityManager) -> None:
    frame = dm.pset(args.graph, args.cap, dedup=args.dedup)
    dm.emit(frame, args.out, pretty=args.pretty, title="Transition-matrix set")


def _run_mdp(args: argparse.Namespace, dm: ReachabilityManager) -> None:
    frame = dm.mdp_listing(args.graph)
    dm.emit(frame, args.out, pretty=args.pretty, title="Local MDP")


def _run_reach(args: argparse.Namespace, dm: ReachabilityManager) -> None:
    if args.infinite:
        solution = dm.reach_limit(args.graph, args.target, args.mode)
        frame = dm.reports.stationary_frame(solution)
        dm.emit(frame, args.out, pretty=args.pretty, title="Limit values")
        return

    table = dm.reach(args.graph, args.target, args.horizon, args.mode)
    frame = dm.reports.value_frame(table)
    dm.emit(frame, args.out, pretty=args.pretty, title=f"{args.mode} reach")
    if args.policy_out is not None:
        dm.emit(dm.reports.policy_frame(table), args.policy_out)


def _params(args: argparse.Namespace, settings: Settings) -> RlParams:
    return RlParams(
        learning_rate=args.lr,
        epsilon=args.epsilon,
        episodes=args.episodes,
        horizon_cap=settings.horizon_cap,
        seed=args.seed,
        discount=args.discount,
    )


def _run_rl(args: argparse.Namespace, dm: ReachabilityManager) -> None:
    result = dm.rl(
        args.graph,
        args.target,
        args.start,
        args.algo,
        _params(args, dm.settings),
        args.mode,
    )
    sign: float = 1.0 if args.mode == "weak" else -1.0
    payload: dict[str, object] = {
        "algo": result.algorithm,
        "estimate": result.estimate,
        "probability": sign * result.estimate,
        "episodes": result.params.episodes,
        "seed": result.params.seed,
        "rng": result.rng_algorithm,
    }
    dm.emit_document(payload, args.out, pretty=args.pretty, title="Learned estimate")
    if args.trace is not None:
        dm.emit(dm.reports.trace_frame(result), args.trace)


def _run_sir_analyze(args: argparse.Namespace, dm: ReachabilityManager) -> None:
    frame, summary = dm.sir_analyze(args.config, args.horizon)
    logger.info("Initial state decoded as %s", summary["x0"])
    # recorded in the run manifest parameters
    args.x0 = summary["x0"]
    args.x0_index = summary["x0_index"]
    dm.emit(frame, args.out, pretty=args.pretty, title="Cumulative infections")
    if args.pretty:
        dm.emit_document(summary, pretty=True, title="SIR summary")


def _run_sir_simulate(args: argparse.Namespace, dm: ReachabilityManager) -> None:
    frame = dm.sir_simulate(
        args.config, args.horizon, args.samples, args.seed, args.threads
    )
    dm.emit(frame, args.out, pretty=args.pretty, title="Monte Carlo")


def _run_sir_rl(args: argparse.Namespace, dm: ReachabilityManager) -> None:
    payload = dm.sir_rl(args.config, args.algo, _params(args, dm.settings))
    dm.emit_document(payload, args.out, pretty=args.pretty, title="Infection bounds")


def _run_validate(args: argparse.Namespace, dm: ReachabilityManager) -> None:
    report = dm.validate(args.graph, args.augment)
    if args.pretty and args.out is None:
        dm.show_graph(args.graph)
    dm.emit_document(report, args.out, pretty=args.pretty, title="Standing assumption")


# -----------------------------
# Entry point
# -----------------------------


def configure_logging(level: str) -> None:
    """Send package logs to stderr through rich."""
    handler = RichHandler(console=Console(stderr=True), show_path=False)
    package_logger = logging.getLogger("stochreach")
    package_logger.handlers.clear()
    package_logger.addHandler(handler)
    package_logger.setLevel(level.upper())
    package_logger.propagate = False


def _subcommand(args: argparse.Namespace) -> str:
    sub: str | None = getattr(args, "sir_command", None)
    return f"{args.command} {sub}" if sub else args.command


def _inputs(args: argparse.Namespace) -> list[Path]:
    return [p for name in ("graph", "config") if (p := getattr(args, name, None))]


def _parameters(args: argparse.Namespace) -> dict[str, object]:
    skipped = {"handler", "manifest", "pretty", "log_level"}
    return {
        key: str(value) if isinstance(value, Path) else value
        for key, value in sorted(vars(args).items())
        if key not in skipped
    }


def main(argv: Sequence[str] | None = None) -> int:
    """Run the CLI and return its exit status.

    0 on success, 1 on usage errors, missing files and malformed input,
    2 on domain and precondition errors.
    """
    args = build_parser().parse_args(argv)
    started: float = time.perf_counter()

    try:
        settings: Settings = load_settings(log_level=args.log_level)
        configure_logging(settings.log_level)

        leaf: str = _subcommand(args).split()[-1]
        if leaf in SEEDED_COMMANDS and args.seed is None:
            args.seed = fresh_seed()
            logger.warning("No --seed given; using %d", args.seed)

        dm = ReachabilityManager(settings, decimal=args.decimal)
        handler: Handler = args.handler
        handler(args, dm)
        dm.write_manifest(
            subcommand=_subcommand(args),
            parameters=_parameters(args),
            inputs=_inputs(args),
            seed=args.seed,
            started=started,
            out=args.out,
            manifest_out=args.manifest,
        )
    except (FileNotFoundError, InputFormatError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (ValueError, RuntimeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
