# Standard library
import logging
import time
from collections.abc import Iterable, Sequence
from datetime import UTC, datetime
from pathlib import Path
from typing import TextIO

# Third-party
import numpy as np
import polars as pl

# Local imports
from stochreach.core.config import VERSION, Settings, load_settings
from stochreach.core.models import (
    AugmentedDigraph,
    RlParams,
    RlResult,
    RunManifest,
    SirConfig,
    SirState,
    StationaryValues,
    StochasticDigraph,
    ValueTable,
)
from stochreach.core.storage import get_manifest_path
from stochreach.core.utils import compute_file_hash
from stochreach.core.validation import ValidationError, validate_node
from stochreach.repositories.graph_repository import GraphRepository
from stochreach.repositories.output_repository import OutputRepository
from stochreach.services.bounds_service import compute_bound_matrices
from stochreach.services.decomposition_service import count_pset, enumerate_pset
from stochreach.services.display_service import DisplayService
from stochreach.services.epidemic_service import (
    BoundMode,
    SirMdp,
    encode,
    expected_infected_uniform,
    increment_reward,
    infected_bounds,
    monte_carlo,
    theta,
)
from stochreach.services.graph_service import (
    augment_for_target,
    augment_sink,
    check_standing_assumption,
)
from stochreach.services.mdp_service import attach_reward
from stochreach.services.reachability_service import (
    ReachMode,
    reach_mdp,
    reachability_limit,
    strong_recurrence,
    weak_reachability,
)
from stochreach.services.report_service import ReportService
from stochreach.services.rl_service import Algorithm, q_learning, sarsa, terminal_set

logger = logging.getLogger(__name__)

# -----------------------------
# Reachability Manager
# -----------------------------


class ReachabilityManager:
    """Single API surface for graph, reachability and epidemic analyses."""

    def __init__(
        self,
        settings: Settings | None = None,
        *,
        decimal: bool = False,
        stdout: TextIO | None = None,
        stderr: TextIO | None = None,
    ) -> None:
        self.settings: Settings = settings or load_settings()

        # Initialize repositories
        self._graph_repo = GraphRepository()
        self._output_repo = OutputRepository(stdout=stdout, stderr=stderr)

        # Initialize services
        self.reports: ReportService = ReportService(
            decimal=decimal,
            tolerance=self.settings.fraction_tolerance,
            max_denominator=self.settings.fraction_max_denominator,
        )
        self._display_service = DisplayService()

    # -----------------------------
    # Inputs
    # -----------------------------

    def load_graph(self, path: Path) -> StochasticDigraph:
        return self._graph_repo.load_digraph(path)

    def load_sir(self, path: Path) -> tuple[SirConfig, SirState]:
        return self._graph_repo.load_sir(path)

    # -----------------------------
    # Graph analyses
    # -----------------------------

    def bounds(self, graph: Path) -> pl.DataFrame:
        """Bound matrices L and M of a stochastic digraph."""
        return self.reports.bounds_frame(
            compute_bound_matrices(self.load_graph(graph))
        )

    def pset(
        self, graph: Path, cap: int | None = None, *, dedup: bool = False
    ) -> pl.DataFrame:
        """Every matrix of the set P, subject to the enumeration cap."""
        sd: StochasticDigraph = self.load_graph(graph)
        limit: int = cap if cap is not None else self.settings.pset_cap
        logger.info("nu=%d for %s (cap %d)", count_pset(sd), graph, limit)
        return self.reports.pset_frame(enumerate_pset(sd, limit, dedup=dedup))

    def mdp_listing(self, graph: Path) -> pl.DataFrame:
        """Local actions and transition laws, one row per positive p(j | i, a)."""
        return self.reports.local_mdp_frame(self.load_graph(graph))

    def reach(
        self,
        graph: Path,
        target: Iterable[int],
        horizon: int,
        mode: ReachMode = "weak",
    ) -> ValueTable:
        """Finite-horizon weak reachability or strong recurrence table."""
        sd: StochasticDigraph = self.load_graph(graph)
        if mode == "weak":
            return weak_reachability(sd, target, horizon)
        return strong_recurrence(sd, target, horizon)

    def reach_limit(
        self, graph: Path, target: Iterable[int], mode: ReachMode = "weak"
    ) -> StationaryValues:
        """Infinite-horizon counterpart of reach."""
        return reachability_limit(
            self.load_graph(graph),
            target,
            mode,
            tol=self.settings.vi_tol,
            max_iter=self.settings.vi_max_iter,
        )

    def rl(
        self,
        graph: Path,
        target: Iterable[int],
        start: int,
        algorithm: Algorithm,
        params: RlParams,
        mode: ReachMode = "weak",
    ) -> RlResult:
        """Learn the reach probability from start on the augmented digraph.

        Episodes end on entering the target proxy n+1, after which no
        further reward is possible.
        """
        sd: StochasticDigraph = self.load_graph(graph)
        validate_node(sd.n, start)
        aug: AugmentedDigraph = augment_for_target(sd, target)
        terminal = terminal_set({aug.target_proxy, aug.terminal})
        learner = sarsa if algorithm == "sarsa" else q_learning
        return learner(reach_mdp(aug, mode), start, terminal, params)

    def show_graph(self, graph: Path) -> None:
        """Print every instantaneous digraph of a graph file with its probability."""
        self._display_service.show_graph(self.load_graph(graph))

    def validate(
        self, graph: Path, augment_out: Path | None = None
    ) -> dict[str, object]:
        """Standing-assumption report; optionally save the sink-augmented graph."""
        sd: StochasticDigraph = self.load_graph(graph)
        violations: list[tuple[int, int]] = check_standing_assumption(sd)
        report: dict[str, object] = {
            "n": sd.n,
            "h": sd.h,
            "standing_assumption": not violations,
            "violations": [{"node": i, "edge_set": w} for i, w in violations],
        }
        if augment_out is not None:
            repaired: StochasticDigraph = augment_sink(sd)
            self._graph_repo.save_digraph(repaired, augment_out)
            report["augmented"] = str(augment_out)
            report["augmented_n"] = repaired.n
        return report

    # -----------------------------
    # Epidemic analyses
    # -----------------------------

    def _sir_mdp(self, cfg: SirConfig, x0: SirState) -> SirMdp:
        return SirMdp(cfg, x0, state_cap=self.settings.sir_state_cap)

    def sir_analyze(
        self, config: Path, horizon: int
    ) -> tuple[pl.DataFrame, dict[str, object]]:
        """Expected cumulative infections under uniform motion plus exact bounds."""
        cfg, x0 = self.load_sir(config)
        mdp: SirMdp = self._sir_mdp(cfg, x0)
        expected = expected_infected_uniform(cfg, x0, horizon, mdp=mdp)
        lower: float = infected_bounds(
            cfg,
            x0,
            "lower",
            mdp=mdp,
            tol=self.settings.vi_tol,
            max_iter=self.settings.vi_max_iter,
        )
        upper: float = infected_bounds(
            cfg,
            x0,
            "upper",
            mdp=mdp,
            tol=self.settings.vi_tol,
            max_iter=self.settings.vi_max_iter,
        )
        summary: dict[str, object] = {
            "x0": [[int(a.sigma), a.pos] for a in x0.agents],
            "x0_index": encode(x0, cfg),
            "theta_x0": theta(x0),
            "reachable_states": mdp.n_states,
            "total_states": cfg.n_states,
            "lower": lower,
            "upper": upper,
        }
        return self.reports.sir_analysis_frame(expected, lower, upper), summary

    def sir_simulate(
        self,
        config: Path,
        horizon: int,
        samples: int,
        seed: int,
        threads: int = 1,
    ) -> pl.DataFrame:
        """Monte Carlo mean and standard error of cumulative infections."""
        cfg, x0 = self.load_sir(config)
        trajectory = monte_carlo(
            cfg,
            x0,
            horizon,
            samples,
            seed,
            threads=threads,
            chunk_size=self.settings.mc_chunk_size,
        )
        return self.reports.monte_carlo_frame(trajectory)

    def sir_rl(
        self, config: Path, algorithm: Algorithm, params: RlParams
    ) -> dict[str, object]:
        """Learned upper and lower cumulative-infection bounds.

        The upper run maximizes theta(j) - theta(i) and the lower run
        theta(i) - theta(j); both start from x0 and stop once no agent is
        infected.
        """
        cfg, x0 = self.load_sir(config)
        mdp: SirMdp = self._sir_mdp(cfg, x0)
        learner = sarsa if algorithm == "sarsa" else q_learning
        start: int = mdp.local_index(x0)
        level: int = theta(x0)

        results: dict[str, object] = {"algo": algorithm, "theta_x0": level}
        modes: Sequence[BoundMode] = ("upper", "lower")
        for mode in modes:
            rewarded = attach_reward(mdp, increment_reward(mdp, mode))
            result: RlResult = learner(rewarded, start, mdp.is_terminal, params)
            results[f"{mode}_estimate"] = result.estimate
            results[f"{mode}_bound"] = (
                level + result.estimate if mode == "upper" else level - result.estimate
            )
        results["episodes"] = params.episodes
        results["seed"] = params.seed
        return results

    # -----------------------------
    # Outputs
    # -----------------------------

    def emit(
        self,
        frame: pl.DataFrame,
        out: Path | None = None,
        *,
        pretty: bool = False,
        title: str = "",
    ) -> None:
        """Write a table, or render it with rich when pretty is set and out is None."""
        if pretty and out is None:
            self._display_service.show_frame(frame, title)
            return
        self._output_repo.write_frame(frame, out)

    def emit_document(
        self,
        payload: dict[str, object],
        out: Path | None = None,
        *,
        pretty: bool = False,
        title: str = "",
    ) -> None:
        if pretty and out is None:
            self._display_service.show_summary(title, payload)
            return
        self._output_repo.write_document(payload, out)

    def write_manifest(
        self,
        subcommand: str,
        parameters: dict[str, object],
        inputs: Sequence[Path],
        seed: int | None,
        started: float,
        out: Path | None = None,
        manifest_out: Path | None = None,
    ) -> RunManifest:
        """Record the run; next to out when no manifest path is given."""
        manifest = RunManifest(
            subcommand=subcommand,
            parameters=parameters,
            input_hashes={str(p): compute_file_hash(p) for p in inputs if p.is_file()},
            seed=seed,
            version=VERSION,
            created_at=datetime.now(UTC).isoformat(),
            wall_clock_seconds=round(time.perf_counter() - started, 6),
        )
        target: Path | None = manifest_out
        if target is None and out is not None:
            target = get_manifest_path(out)
        self._output_repo.write_manifest(manifest, target)
        return manifest


def fresh_seed() -> int:
    """Random 63-bit seed for runs that were not given one."""
    return int(np.random.SeedSequence().entropy) % (2**63)


def parse_target(raw: str) -> list[int]:
    """Parse a comma-separated target set such as "2,4"."""
    try:
        nodes: list[int] = [int(part) for part in raw.split(",") if part.strip()]
    except ValueError as exc:
        msg = f"Target must be comma-separated node numbers, got {raw!r}"
        raise ValidationError(msg) from exc
    if not nodes:
        msg = "Target set must be nonempty"
        raise ValidationError(msg)
    return nodes
