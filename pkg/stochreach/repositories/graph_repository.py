# Standard library
import json
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any

# Local imports
from stochreach.core.models import (
    SirConfig,
    SirState,
    StochasticDigraph,
    StochasticDigraphPayload,
)
from stochreach.core.utils import as_fraction, parse_probability
from stochreach.core.validation import (
    InputFormatError,
    ValidationError,
    validate_edges,
    validate_mu,
    validate_node_count,
    validate_probability,
)
from stochreach.services.epidemic_service import motion_graph

# -----------------------------
# Graph Repository
# -----------------------------


class GraphRepository:
    """Repository for stochastic-digraph and SIR configuration JSON files.

    Stochastic digraph format:
        {"n": 4, "edge_sets": [[[1, 2], [1, 3]], ...], "mu": ["2/3", "1/3"]}
    """

    # -----------------------------
    # Stochastic digraphs
    # -----------------------------

    def load_digraph(self, path: Path) -> StochasticDigraph:
        """Load a stochastic digraph.

        Raises:
            FileNotFoundError: If path does not exist
            InputFormatError: If a field is missing or malformed
        """
        payload: dict[str, Any] = self._read_object(path)
        source: str = str(path)

        n: int = self._integer(payload, "n", source)
        with self._blamed(source, "n"):
            validate_node_count(n)

        edge_sets_raw = self._field(payload, "edge_sets", source)
        if not isinstance(edge_sets_raw, list) or not edge_sets_raw:
            msg = "expected a nonempty list of edge lists"
            raise InputFormatError(source, "edge_sets", msg)
        edge_sets: list[tuple[tuple[int, int], ...]] = []
        for w, edges in enumerate(edge_sets_raw):
            field: str = f"edge_sets[{w}]"
            if not isinstance(edges, list):
                raise InputFormatError(source, field, "expected a list of [i, j] pairs")
            pairs = tuple(self._pair(edge, field, source) for edge in edges)
            with self._blamed(source, field):
                validate_edges(n, pairs)
            edge_sets.append(pairs)

        mu_raw = self._field(payload, "mu", source)
        if not isinstance(mu_raw, list):
            raise InputFormatError(source, "mu", "expected a list of probabilities")
        mu: list[float] = []
        for w, raw in enumerate(mu_raw):
            try:
                mu.append(parse_probability(raw))
            except ValidationError as exc:
                raise InputFormatError(source, f"mu[{w}]", str(exc)) from exc
        if len(mu) != len(edge_sets):
            msg = f"has {len(mu)} entries for {len(edge_sets)} edge sets"
            raise InputFormatError(source, "mu", msg)
        with self._blamed(source, "mu"):
            validate_mu(mu)

        return StochasticDigraph(n, tuple(edge_sets), tuple(mu))

    def save_digraph(self, sd: StochasticDigraph, path: Path) -> None:
        """Write the canonical form: sorted edges, mu as fractions where exact."""
        payload: StochasticDigraphPayload = {
            "n": sd.n,
            "edge_sets": [[[u, v] for u, v in edges] for edges in sd.edge_sets],
            "mu": [self._mu_entry(p) for p in sd.mu],
        }
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, indent=2) + "\n")

    # -----------------------------
    # SIR configurations
    # -----------------------------

    def load_sir(self, path: Path) -> tuple[SirConfig, SirState]:
        """Load an SIR model and its initial state.

        Format:
            {"N": 3, "alpha": 0.7, "beta": 0.3,
             "motion": {"kappa": 5, "edges": [[1, 2], ...], "directed": false},
             "x0": [[2, 1], [1, 1], [1, 2]]}
        """
        payload: dict[str, Any] = self._read_object(path)
        source: str = str(path)

        n_agents: int = self._integer(payload, "N", source)
        if n_agents < 1:
            msg = f"expected at least one agent, got {n_agents}"
            raise InputFormatError(source, "N", msg)
        alpha: float = self._probability(payload, "alpha", source)
        beta: float = self._probability(payload, "beta", source)

        motion_raw = self._field(payload, "motion", source)
        if not isinstance(motion_raw, dict):
            raise InputFormatError(source, "motion", "expected an object")
        kappa: int = self._integer(motion_raw, "kappa", source, prefix="motion.")
        edges_raw = self._field(motion_raw, "edges", source, prefix="motion.")
        if not isinstance(edges_raw, list):
            raise InputFormatError(source, "motion.edges", "expected a list of pairs")
        edges = [self._pair(edge, "motion.edges", source) for edge in edges_raw]
        directed = motion_raw.get("directed", False)
        if not isinstance(directed, bool):
            raise InputFormatError(source, "motion.directed", "expected true or false")

        x0_raw = self._field(payload, "x0", source)
        if not isinstance(x0_raw, list):
            msg = "expected a list of [sigma, pos] pairs"
            raise InputFormatError(source, "x0", msg)
        pairs = [self._pair(agent, "x0", source) for agent in x0_raw]

        try:
            motion = motion_graph(kappa, edges, directed=directed)
        except ValidationError as exc:
            raise InputFormatError(source, "motion", str(exc)) from exc
        try:
            cfg = SirConfig(n_agents=n_agents, alpha=alpha, beta=beta, motion=motion)
        except ValidationError as exc:
            raise InputFormatError(source, "motion", str(exc)) from exc
        try:
            x0 = SirState.from_pairs(pairs)
        except ValueError as exc:
            raise InputFormatError(source, "x0", str(exc)) from exc
        if len(x0.agents) != n_agents:
            raise InputFormatError(
                source, "x0", f"has {len(x0.agents)} agents, N is {n_agents}"
            )
        if any(not 1 <= agent.pos <= kappa for agent in x0.agents):
            raise InputFormatError(source, "x0", f"positions must lie in 1..{kappa}")
        return cfg, x0

    # -----------------------------
    # Field helpers
    # -----------------------------

    @staticmethod
    def _read_object(path: Path) -> dict[str, Any]:
        if not path.is_file():
            msg = f"Input file not found: {path}"
            raise FileNotFoundError(msg)
        try:
            payload = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise InputFormatError(str(path), "<root>", f"invalid JSON: {exc}") from exc
        if not isinstance(payload, dict):
            raise InputFormatError(str(path), "<root>", "expected a JSON object")
        return payload

    @staticmethod
    def _field(
        payload: dict[str, Any], name: str, source: str, prefix: str = ""
    ) -> Any:
        if name not in payload:
            raise InputFormatError(source, prefix + name, "missing")
        return payload[name]

    def _integer(
        self, payload: dict[str, Any], name: str, source: str, prefix: str = ""
    ) -> int:
        value = self._field(payload, name, source, prefix)
        if isinstance(value, bool) or not isinstance(value, int):
            msg = f"expected an integer, got {value!r}"
            raise InputFormatError(source, prefix + name, msg)
        return value

    def _probability(self, payload: dict[str, Any], name: str, source: str) -> float:
        try:
            value: float = parse_probability(self._field(payload, name, source))
            validate_probability(name, value)
        except ValidationError as exc:
            if isinstance(exc, InputFormatError):
                raise
            raise InputFormatError(source, name, str(exc)) from exc
        return value

    @staticmethod
    def _pair(raw: object, field: str, source: str) -> tuple[int, int]:
        if (
            not isinstance(raw, list)
            or len(raw) != 2  # noqa: PLR2004
            or any(isinstance(x, bool) or not isinstance(x, int) for x in raw)
        ):
            msg = f"expected an integer pair, got {raw!r}"
            raise InputFormatError(source, field, msg)
        return int(raw[0]), int(raw[1])

    @staticmethod
    @contextmanager
    def _blamed(source: str, field: str) -> Iterator[None]:
        """Re-raise ValidationError as an InputFormatError naming field."""
        try:
            yield
        except ValidationError as exc:
            raise InputFormatError(source, field, str(exc)) from exc

    @staticmethod
    def _mu_entry(p: float) -> str | float:
        fraction = as_fraction(p)
        return str(fraction) if fraction is not None else p
