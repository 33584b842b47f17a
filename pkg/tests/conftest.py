# Standard library
import json
from collections.abc import Callable
from pathlib import Path

# Third-party
import numpy as np
import pytest

# Local imports
from stochreach.core.models import SirConfig, SirState, StochasticDigraph
from stochreach.services.epidemic_service import motion_graph

THIRD = 1.0 / 3.0
TWO_THIRDS = 2.0 / 3.0

FOUR_NODE_EDGE_SETS = (
    ((1, 2), (1, 3), (2, 1), (3, 1), (3, 4), (4, 2), (4, 3)),
    ((1, 3), (1, 4), (2, 4), (3, 4), (4, 3)),
)

THREE_AGENT_CONFIG = {
    "N": 3,
    "alpha": 0.7,
    "beta": 0.3,
    "motion": {
        "kappa": 5,
        "edges": [[1, 2], [2, 4], [4, 5], [5, 3], [1, 3]],
        "directed": False,
    },
    "x0": [[2, 1], [1, 1], [1, 2]],
}

RandomDigraph = Callable[..., StochasticDigraph]


@pytest.fixture
def four_node() -> StochasticDigraph:
    """Four-node graph with two edge sets drawn with probabilities 2/3 and 1/3."""
    return StochasticDigraph(4, FOUR_NODE_EDGE_SETS, (TWO_THIRDS, THIRD))


@pytest.fixture
def four_node_path(tmp_path: Path) -> Path:
    path = tmp_path / "four_node.json"
    payload = {
        "n": 4,
        "edge_sets": [[list(e) for e in edges] for edges in FOUR_NODE_EDGE_SETS],
        "mu": ["2/3", "1/3"],
    }
    path.write_text(json.dumps(payload))
    return path


@pytest.fixture(scope="session")
def three_agents() -> tuple[SirConfig, SirState]:
    """Three agents on a five-cycle, one of them infected."""
    motion = motion_graph(5, [(1, 2), (2, 4), (4, 5), (5, 3), (1, 3)])
    cfg = SirConfig(n_agents=3, alpha=0.7, beta=0.3, motion=motion)
    return cfg, SirState.from_pairs([(2, 1), (1, 1), (1, 2)])


@pytest.fixture
def three_agent_path(tmp_path: Path) -> Path:
    path = tmp_path / "sir.json"
    path.write_text(json.dumps(THREE_AGENT_CONFIG))
    return path


@pytest.fixture
def small_sir() -> SirConfig:
    """Two agents, two positions, moving freely (self-loops included)."""
    motion = motion_graph(2, [(1, 1), (1, 2), (2, 2)])
    return SirConfig(n_agents=2, alpha=0.5, beta=0.5, motion=motion)


@pytest.fixture
def random_digraph() -> RandomDigraph:
    """Factory for random graphs where every node has a successor in every draw."""

    def build(
        rng: np.random.Generator, max_n: int, max_h: int, max_degree: int
    ) -> StochasticDigraph:
        n = int(rng.integers(2, max_n + 1))
        h = int(rng.integers(1, max_h + 1))
        edge_sets: list[tuple[tuple[int, int], ...]] = []
        for _ in range(h):
            edges: list[tuple[int, int]] = []
            for i in range(1, n + 1):
                degree = int(rng.integers(1, min(max_degree, n) + 1))
                targets = rng.choice(np.arange(1, n + 1), size=degree, replace=False)
                edges.extend((i, int(j)) for j in targets)
            edge_sets.append(tuple(edges))
        weights = rng.random(h) + 0.1
        mu = list(weights / weights.sum())
        mu[-1] = 1.0 - sum(mu[:-1])
        return StochasticDigraph(n, tuple(edge_sets), tuple(mu))

    return build
