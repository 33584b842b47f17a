# Standard library
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from enum import IntEnum
from functools import cached_property
from typing import Literal, Protocol, TypedDict

# Third-party
import numpy as np
import numpy.typing as npt

# Local imports
from stochreach.core.validation import (
    ValidationError,
    validate_distribution,
    validate_edges,
    validate_mu,
    validate_node_count,
    validate_probability,
)

FloatMatrix = npt.NDArray[np.float64]
IntMatrix = npt.NDArray[np.int64]
Edge = tuple[int, int]
EdgeSet = tuple[Edge, ...]
RewardFn = Callable[[int, int, int], float]
BoundKind = Literal["upper", "lower"]
Objective = Literal["weak-reach", "strong-recur", "custom"]

# -----------------------------
# TypedDict Definitions
# -----------------------------


class StochasticDigraphPayload(TypedDict):
    """Canonical JSON form of a stochastic digraph."""

    n: int
    edge_sets: list[list[list[int]]]
    mu: list[str | float]


# -----------------------------
# Graph Models
# -----------------------------


def _canonical_edges(edges: Sequence[Sequence[int]]) -> EdgeSet:
    return tuple(sorted({(int(u), int(v)) for u, v in edges}))


@dataclass(frozen=True)
class Digraph:
    """Directed graph over nodes {1,...,n}; edges deduplicated and sorted."""

    n: int
    edges: EdgeSet = ()

    def __post_init__(self) -> None:
        validate_node_count(self.n)
        canonical: EdgeSet = _canonical_edges(self.edges)
        validate_edges(self.n, canonical)
        object.__setattr__(self, "edges", canonical)

    @cached_property
    def successors(self) -> tuple[tuple[int, ...], ...]:
        """Sorted out-neighbors, indexed by node - 1."""
        table: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            table[u - 1].append(v)
        return tuple(tuple(row) for row in table)

    def out_degree(self, node: int) -> int:
        return len(self.successors[node - 1])


@dataclass(frozen=True)
class StochasticDigraph:
    """Time-varying digraph whose edge set is drawn i.i.d. from edge_sets by mu."""

    n: int
    edge_sets: tuple[EdgeSet, ...]
    mu: tuple[float, ...]

    def __post_init__(self) -> None:
        validate_node_count(self.n)
        if len(self.edge_sets) == 0:
            msg = "A stochastic digraph needs at least one edge set"
            raise ValidationError(msg)
        if len(self.edge_sets) != len(self.mu):
            msg = (
                f"Got {len(self.edge_sets)} edge sets but {len(self.mu)} "
                "probabilities in mu"
            )
            raise ValidationError(msg)

        canonical: tuple[EdgeSet, ...] = tuple(
            _canonical_edges(edges) for edges in self.edge_sets
        )
        for edges in canonical:
            validate_edges(self.n, edges)
        mu: tuple[float, ...] = tuple(float(p) for p in self.mu)
        validate_mu(mu)

        object.__setattr__(self, "edge_sets", canonical)
        object.__setattr__(self, "mu", mu)

    @property
    def h(self) -> int:
        """Number of instantaneous digraphs."""
        return len(self.edge_sets)

    @cached_property
    def successor_table(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        """Out-neighbor sets H(x, w), indexed [w - 1][x - 1]."""
        return tuple(Digraph(self.n, edges).successors for edges in self.edge_sets)

    def instantaneous(self, w: int) -> Digraph:
        """The w-th instantaneous digraph."""
        return Digraph(self.n, self.edge_sets[w - 1])

    def mu_of(self, indices: Sequence[int]) -> float:
        """Extend mu from singletons to a set of edge-set indices by summation."""
        return float(sum(self.mu[w - 1] for w in set(indices)))


@dataclass(frozen=True)
class AugmentedDigraph:
    """Stochastic digraph with target proxy n+1 and terminal node n+2."""

    base: StochasticDigraph
    target: frozenset[int]

    @property
    def original_n(self) -> int:
        return self.base.n - 2

    @property
    def target_proxy(self) -> int:
        return self.base.n - 1

    @property
    def terminal(self) -> int:
        return self.base.n


# -----------------------------
# Bounds & Decomposition Models
# -----------------------------


@dataclass(frozen=True, eq=False)
class BoundMatrices:
    """Entrywise lower (L) and upper (M) one-step transition bounds."""

    lower: FloatMatrix
    upper: FloatMatrix


@dataclass(frozen=True, eq=False)
class ReachRecursionTable:
    """Finite-horizon reach recursion m(k, x) or l(k, x), rows indexed by k."""

    values: FloatMatrix
    target: frozenset[int]
    kind: BoundKind

    @property
    def horizon(self) -> int:
        return int(self.values.shape[0]) - 1

    def value(self, k: int, node: int) -> float:
        return float(self.values[k, node - 1])


@dataclass(frozen=True)
class OneRegularDecomposition:
    """All 1-regular subgraphs obtained by picking one out-edge per node."""

    pieces: tuple[Digraph, ...]
    source_index: int | None = None

    @property
    def count(self) -> int:
        return len(self.pieces)


@dataclass(frozen=True, eq=False)
class TransitionMatrixSet:
    """The right-stochastic matrices P_1,...,P_nu of the difference inclusion."""

    matrices: tuple[FloatMatrix, ...]

    @property
    def nu(self) -> int:
        return len(self.matrices)

    @property
    def n(self) -> int:
        return int(self.matrices[0].shape[0])

    def distinct(self, decimals: int = 12) -> "TransitionMatrixSet":
        """Drop matrices equal (after rounding) to an earlier one."""
        seen: set[bytes] = set()
        kept: list[FloatMatrix] = []
        for matrix in self.matrices:
            key: bytes = np.round(matrix, decimals).tobytes()
            if key not in seen:
                seen.add(key)
                kept.append(matrix)
        return TransitionMatrixSet(tuple(kept))


# -----------------------------
# MDP Models
# -----------------------------


@dataclass(frozen=True)
class TransitionDistribution:
    """Finite next-state distribution, outcomes sorted by next state."""

    outcomes: tuple[tuple[int, float], ...]

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.outcomes))
        validate_distribution(ordered)
        object.__setattr__(self, "outcomes", ordered)

    @classmethod
    def from_masses(cls, masses: Mapping[int, float]) -> "TransitionDistribution":
        """Build from a state -> mass mapping, dropping zero masses."""
        return cls(tuple((state, p) for state, p in masses.items() if p > 0.0))

    def prob(self, state: int) -> float:
        for next_state, p in self.outcomes:
            if next_state == state:
                return p
        return 0.0

    def as_dict(self) -> dict[int, float]:
        return dict(self.outcomes)

    def support(self) -> tuple[int, ...]:
        return tuple(state for state, _ in self.outcomes)


@dataclass(frozen=True)
class LocalActionSpace:
    """Local action space at one node: one successor per edge-set draw.

    A coordinate is None when H(i, w) is empty, which the standing
    assumption only permits for zero-probability draws.
    """

    node: int
    tuples: tuple[tuple[int | None, ...], ...]

    @property
    def nu(self) -> int:
        return len(self.tuples)


class MdpModel(Protocol):
    """Finite MDP with 1-based states and 1-based, state-local actions."""

    @property
    def n_states(self) -> int: ...

    def n_actions(self, state: int) -> int: ...

    def transition(self, state: int, action: int) -> TransitionDistribution: ...

    def reward(self, state: int, action: int, next_state: int) -> float: ...


# -----------------------------
# Value Models
# -----------------------------


@dataclass(frozen=True)
class Policy:
    """Stochastic policy: per state, a probability for each local action."""

    rows: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        for state, row in enumerate(self.rows, start=1):
            if len(row) == 0 or any(p < 0 for p in row) or abs(sum(row) - 1) > 1e-12:
                msg = f"Policy row for state {state} is not a distribution: {row}"
                raise ValidationError(msg)

    @classmethod
    def deterministic(
        cls, choices: Sequence[int], action_counts: Sequence[int]
    ) -> "Policy":
        """One action per state (1-based), given each state's action count."""
        rows: list[tuple[float, ...]] = []
        for state, (action, count) in enumerate(
            zip(choices, action_counts, strict=True), start=1
        ):
            if not 1 <= action <= count:
                msg = f"Action {action} invalid for state {state} ({count} actions)"
                raise ValidationError(msg)
            rows.append(tuple(1.0 if a == action else 0.0 for a in range(1, count + 1)))
        return cls(tuple(rows))

    def probability(self, state: int, action: int) -> float:
        return self.rows[state - 1][action - 1]


@dataclass(frozen=True, eq=False)
class ValueTable:
    """Finite-horizon values v(k, x); row k holds the k-step values.

    greedy[k - 1, x] is the 1-based argmax action at horizon k, ties going
    to the smallest action index.
    """

    values: FloatMatrix
    objective: Objective
    states: tuple[int, ...]
    greedy: IntMatrix | None = None

    @property
    def horizon(self) -> int:
        return int(self.values.shape[0]) - 1

    def value(self, k: int, state: int) -> float:
        return float(self.values[k, self.states.index(state)])


@dataclass(frozen=True, eq=False)
class StationaryValues:
    """Infinite-horizon optimal values with a greedy stationary policy."""

    values: FloatMatrix
    actions: IntMatrix
    iterations: int
    residual: float


# -----------------------------
# Reinforcement Learning Models
# -----------------------------


@dataclass(frozen=True)
class RlParams:
    """Hyperparameters of a tabular learning run."""

    learning_rate: float = 0.1
    epsilon: float = 0.1
    episodes: int = 10_000
    horizon_cap: int = 1_000
    seed: int = 0
    discount: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.learning_rate <= 1.0:
            msg = f"learning_rate must lie in (0, 1], got {self.learning_rate}"
            raise ValidationError(msg)
        validate_probability("epsilon", self.epsilon)
        if not 0.0 < self.discount <= 1.0:
            msg = f"discount must lie in (0, 1], got {self.discount}"
            raise ValidationError(msg)
        if self.episodes < 1 or self.horizon_cap < 1:
            msg = "episodes and horizon_cap must be positive"
            raise ValidationError(msg)
        if not 0 <= self.seed < 2**64:
            msg = f"seed must be a 64-bit unsigned integer, got {self.seed}"
            raise ValidationError(msg)


@dataclass
class QTable:
    """Action values and visit counts keyed by (state, action)."""

    values: dict[tuple[int, int], float] = field(default_factory=dict)
    visits: dict[tuple[int, int], int] = field(default_factory=dict)

    def q(self, state: int, action: int) -> float:
        return self.values.get((state, action), 0.0)


@dataclass(frozen=True)
class EpisodeStep:
    """One transition of a sampled episode."""

    state: int
    action: int
    reward: float
    next_state: int


@dataclass(frozen=True)
class RlResult:
    """Outcome of a learning run."""

    algorithm: Literal["sarsa", "qlearning"]
    estimate: float
    qtable: QTable
    trace: tuple[float, ...]
    params: RlParams
    rng_algorithm: str = "PCG64"


# -----------------------------
# Epidemic Models
# -----------------------------


class Status(IntEnum):
    """Epidemic status of an agent."""

    SUSCEPTIBLE = 1
    INFECTED = 2
    RECOVERED = 3


@dataclass(frozen=True)
class AgentState:
    """Epidemic status and 1-based motion-graph position of one agent."""

    sigma: Status
    pos: int


@dataclass(frozen=True)
class SirState:
    """Joint state of all agents."""

    agents: tuple[AgentState, ...]

    @classmethod
    def from_pairs(cls, pairs: Sequence[Sequence[int]]) -> "SirState":
        return cls(tuple(AgentState(Status(s), int(p)) for s, p in pairs))


@dataclass(frozen=True)
class SirConfig:
    """Agent-based SIR model over a motion graph."""

    n_agents: int
    alpha: float
    beta: float
    motion: Digraph

    def __post_init__(self) -> None:
        if self.n_agents < 1:
            msg = f"Agent count must be positive, got {self.n_agents}"
            raise ValidationError(msg)
        validate_probability("alpha", self.alpha)
        validate_probability("beta", self.beta)
        stuck: list[int] = [
            x for x in range(1, self.motion.n + 1) if self.motion.out_degree(x) == 0
        ]
        if stuck:
            msg = f"Motion graph nodes {stuck} have out-degree 0; agents cannot move"
            raise ValidationError(msg)

    @property
    def kappa(self) -> int:
        return self.motion.n

    @property
    def n_states(self) -> int:
        return (3 * self.kappa) ** self.n_agents


@dataclass(frozen=True, eq=False)
class InfectedTrajectory:
    """Per-step mean and standard error of theta over sampled trajectories."""

    mean: FloatMatrix
    stderr: FloatMatrix
    samples: int


# -----------------------------
# Run Manifest
# -----------------------------


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce one CLI run."""

    subcommand: str
    parameters: dict[str, object]
    input_hashes: dict[str, str]
    seed: int | None
    version: str
    created_at: str
    wall_clock_seconds: float
    rng_algorithm: str = "PCG64"
