# Standard library
import itertools
import logging
import math
from collections import defaultdict
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import Literal

# Third-party
import numpy as np

# Local imports
from stochreach.core.models import (
    AgentState,
    Digraph,
    Edge,
    FloatMatrix,
    InfectedTrajectory,
    IntMatrix,
    RewardFn,
    SirConfig,
    SirState,
    StationaryValues,
    Status,
    StochasticDigraph,
    TransitionDistribution,
)
from stochreach.core.validation import (
    PreconditionError,
    ValidationError,
    validate_horizon,
)
from stochreach.services.mdp_service import (
    CompiledMdp,
    attach_reward,
    compile_mdp,
    zero_reward,
)
from stochreach.services.reachability_service import (
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_TOLERANCE,
    solve_stationary,
)

logger = logging.getLogger(__name__)

# -----------------------------
# Constants
# -----------------------------

DEFAULT_STATE_CAP = 200_000
DEFAULT_EXPLICIT_CAP = 100_000
DEFAULT_CHUNK_SIZE = 1_000

BoundMode = Literal["upper", "lower"]
Draw = tuple[int, ...]

SUSCEPTIBLE = int(Status.SUSCEPTIBLE)
INFECTED = int(Status.INFECTED)
RECOVERED = int(Status.RECOVERED)

# -----------------------------
# Motion graphs
# -----------------------------


def motion_graph(
    kappa: int, edges: Sequence[Sequence[int]], *, directed: bool = False
) -> Digraph:
    """Motion graph over positions 1..kappa; undirected edges go both ways."""
    pairs: list[Edge] = [(int(u), int(v)) for u, v in edges]
    if not directed:
        pairs += [(v, u) for u, v in pairs]
    return Digraph(kappa, tuple(pairs))


# -----------------------------
# State encoding
# -----------------------------


def _validate_state(state: SirState, cfg: SirConfig) -> None:
    if len(state.agents) != cfg.n_agents:
        msg = f"State has {len(state.agents)} agents, model has {cfg.n_agents}"
        raise ValidationError(msg)
    for i, agent in enumerate(state.agents, start=1):
        if agent.sigma not in (1, 2, 3):
            msg = f"Agent {i} has status {agent.sigma}, expected 1, 2 or 3"
            raise ValidationError(msg)
        if not 1 <= agent.pos <= cfg.kappa:
            msg = f"Agent {i} at position {agent.pos}, outside 1..{cfg.kappa}"
            raise ValidationError(msg)


def encode(state: SirState, cfg: SirConfig) -> int:
    """Mixed-radix index in 1..(3 kappa)^N, agent 1 most significant.

    Agent i contributes the digit (sigma_i - 1) kappa + (pos_i - 1).

    Example:
        all agents (1, 1) -> 1
    """
    _validate_state(state, cfg)
    base: int = 3 * cfg.kappa
    index: int = 0
    for agent in state.agents:
        index = index * base + (int(agent.sigma) - 1) * cfg.kappa + agent.pos - 1
    return index + 1


def decode(index: int, cfg: SirConfig) -> SirState:
    """Inverse of encode."""
    if not 1 <= index <= cfg.n_states:
        msg = f"State index {index} outside 1..{cfg.n_states}"
        raise ValidationError(msg)
    base: int = 3 * cfg.kappa
    rest: int = index - 1
    digits: list[int] = []
    for _ in range(cfg.n_agents):
        rest, digit = divmod(rest, base)
        digits.append(digit)
    return SirState(
        tuple(
            AgentState(Status(digit // cfg.kappa + 1), digit % cfg.kappa + 1)
            for digit in reversed(digits)
        )
    )


def theta(state: SirState) -> int:
    """Number of agents ever infected (infected or recovered)."""
    return sum(1 for agent in state.agents if agent.sigma != Status.SUSCEPTIBLE)


# -----------------------------
# Analytic dynamics
# -----------------------------


def sir_actions(state: SirState, cfg: SirConfig) -> list[tuple[int, ...]]:
    """Joint motions: one out-neighbor of the current position per agent."""
    _validate_state(state, cfg)
    return list(
        itertools.product(*(cfg.motion.successors[a.pos - 1] for a in state.agents))
    )


def _infected_contacts(state: SirState, i: int) -> int:
    me: AgentState = state.agents[i]
    return sum(
        1
        for j, other in enumerate(state.agents)
        if j != i and other.pos == me.pos and other.sigma == Status.INFECTED
    )


def _status_outcomes(
    state: SirState, i: int, cfg: SirConfig
) -> list[tuple[Status, float]]:
    sigma: Status = state.agents[i].sigma
    if sigma == Status.SUSCEPTIBLE:
        infection: float = 1.0 - (1.0 - cfg.alpha) ** _infected_contacts(state, i)
        options = [(Status.SUSCEPTIBLE, 1.0 - infection), (Status.INFECTED, infection)]
    elif sigma == Status.INFECTED:
        options = [(Status.INFECTED, 1.0 - cfg.beta), (Status.RECOVERED, cfg.beta)]
    else:
        options = [(Status.RECOVERED, 1.0)]
    return [(status, p) for status, p in options if p > 0.0]


def sir_transition(
    state: SirState, action: Sequence[int], cfg: SirConfig
) -> TransitionDistribution:
    """Next-state law over state indices under a joint motion.

    Statuses update independently given the current positions; positions
    follow the action.
    """
    _validate_state(state, cfg)
    if len(action) != cfg.n_agents:
        msg = f"Action has {len(action)} moves, model has {cfg.n_agents} agents"
        raise ValidationError(msg)
    for i, (agent, target) in enumerate(zip(state.agents, action, strict=True), 1):
        if target not in cfg.motion.successors[agent.pos - 1]:
            msg = f"Agent {i} cannot move from {agent.pos} to {target}"
            raise ValidationError(msg)

    per_agent = [_status_outcomes(state, i, cfg) for i in range(cfg.n_agents)]
    masses: dict[int, float] = defaultdict(float)
    for combo in itertools.product(*per_agent):
        nxt = SirState(
            tuple(
                AgentState(status, pos)
                for (status, _), pos in zip(combo, action, strict=True)
            )
        )
        masses[encode(nxt, cfg)] += math.prod(p for _, p in combo)
    return TransitionDistribution.from_masses(masses)


# -----------------------------
# Reachable-state MDP
# -----------------------------


class SirMdp:
    """SIR model as an MDP over the states reachable from x0.

    Local states are numbered in breadth-first discovery order, x0 being
    state 1; labels maps them back to global indices.
    """

    def __init__(
        self,
        cfg: SirConfig,
        x0: SirState,
        reward: RewardFn = zero_reward,
        state_cap: int = DEFAULT_STATE_CAP,
    ) -> None:
        self.cfg: SirConfig = cfg
        self._reward: RewardFn = reward
        root: int = encode(x0, cfg)
        self.labels: list[int] = [root]
        self._local: dict[int, int] = {root: 1}
        self._actions: list[tuple[tuple[int, ...], ...]] = []
        self._laws: list[tuple[TransitionDistribution, ...]] = []

        cursor: int = 0
        while cursor < len(self.labels):
            state: SirState = decode(self.labels[cursor], cfg)
            actions = tuple(sir_actions(state, cfg))
            laws: list[TransitionDistribution] = []
            for action in actions:
                law = sir_transition(state, action, cfg)
                for label in law.support():
                    if label not in self._local:
                        self.labels.append(label)
                        self._local[label] = len(self.labels)
                laws.append(
                    TransitionDistribution(
                        tuple((self._local[label], p) for label, p in law.outcomes)
                    )
                )
            self._actions.append(actions)
            self._laws.append(tuple(laws))
            cursor += 1
            if len(self.labels) > state_cap:
                msg = (
                    f"Reachable SIR state space exceeds {state_cap} states; "
                    "reduce N or kappa, or raise the cap"
                )
                raise PreconditionError(msg)

        self.theta: IntMatrix = np.asarray(
            [theta(decode(label, cfg)) for label in self.labels], dtype=np.int64
        )
        logger.info(
            "SIR closure from state %d: %d of %d states",
            root,
            len(self.labels),
            cfg.n_states,
        )

    @property
    def n_states(self) -> int:
        return len(self.labels)

    def n_actions(self, state: int) -> int:
        return len(self._actions[state - 1])

    def action(self, state: int, action: int) -> tuple[int, ...]:
        """Joint motion behind a local action."""
        return self._actions[state - 1][action - 1]

    def transition(self, state: int, action: int) -> TransitionDistribution:
        laws = self._laws[state - 1]
        if not 1 <= action <= len(laws):
            msg = f"Action {action} outside {{1,...,{len(laws)}}} at state {state}"
            raise ValidationError(msg)
        return laws[action - 1]

    def reward(self, state: int, action: int, next_state: int) -> float:
        return self._reward(state, action, next_state)

    def local_index(self, state: SirState) -> int:
        label: int = encode(state, self.cfg)
        if label not in self._local:
            msg = f"State {label} is not reachable from the initial state"
            raise ValidationError(msg)
        return self._local[label]

    def state_of(self, local: int) -> SirState:
        return decode(self.labels[local - 1], self.cfg)

    def is_terminal(self, local: int) -> bool:
        """No infected agents left, so theta is frozen."""
        return not any(
            agent.sigma == Status.INFECTED for agent in self.state_of(local).agents
        )


def increment_reward(mdp: SirMdp, mode: BoundMode) -> RewardFn:
    """theta(j) - theta(i) for the upper bound, theta(i) - theta(j) for the lower."""
    sign: int = 1 if mode == "upper" else -1
    levels: IntMatrix = mdp.theta

    def reward(state: int, action: int, next_state: int) -> float:  # noqa: ARG001
        return float(sign * (levels[next_state - 1] - levels[state - 1]))

    return reward


# -----------------------------
# Expected and extremal infections
# -----------------------------


def expected_infected_uniform(
    cfg: SirConfig,
    x0: SirState,
    horizon: int,
    mdp: SirMdp | None = None,
) -> FloatMatrix:
    """Expected theta at steps 0..horizon when every agent moves uniformly."""
    validate_horizon(horizon)
    mdp = mdp or SirMdp(cfg, x0)
    compiled: CompiledMdp = compile_mdp(mdp)

    counts: IntMatrix = compiled.action_counts()
    choice_weight: FloatMatrix = 1.0 / counts[compiled.choice_state]
    trans_weight: FloatMatrix = (
        choice_weight[compiled.trans_choice] * compiled.trans_prob
    )
    trans_source: IntMatrix = compiled.choice_state[compiled.trans_choice]
    levels: FloatMatrix = mdp.theta.astype(np.float64)

    rho: FloatMatrix = np.zeros(mdp.n_states)
    rho[mdp.local_index(x0) - 1] = 1.0
    expected: FloatMatrix = np.zeros(horizon + 1)
    for k in range(horizon + 1):
        expected[k] = float(rho @ levels)
        rho = np.bincount(
            compiled.trans_next,
            weights=rho[trans_source] * trans_weight,
            minlength=mdp.n_states,
        )
    return expected


def infected_bounds(
    cfg: SirConfig,
    x0: SirState,
    mode: BoundMode,
    mdp: SirMdp | None = None,
    tol: float = DEFAULT_TOLERANCE,
    max_iter: int = DEFAULT_MAX_ITERATIONS,
) -> float:
    """Asymptotic upper or lower bound on the cumulative number of infected agents.

    Solves the infinite-horizon problem with the increment reward; the
    upper bound is theta(x0) + v and the lower bound theta(x0) - v.
    """
    mdp = mdp or SirMdp(cfg, x0)
    rewarded = attach_reward(mdp, increment_reward(mdp, mode))
    solution: StationaryValues = solve_stationary(rewarded, tol, max_iter)
    start: int = mdp.local_index(x0)
    value: float = float(solution.values[start - 1])
    level: int = theta(x0)
    return level + value if mode == "upper" else level - value


# -----------------------------
# Monte Carlo
# -----------------------------


def _motion_arrays(cfg: SirConfig) -> tuple[IntMatrix, IntMatrix]:
    degree: IntMatrix = np.asarray(
        [len(row) for row in cfg.motion.successors], dtype=np.int64
    )
    padded: IntMatrix = np.zeros((cfg.kappa, int(degree.max())), dtype=np.int64)
    for x, row in enumerate(cfg.motion.successors):
        padded[x, : len(row)] = np.asarray(row) - 1
    return padded, degree


def _simulate_chunk(
    cfg: SirConfig,
    x0: SirState,
    horizon: int,
    size: int,
    seed: np.random.SeedSequence,
) -> IntMatrix:
    rng = np.random.Generator(np.random.PCG64(seed))
    padded, degree = _motion_arrays(cfg)
    sigma: IntMatrix = np.tile([int(a.sigma) for a in x0.agents], (size, 1))
    pos: IntMatrix = np.tile([a.pos - 1 for a in x0.agents], (size, 1))

    levels: IntMatrix = np.zeros((size, horizon + 1), dtype=np.int64)
    levels[:, 0] = (sigma != SUSCEPTIBLE).sum(axis=1)
    for k in range(1, horizon + 1):
        infected = sigma == INFECTED
        colocated = pos[:, :, None] == pos[:, None, :]
        contacts: IntMatrix = (colocated & infected[:, None, :]).sum(axis=2)
        p_infect: FloatMatrix = 1.0 - (1.0 - cfg.alpha) ** contacts

        infect_draw: FloatMatrix = rng.random(sigma.shape)
        recover_draw: FloatMatrix = rng.random(sigma.shape)
        move_draw: FloatMatrix = rng.random(sigma.shape)

        newly_infected = (sigma == SUSCEPTIBLE) & (infect_draw < p_infect)
        recovered = infected & (recover_draw < cfg.beta)
        sigma = np.where(newly_infected, INFECTED, sigma)
        sigma = np.where(recovered, RECOVERED, sigma)

        choice: IntMatrix = (move_draw * degree[pos]).astype(np.int64)
        pos = padded[pos, choice]
        levels[:, k] = (sigma != SUSCEPTIBLE).sum(axis=1)
    return levels


def sample_theta_paths(
    cfg: SirConfig,
    x0: SirState,
    horizon: int,
    samples: int,
    seed: int,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> IntMatrix:
    """theta along independent uniform-motion trajectories, one row per sample.

    Each fixed-size chunk draws from its own stream spawned from seed, so
    the result does not depend on threads.
    """
    _validate_state(x0, cfg)
    validate_horizon(horizon)
    if samples < 1 or chunk_size < 1 or threads < 1:
        msg = "samples, chunk_size and threads must be positive"
        raise ValidationError(msg)

    sizes: list[int] = [
        min(chunk_size, samples - start) for start in range(0, samples, chunk_size)
    ]
    streams = np.random.SeedSequence(seed).spawn(len(sizes))

    def run(job: tuple[int, np.random.SeedSequence]) -> IntMatrix:
        size, stream = job
        return _simulate_chunk(cfg, x0, horizon, size, stream)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        blocks: list[IntMatrix] = list(pool.map(run, zip(sizes, streams, strict=True)))
    logger.debug("Simulated %d trajectories in %d chunks", samples, len(sizes))
    return np.concatenate(blocks, axis=0)


def monte_carlo(
    cfg: SirConfig,
    x0: SirState,
    horizon: int,
    samples: int,
    seed: int,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> InfectedTrajectory:
    """Per-step sample mean and standard error of theta."""
    paths: IntMatrix = sample_theta_paths(
        cfg, x0, horizon, samples, seed, threads, chunk_size
    )
    mean: FloatMatrix = paths.mean(axis=0)
    if samples > 1:
        stderr: FloatMatrix = paths.std(axis=0, ddof=1) / math.sqrt(samples)
    else:
        stderr = np.zeros(horizon + 1)
    return InfectedTrajectory(mean=mean, stderr=stderr, samples=samples)


# -----------------------------
# Explicit random-input digraph
# -----------------------------


def draw_count(cfg: SirConfig) -> int:
    """2^(N^2 + N) joint draws of the infection and recovery inputs."""
    return 2 ** (cfg.n_agents**2 + cfg.n_agents)


def draw_mass(draw: Draw, cfg: SirConfig) -> float:
    """Probability of a draw (u_1, v_1, ..., u_N, v_N) with entries in {1, 2}."""
    n: int = cfg.n_agents
    mass: float = 1.0
    for i in range(n):
        block: Draw = draw[i * (n + 1) : (i + 1) * (n + 1)]
        for u in block[:n]:
            mass *= cfg.alpha if u == 2 else 1.0 - cfg.alpha  # noqa: PLR2004
        mass *= cfg.beta if block[n] == 2 else 1.0 - cfg.beta  # noqa: PLR2004
    return mass


def statuses_under_draw(
    state: SirState, draw: Draw, cfg: SirConfig
) -> tuple[Status, ...]:
    """Next statuses once the random inputs are fixed.

    A susceptible agent i is infected when some infected agent j shares its
    position and the j-th entry of u_i equals 2; an infected agent moves to
    status v_i + 1.
    """
    n: int = cfg.n_agents
    result: list[Status] = []
    for i, agent in enumerate(state.agents):
        u: Draw = draw[i * (n + 1) : i * (n + 1) + n]
        v: int = draw[i * (n + 1) + n]
        if agent.sigma == Status.SUSCEPTIBLE:
            hit: bool = any(
                j != i
                and other.pos == agent.pos
                and other.sigma == Status.INFECTED
                and u[j] == 2  # noqa: PLR2004
                for j, other in enumerate(state.agents)
            )
            result.append(Status.INFECTED if hit else Status.SUSCEPTIBLE)
        elif agent.sigma == Status.INFECTED:
            result.append(Status(v + 1))
        else:
            result.append(Status.RECOVERED)
    return tuple(result)


def draw_successors(state: SirState, draw: Draw, cfg: SirConfig) -> frozenset[int]:
    """Successor indices of a state in the instantaneous digraph of one draw."""
    statuses = statuses_under_draw(state, draw, cfg)
    return frozenset(
        encode(
            SirState(
                tuple(
                    AgentState(s, p) for s, p in zip(statuses, move, strict=True)
                )
            ),
            cfg,
        )
        for move in sir_actions(state, cfg)
    )


def constant_motion_tuple(
    state: SirState, action: Sequence[int], cfg: SirConfig
) -> tuple[int, ...]:
    """Per-draw successor tuple that applies the same joint motion to every draw."""
    draws = itertools.product((1, 2), repeat=cfg.n_agents**2 + cfg.n_agents)
    return tuple(
        encode(
            SirState(
                tuple(
                    AgentState(s, p)
                    for s, p in zip(
                        statuses_under_draw(state, draw, cfg), action, strict=True
                    )
                )
            ),
            cfg,
        )
        for draw in draws
    )


def build_sir_digraph(
    cfg: SirConfig, cap: int = DEFAULT_EXPLICIT_CAP
) -> StochasticDigraph:
    """Stochastic digraph over all (3 kappa)^N states with one edge set per draw.

    Draws are enumerated in itertools.product order over {1, 2}^(N^2 + N).

    Raises:
        PreconditionError: If nodes times edge sets exceeds cap
    """
    h: int = draw_count(cfg)
    if cfg.n_states * h > cap:
        msg = (
            f"Explicit SIR digraph needs {cfg.n_states} nodes x {h} edge sets, "
            f"above the cap of {cap}; use SirMdp instead"
        )
        raise PreconditionError(msg)

    states: list[SirState] = [decode(x, cfg) for x in range(1, cfg.n_states + 1)]
    edge_sets: list[tuple[Edge, ...]] = []
    mu: list[float] = []
    for draw in itertools.product((1, 2), repeat=cfg.n_agents**2 + cfg.n_agents):
        edges: list[Edge] = [
            (x, y)
            for x, state in enumerate(states, start=1)
            for y in draw_successors(state, draw, cfg)
        ]
        edge_sets.append(tuple(edges))
        mu.append(draw_mass(draw, cfg))

    logger.info("Built explicit SIR digraph: %d nodes, %d edge sets", cfg.n_states, h)
    return StochasticDigraph(cfg.n_states, tuple(edge_sets), tuple(mu))
