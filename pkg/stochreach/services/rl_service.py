# Standard library
import logging
from collections.abc import Callable
from typing import Literal

# Third-party
import numpy as np

# Local imports
from stochreach.core.models import (
    EpisodeStep,
    FloatMatrix,
    MdpModel,
    Policy,
    QTable,
    RlParams,
    RlResult,
    TransitionDistribution,
)
from stochreach.core.validation import validate_node

logger = logging.getLogger(__name__)

TerminalFn = Callable[[int], bool]
Algorithm = Literal["sarsa", "qlearning"]

RNG_ALGORITHM = "PCG64"


def never_terminal(state: int) -> bool:  # noqa: ARG001
    return False


def terminal_set(states: set[int] | frozenset[int]) -> TerminalFn:
    """Predicate true on the given states."""
    frozen: frozenset[int] = frozenset(states)

    def is_terminal(state: int) -> bool:
        return state in frozen

    return is_terminal


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator seeded through a SeedSequence."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


# -----------------------------
# Episode sampling
# -----------------------------


class EpisodeSampler:
    """Draws (next state, reward) pairs from an MDP's transition laws.

    Cumulative probabilities are cached per (state, action).
    """

    def __init__(self, m: MdpModel) -> None:
        self.m: MdpModel = m
        self._cache: dict[tuple[int, int], tuple[tuple[int, ...], FloatMatrix]] = {}

    def _law(self, state: int, action: int) -> tuple[tuple[int, ...], FloatMatrix]:
        cached = self._cache.get((state, action))
        if cached is None:
            law: TransitionDistribution = self.m.transition(state, action)
            cumulative: FloatMatrix = np.cumsum([p for _, p in law.outcomes])
            cached = (law.support(), cumulative)
            self._cache[(state, action)] = cached
        return cached

    def step(
        self, state: int, action: int, rng: np.random.Generator
    ) -> tuple[int, float]:
        support, cumulative = self._law(state, action)
        draw: float = float(rng.random()) * float(cumulative[-1])
        index: int = min(
            int(np.searchsorted(cumulative, draw, side="right")), len(support) - 1
        )
        next_state: int = support[index]
        return next_state, self.m.reward(state, action, next_state)


def sample_episode(
    m: MdpModel,
    start: int,
    policy: Policy,
    rng: np.random.Generator,
    horizon_cap: int = 1_000,
    terminal: TerminalFn = never_terminal,
    sampler: EpisodeSampler | None = None,
) -> list[EpisodeStep]:
    """Roll out policy from start until a terminal state or horizon_cap steps."""
    validate_node(m.n_states, start)
    sampler = sampler or EpisodeSampler(m)

    steps: list[EpisodeStep] = []
    state: int = start
    while not terminal(state) and len(steps) < horizon_cap:
        row = policy.rows[state - 1]
        action: int = int(rng.choice(len(row), p=row)) + 1
        next_state, reward = sampler.step(state, action, rng)
        steps.append(EpisodeStep(state, action, reward, next_state))
        state = next_state
    return steps


# -----------------------------
# Tabular learners
# -----------------------------


def _epsilon_greedy(
    qtable: QTable,
    state: int,
    n_actions: int,
    epsilon: float,
    rng: np.random.Generator,
) -> int:
    if rng.random() < epsilon:
        return int(rng.integers(n_actions)) + 1
    values: FloatMatrix = np.array(
        [qtable.q(state, a) for a in range(1, n_actions + 1)]
    )
    best = np.flatnonzero(values == values.max())
    if best.size == 1:
        return int(best[0]) + 1
    # greedy ties are drawn uniformly from the run's generator
    return int(rng.choice(best)) + 1


def _best_value(qtable: QTable, m: MdpModel, state: int) -> float:
    return max(qtable.q(state, a) for a in range(1, m.n_actions(state) + 1))


def _train(
    algorithm: Algorithm,
    m: MdpModel,
    start: int,
    terminal: TerminalFn,
    params: RlParams,
) -> RlResult:
    validate_node(m.n_states, start)
    if terminal(start):
        logger.warning("Start state %d is terminal; estimate is 0", start)
        return RlResult(
            algorithm=algorithm,
            estimate=0.0,
            qtable=QTable(),
            trace=(),
            params=params,
            rng_algorithm=RNG_ALGORITHM,
        )

    rng: np.random.Generator = make_rng(params.seed)
    sampler = EpisodeSampler(m)
    qtable = QTable()
    trace: list[float] = []
    lr: float = params.learning_rate
    gamma: float = params.discount
    truncated: int = 0

    for _ in range(params.episodes):
        state: int = start
        action: int = _epsilon_greedy(
            qtable, state, m.n_actions(state), params.epsilon, rng
        )
        for _ in range(params.horizon_cap):
            next_state, reward = sampler.step(state, action, rng)
            done: bool = terminal(next_state)

            next_action: int = 0
            if done:
                bootstrap: float = 0.0
            elif algorithm == "sarsa":
                next_action = _epsilon_greedy(
                    qtable, next_state, m.n_actions(next_state), params.epsilon, rng
                )
                bootstrap = qtable.q(next_state, next_action)
            else:
                bootstrap = _best_value(qtable, m, next_state)

            key: tuple[int, int] = (state, action)
            current: float = qtable.q(state, action)
            qtable.values[key] = current + lr * (reward + gamma * bootstrap - current)
            qtable.visits[key] = qtable.visits.get(key, 0) + 1

            if done:
                break
            if algorithm == "qlearning":
                next_action = _epsilon_greedy(
                    qtable, next_state, m.n_actions(next_state), params.epsilon, rng
                )
            state, action = next_state, next_action
        else:
            truncated += 1

        trace.append(_best_value(qtable, m, start))

    estimate: float = trace[-1]
    logger.info(
        "%s: %d episodes from state %d, estimate %.4f (%d truncated at %d steps)",
        algorithm,
        params.episodes,
        start,
        estimate,
        truncated,
        params.horizon_cap,
    )
    return RlResult(
        algorithm=algorithm,
        estimate=estimate,
        qtable=qtable,
        trace=tuple(trace),
        params=params,
        rng_algorithm=RNG_ALGORITHM,
    )


def q_learning(
    m: MdpModel,
    start: int,
    terminal: TerminalFn = never_terminal,
    params: RlParams | None = None,
) -> RlResult:
    """Off-policy tabular learning with max_a' Q(s', a') bootstrapping.

    The behaviour policy is epsilon-greedy with constant epsilon; Q starts
    at zero and terminal states bootstrap to zero.
    """
    return _train("qlearning", m, start, terminal, params or RlParams())


def sarsa(
    m: MdpModel,
    start: int,
    terminal: TerminalFn = never_terminal,
    params: RlParams | None = None,
) -> RlResult:
    """On-policy tabular learning bootstrapping on the next epsilon-greedy action."""
    return _train("sarsa", m, start, terminal, params or RlParams())
