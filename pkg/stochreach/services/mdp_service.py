# Standard library
import itertools
import logging
import threading
from collections import defaultdict
from collections.abc import Sequence
from dataclasses import dataclass

# Third-party
import numpy as np

# Local imports
from stochreach.core.models import (
    FloatMatrix,
    IntMatrix,
    LocalActionSpace,
    MdpModel,
    Policy,
    RewardFn,
    StochasticDigraph,
    TransitionDistribution,
    TransitionMatrixSet,
)
from stochreach.core.validation import (
    PreconditionError,
    ValidationError,
    validate_node,
)
from stochreach.services.graph_service import check_standing_assumption

logger = logging.getLogger(__name__)


def zero_reward(state: int, action: int, next_state: int) -> float:  # noqa: ARG001
    return 0.0


# -----------------------------
# Local action spaces
# -----------------------------


def local_actions(sd: StochasticDigraph, i: int) -> LocalActionSpace:
    """All h-tuples whose w-th element is drawn from H(i, w).

    Tuples are listed in itertools.product order, the first draw being the
    most significant coordinate.

    Raises:
        PreconditionError: If node i is a sink under a positive-mass draw
    """
    validate_node(sd.n, i)
    sinks: list[int] = [w for node, w in check_standing_assumption(sd) if node == i]
    if sinks:
        msg = (
            f"Node {i} has no successor under draws {sinks}; "
            "repair the graph with augment_sink first."
        )
        raise PreconditionError(msg)

    choices: list[tuple[int | None, ...]] = [
        table[i - 1] or (None,) for table in sd.successor_table
    ]
    return LocalActionSpace(node=i, tuples=tuple(itertools.product(*choices)))


def tuple_distribution(
    sd: StochasticDigraph, selection: Sequence[int | None]
) -> TransitionDistribution:
    """p(j | i, a) for the tuple a: the mass of the draws whose entry is j."""
    masses: dict[int, float] = defaultdict(float)
    for successor, mass in zip(selection, sd.mu, strict=True):
        if successor is not None and mass > 0.0:
            masses[successor] += mass
    return TransitionDistribution.from_masses(masses)


def transition(sd: StochasticDigraph, i: int, a: int) -> TransitionDistribution:
    """Transition law of local action a (1-based) at node i."""
    space: LocalActionSpace = local_actions(sd, i)
    if not 1 <= a <= space.nu:
        msg = f"Action {a} outside {{1,...,{space.nu}}} at node {i}"
        raise ValidationError(msg)
    return tuple_distribution(sd, space.tuples[a - 1])


# -----------------------------
# MDP implementations
# -----------------------------


class LocalMdp:
    """MDP over the nodes of a stochastic digraph with state-local actions.

    Action spaces and transition laws are computed on first use and
    memoized under a lock. With dedup set, tuples inducing an already-seen
    distribution at the same node are dropped.
    """

    def __init__(
        self,
        sd: StochasticDigraph,
        reward: RewardFn = zero_reward,
        *,
        dedup: bool = False,
    ) -> None:
        self.sd: StochasticDigraph = sd
        self._reward: RewardFn = reward
        self._dedup: bool = dedup
        self._lock = threading.Lock()
        self._cache: dict[int, tuple[TransitionDistribution, ...]] = {}

    @property
    def n_states(self) -> int:
        return self.sd.n

    def _distributions(self, state: int) -> tuple[TransitionDistribution, ...]:
        with self._lock:
            cached = self._cache.get(state)
            if cached is not None:
                return cached

            space: LocalActionSpace = local_actions(self.sd, state)
            laws: list[TransitionDistribution] = [
                tuple_distribution(self.sd, selection) for selection in space.tuples
            ]
            if self._dedup:
                laws = list(dict.fromkeys(laws))
            self._cache[state] = tuple(laws)
            return self._cache[state]

    def n_actions(self, state: int) -> int:
        return len(self._distributions(state))

    def transition(self, state: int, action: int) -> TransitionDistribution:
        laws = self._distributions(state)
        if not 1 <= action <= len(laws):
            msg = f"Action {action} outside {{1,...,{len(laws)}}} at node {state}"
            raise ValidationError(msg)
        return laws[action - 1]

    def reward(self, state: int, action: int, next_state: int) -> float:
        return self._reward(state, action, next_state)


class GlobalMdp:
    """MDP whose action a selects matrix P_a at every state."""

    def __init__(
        self, pset: TransitionMatrixSet, reward: RewardFn = zero_reward
    ) -> None:
        self.pset: TransitionMatrixSet = pset
        self._reward: RewardFn = reward

    @property
    def n_states(self) -> int:
        return self.pset.n

    def n_actions(self, state: int) -> int:  # noqa: ARG002
        return self.pset.nu

    def transition(self, state: int, action: int) -> TransitionDistribution:
        if not 1 <= action <= self.pset.nu:
            msg = f"Action {action} outside {{1,...,{self.pset.nu}}}"
            raise ValidationError(msg)
        row = self.pset.matrices[action - 1][state - 1]
        return TransitionDistribution.from_masses(
            {j + 1: float(p) for j, p in enumerate(row)}
        )

    def reward(self, state: int, action: int, next_state: int) -> float:
        return self._reward(state, action, next_state)


def global_mdp_from_pset(pset: TransitionMatrixSet) -> GlobalMdp:
    """MDP with action space {1,...,nu}; intended for small oracle checks."""
    return GlobalMdp(pset)


class RewardedMdp:
    """Same dynamics as a base MDP, with its reward replaced."""

    def __init__(self, base: MdpModel, reward: RewardFn) -> None:
        self.base: MdpModel = base
        self._reward: RewardFn = reward

    @property
    def n_states(self) -> int:
        return self.base.n_states

    def n_actions(self, state: int) -> int:
        return self.base.n_actions(state)

    def transition(self, state: int, action: int) -> TransitionDistribution:
        return self.base.transition(state, action)

    def reward(self, state: int, action: int, next_state: int) -> float:
        return self._reward(state, action, next_state)


def attach_reward(m: MdpModel, reward: RewardFn) -> RewardedMdp:
    """Return m with reward r(i, a, j)."""
    if isinstance(m, RewardedMdp):
        return RewardedMdp(m.base, reward)
    return RewardedMdp(m, reward)


def indicator_reward(target: int, scale: float = 1.0) -> RewardFn:
    """r(i, a, j) = scale when j == target, else 0."""

    def reward(state: int, action: int, next_state: int) -> float:  # noqa: ARG001
        return scale if next_state == target else 0.0

    return reward


def uniform_policy(m: MdpModel) -> Policy:
    """Every local action equally likely."""
    rows: list[tuple[float, ...]] = []
    for state in range(1, m.n_states + 1):
        count: int = m.n_actions(state)
        rows.append(tuple(1.0 / count for _ in range(count)))
    return Policy(tuple(rows))


# -----------------------------
# Array form
# -----------------------------


@dataclass(frozen=True, eq=False)
class CompiledMdp:
    """Flat array form of a finite MDP.

    Choices (state-action pairs) are contiguous per state and ordered by
    action; transitions reference their choice index.
    """

    n_states: int
    choice_offsets: IntMatrix
    choice_state: IntMatrix
    trans_choice: IntMatrix
    trans_next: IntMatrix
    trans_prob: FloatMatrix
    trans_reward: FloatMatrix

    @property
    def n_choices(self) -> int:
        return int(self.choice_state.shape[0])

    def action_counts(self) -> IntMatrix:
        return np.diff(self.choice_offsets)

    def choice_values(self, values: FloatMatrix) -> FloatMatrix:
        """Expected r + v(next) for every choice."""
        weights = self.trans_prob * (self.trans_reward + values[self.trans_next])
        return np.bincount(self.trans_choice, weights=weights, minlength=self.n_choices)

    def backup(self, values: FloatMatrix) -> tuple[FloatMatrix, IntMatrix]:
        """One Bellman optimality backup with smallest-index argmax."""
        q: FloatMatrix = self.choice_values(values)
        best: FloatMatrix = np.maximum.reduceat(q, self.choice_offsets[:-1])
        choice_index = np.arange(self.n_choices)
        is_best = q == best[self.choice_state]
        candidates = np.where(is_best, choice_index, self.n_choices)
        first: IntMatrix = np.minimum.reduceat(candidates, self.choice_offsets[:-1])
        actions: IntMatrix = first - self.choice_offsets[:-1] + 1
        return best, actions


def compile_mdp(m: MdpModel) -> CompiledMdp:
    """Materialize every transition of m into flat arrays (0-based states)."""
    offsets: list[int] = [0]
    choice_state: list[int] = []
    trans_choice: list[int] = []
    trans_next: list[int] = []
    trans_prob: list[float] = []
    trans_reward: list[float] = []

    for state in range(1, m.n_states + 1):
        count: int = m.n_actions(state)
        if count < 1:
            msg = f"State {state} has no actions"
            raise PreconditionError(msg)
        for action in range(1, count + 1):
            choice: int = len(choice_state)
            choice_state.append(state - 1)
            for next_state, prob in m.transition(state, action).outcomes:
                trans_choice.append(choice)
                trans_next.append(next_state - 1)
                trans_prob.append(prob)
                trans_reward.append(m.reward(state, action, next_state))
        offsets.append(len(choice_state))

    logger.debug(
        "Compiled MDP: %d states, %d choices, %d transitions",
        m.n_states,
        len(choice_state),
        len(trans_choice),
    )
    return CompiledMdp(
        n_states=m.n_states,
        choice_offsets=np.asarray(offsets, dtype=np.int64),
        choice_state=np.asarray(choice_state, dtype=np.int64),
        trans_choice=np.asarray(trans_choice, dtype=np.int64),
        trans_next=np.asarray(trans_next, dtype=np.int64),
        trans_prob=np.asarray(trans_prob, dtype=np.float64),
        trans_reward=np.asarray(trans_reward, dtype=np.float64),
    )
