# Standard library
import logging
from collections.abc import Iterable, Sequence
from typing import Literal

# Third-party
import numpy as np

# Local imports
from stochreach.core.models import (
    AugmentedDigraph,
    FloatMatrix,
    IntMatrix,
    MdpModel,
    Objective,
    Policy,
    StationaryValues,
    StochasticDigraph,
    ValueTable,
)
from stochreach.core.validation import (
    ConvergenceError,
    ValidationError,
    validate_horizon,
)
from stochreach.services.graph_service import augment_for_target
from stochreach.services.mdp_service import (
    CompiledMdp,
    LocalMdp,
    compile_mdp,
    indicator_reward,
)

logger = logging.getLogger(__name__)

# -----------------------------
# Constants
# -----------------------------

DEFAULT_TOLERANCE = 1e-9
DEFAULT_MAX_ITERATIONS = 100_000

ReachMode = Literal["weak", "strong"]

# -----------------------------
# Dynamic programming
# -----------------------------


def value_iteration(
    m: MdpModel | CompiledMdp,
    horizon: int,
    objective: Objective = "custom",
) -> ValueTable:
    """Backward recursion v(k, x) = max_a sum_j p(j|x,a) (r + v(k-1, j)).

    Starts from v(0, .) = 0 and records the greedy action of every (k, x),
    ties going to the smallest action index.
    """
    validate_horizon(horizon)
    compiled: CompiledMdp = m if isinstance(m, CompiledMdp) else compile_mdp(m)

    values: FloatMatrix = np.zeros((horizon + 1, compiled.n_states))
    greedy: IntMatrix = np.zeros((horizon, compiled.n_states), dtype=np.int64)
    for k in range(1, horizon + 1):
        values[k], greedy[k - 1] = compiled.backup(values[k - 1])

    return ValueTable(
        values=values,
        objective=objective,
        states=tuple(range(1, compiled.n_states + 1)),
        greedy=greedy,
    )


def solve_stationary(
    m: MdpModel | CompiledMdp,
    tol: float = DEFAULT_TOLERANCE,
    max_iter: int = DEFAULT_MAX_ITERATIONS,
) -> StationaryValues:
    """Iterate the optimality backup until the max-norm change drops below tol.

    Raises:
        ConvergenceError: If max_iter backups do not reach tol
    """
    compiled: CompiledMdp = m if isinstance(m, CompiledMdp) else compile_mdp(m)
    values: FloatMatrix = np.zeros(compiled.n_states)
    residual: float = float("inf")

    for iteration in range(1, max_iter + 1):
        updated, actions = compiled.backup(values)
        residual = float(np.max(np.abs(updated - values)))
        values = updated
        if residual < tol:
            logger.info(
                "Value iteration converged after %d sweeps (residual %.3g)",
                iteration,
                residual,
            )
            return StationaryValues(
                values=values,
                actions=actions,
                iterations=iteration,
                residual=residual,
            )

    msg = (
        f"Value iteration did not converge within {max_iter} sweeps "
        f"(last residual {residual:.3g}, tolerance {tol:.3g})"
    )
    raise ConvergenceError(msg)


def policy_evaluation(
    m: MdpModel | CompiledMdp,
    policy: Policy | Sequence[Policy],
    horizon: int,
) -> ValueTable:
    """v_pi(k, x) = sum_a pi(a|x) sum_j p(j|x,a) (r + v_pi(k-1, j)).

    A sequence of policies is read as time-varying: entry k-1 acts when k
    steps remain.
    """
    validate_horizon(horizon)
    compiled: CompiledMdp = m if isinstance(m, CompiledMdp) else compile_mdp(m)

    schedule: list[Policy] = (
        [policy] * horizon if isinstance(policy, Policy) else list(policy)
    )
    if len(schedule) < horizon:
        msg = f"Got {len(schedule)} policies for a horizon of {horizon}"
        raise ValidationError(msg)

    values: FloatMatrix = np.zeros((horizon + 1, compiled.n_states))
    for k in range(1, horizon + 1):
        weights: FloatMatrix = _choice_weights(compiled, schedule[k - 1])
        q: FloatMatrix = compiled.choice_values(values[k - 1])
        values[k] = np.bincount(
            compiled.choice_state,
            weights=weights * q,
            minlength=compiled.n_states,
        )

    return ValueTable(
        values=values,
        objective="custom",
        states=tuple(range(1, compiled.n_states + 1)),
    )


def _choice_weights(compiled: CompiledMdp, policy: Policy) -> FloatMatrix:
    counts: IntMatrix = compiled.action_counts()
    if len(policy.rows) != compiled.n_states:
        msg = f"Policy covers {len(policy.rows)} states, MDP has {compiled.n_states}"
        raise ValidationError(msg)
    for state, (row, count) in enumerate(zip(policy.rows, counts, strict=True), 1):
        if len(row) != count:
            msg = f"Policy row for state {state} has {len(row)} entries, need {count}"
            raise ValidationError(msg)
    return np.concatenate([np.asarray(row, dtype=np.float64) for row in policy.rows])


def greedy_policy(table: ValueTable, k: int, action_counts: Sequence[int]) -> Policy:
    """Deterministic policy taking the recorded argmax at horizon k."""
    if table.greedy is None or not 1 <= k <= table.horizon:
        msg = f"No greedy actions recorded for horizon {k}"
        raise ValidationError(msg)
    return Policy.deterministic(
        [int(a) for a in table.greedy[k - 1]], list(action_counts)
    )


# -----------------------------
# Reachability objectives
# -----------------------------


def reach_mdp(aug: AugmentedDigraph, mode: ReachMode) -> LocalMdp:
    """Local MDP of the augmented digraph rewarding entry into n+1.

    The weak objective pays +1, the strong one -1, whatever the action.
    """
    scale: float = 1.0 if mode == "weak" else -1.0
    return LocalMdp(aug.base, indicator_reward(aug.target_proxy, scale))


def _reach_table(
    sd: StochasticDigraph,
    target: Iterable[int],
    horizon: int,
    mode: ReachMode,
) -> ValueTable:
    aug: AugmentedDigraph = augment_for_target(sd, target)
    full: ValueTable = value_iteration(reach_mdp(aug, mode), horizon)
    sign: float = 1.0 if mode == "weak" else -1.0
    greedy: IntMatrix = np.asarray(full.greedy, dtype=np.int64)

    # 0.0 + turns the -0.0 entries of the negated table into 0.0
    return ValueTable(
        values=0.0 + sign * full.values[:, : sd.n],
        objective="weak-reach" if mode == "weak" else "strong-recur",
        states=tuple(range(1, sd.n + 1)),
        greedy=greedy[:, : sd.n].copy(),
    )


def weak_reachability(
    sd: StochasticDigraph, target: Iterable[int], horizon: int
) -> ValueTable:
    """Supremum over stochastic paths of P(visit Q within steps 1..k)."""
    return _reach_table(sd, target, horizon, "weak")


def strong_recurrence(
    sd: StochasticDigraph, target: Iterable[int], horizon: int
) -> ValueTable:
    """Infimum over stochastic paths of P(visit Q within steps 1..k).

    Computed as -v_star for the reward -1{j = n+1} and returned as a
    probability.
    """
    return _reach_table(sd, target, horizon, "strong")


def reachability_limit(
    sd: StochasticDigraph,
    target: Iterable[int],
    mode: ReachMode,
    tol: float = DEFAULT_TOLERANCE,
    max_iter: int = DEFAULT_MAX_ITERATIONS,
) -> StationaryValues:
    """Infinite-horizon weak or strong reach probabilities on the original nodes."""
    aug: AugmentedDigraph = augment_for_target(sd, target)
    solution: StationaryValues = solve_stationary(reach_mdp(aug, mode), tol, max_iter)
    sign: float = 1.0 if mode == "weak" else -1.0
    return StationaryValues(
        values=0.0 + sign * solution.values[: sd.n],
        actions=solution.actions[: sd.n].copy(),
        iterations=solution.iterations,
        residual=solution.residual,
    )
