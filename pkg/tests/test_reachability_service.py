# Standard library
from collections.abc import Callable

# Third-party
import numpy as np
import pytest

# Local imports
from stochreach.core.models import FloatMatrix, StochasticDigraph, TransitionMatrixSet
from stochreach.core.validation import ConvergenceError, ValidationError
from stochreach.services.bounds_service import reach_recursion
from stochreach.services.decomposition_service import enumerate_pset
from stochreach.services.graph_service import augment_for_target
from stochreach.services.mdp_service import (
    LocalMdp,
    compile_mdp,
    indicator_reward,
    uniform_policy,
)
from stochreach.services.reachability_service import (
    greedy_policy,
    policy_evaluation,
    reach_mdp,
    reachability_limit,
    solve_stationary,
    strong_recurrence,
    value_iteration,
    weak_reachability,
)

T = 1.0 / 3.0

RandomDigraph = Callable[..., StochasticDigraph]


def _brute_force(
    pset: TransitionMatrixSet, target: set[int], horizon: int
) -> tuple[FloatMatrix, FloatMatrix]:
    """Max and min hit probabilities over every sequence of matrices."""
    mats = np.stack(pset.matrices)
    n = pset.n
    in_target = np.zeros(n, dtype=bool)
    in_target[[node - 1 for node in target]] = True

    alive = np.eye(n)[None]
    hit = np.zeros((1, n))
    for _ in range(horizon):
        nxt = np.einsum("mij,pjk->mpik", alive, mats).reshape(-1, n, n)
        hit = np.repeat(hit, pset.nu, axis=0) + nxt[:, :, in_target].sum(axis=2)
        nxt[:, :, in_target] = 0.0
        alive = nxt
    return hit.max(axis=0), hit.min(axis=0)


def _random_target(rng: np.random.Generator, n: int) -> set[int]:
    size = int(rng.integers(1, n + 1))
    return {int(x) for x in rng.choice(np.arange(1, n + 1), size=size, replace=False)}


# -----------------------------
# Finite horizon
# -----------------------------


def test_one_step_values_on_four_node(four_node: StochasticDigraph) -> None:
    weak = weak_reachability(four_node, {4}, 1)
    strong = strong_recurrence(four_node, {4}, 1)

    np.testing.assert_allclose(weak.values[1], [T, T, 1.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(strong.values[1], [0.0, T, T, 0.0], atol=1e-12)
    assert weak.objective == "weak-reach"
    assert strong.objective == "strong-recur"
    assert weak.greedy is not None
    assert weak.greedy.shape == (1, 4)


def test_values_are_ordered_and_monotone(four_node: StochasticDigraph) -> None:
    weak = weak_reachability(four_node, {1}, 12)
    strong = strong_recurrence(four_node, {1}, 12)

    np.testing.assert_allclose(weak.values[0], 0.0)
    assert np.all(strong.values <= weak.values + 1e-12)
    assert np.all(np.diff(weak.values, axis=0) >= -1e-12)
    assert np.all(np.diff(strong.values, axis=0) >= -1e-12)
    assert np.all((strong.values >= 0.0) & (weak.values <= 1.0 + 1e-12))


def test_mdp_values_equal_bound_recursions(random_digraph: RandomDigraph) -> None:
    rng = np.random.default_rng(20240501)
    for _ in range(50):
        sd = random_digraph(rng, 8, 3, 3)
        target = _random_target(rng, sd.n)
        horizon = int(rng.integers(1, 13))

        weak = weak_reachability(sd, target, horizon)
        strong = strong_recurrence(sd, target, horizon)
        upper = reach_recursion(sd, target, horizon, "upper")
        lower = reach_recursion(sd, target, horizon, "lower")

        np.testing.assert_allclose(weak.values, upper.values, atol=1e-9)
        np.testing.assert_allclose(strong.values, lower.values, atol=1e-9)


def test_mdp_values_equal_brute_force(random_digraph: RandomDigraph) -> None:
    rng = np.random.default_rng(7)
    for _ in range(20):
        sd = random_digraph(rng, 3, 2, 2)
        target = _random_target(rng, sd.n)
        pset = enumerate_pset(sd)
        horizon = 1
        while horizon < 4 and pset.nu ** (horizon + 1) <= 50_000:
            horizon += 1

        best, worst = _brute_force(pset, target, horizon)
        weak = weak_reachability(sd, target, horizon)
        strong = strong_recurrence(sd, target, horizon)

        np.testing.assert_allclose(weak.values[horizon], best, atol=1e-9)
        np.testing.assert_allclose(strong.values[horizon], worst, atol=1e-9)


def test_scaled_rewards_scale_values(
    four_node: StochasticDigraph, random_digraph: RandomDigraph
) -> None:
    rng = np.random.default_rng(5)
    graphs = [four_node, *(random_digraph(rng, 5, 2, 3) for _ in range(10))]
    for sd in graphs:
        target = int(rng.integers(1, sd.n + 1))
        base = value_iteration(LocalMdp(sd, indicator_reward(target)), 6)
        # powers of two keep the scaled backups exact
        for scale in (4.0, 0.5):
            scaled = value_iteration(
                compile_mdp(LocalMdp(sd, indicator_reward(target, scale))), 6
            )
            np.testing.assert_allclose(scaled.values, scale * base.values)
            np.testing.assert_array_equal(scaled.greedy, base.greedy)


def test_policy_values_lie_between_extremes(four_node: StochasticDigraph) -> None:
    aug = augment_for_target(four_node, {4})
    compiled = compile_mdp(reach_mdp(aug, "weak"))
    policy = uniform_policy(reach_mdp(aug, "weak"))

    evaluated = policy_evaluation(compiled, policy, 6).values[:, :4]
    weak = weak_reachability(four_node, {4}, 6).values
    strong = strong_recurrence(four_node, {4}, 6).values

    assert np.all(strong <= evaluated + 1e-12)
    assert np.all(evaluated <= weak + 1e-12)


def test_greedy_schedule_attains_optimum(four_node: StochasticDigraph) -> None:
    aug = augment_for_target(four_node, {3})
    compiled = compile_mdp(reach_mdp(aug, "weak"))
    table = value_iteration(compiled, 5)
    counts = compiled.action_counts().tolist()

    schedule = [greedy_policy(table, k, counts) for k in range(1, 6)]
    evaluated = policy_evaluation(compiled, schedule, 5)

    np.testing.assert_allclose(evaluated.values, table.values, atol=1e-12)


def test_policy_evaluation_rejects_short_schedule(
    four_node: StochasticDigraph,
) -> None:
    aug = augment_for_target(four_node, {4})
    m = reach_mdp(aug, "weak")
    with pytest.raises(ValidationError, match="policies"):
        policy_evaluation(m, [uniform_policy(m)], 3)


def test_greedy_policy_needs_recorded_horizon(four_node: StochasticDigraph) -> None:
    table = weak_reachability(four_node, {4}, 2)
    with pytest.raises(ValidationError):
        greedy_policy(table, 3, [4, 1, 2, 2])


# -----------------------------
# Infinite horizon
# -----------------------------


def test_limits_reach_one_on_four_node(four_node: StochasticDigraph) -> None:
    weak = reachability_limit(four_node, {4}, "weak")
    strong = reachability_limit(four_node, {4}, "strong")

    np.testing.assert_allclose(weak.values, 1.0, atol=1e-6)
    np.testing.assert_allclose(strong.values, 1.0, atol=1e-6)
    assert weak.residual < 1e-9
    assert weak.actions.shape == (4,)


def test_limit_dominates_finite_horizon(four_node: StochasticDigraph) -> None:
    limit = reachability_limit(four_node, {2}, "strong")
    finite = strong_recurrence(four_node, {2}, 20)
    assert np.all(finite.values[20] <= limit.values + 1e-6)


def test_iteration_limit_raises(four_node: StochasticDigraph) -> None:
    aug = augment_for_target(four_node, {4})
    with pytest.raises(ConvergenceError, match="did not converge"):
        solve_stationary(reach_mdp(aug, "weak"), max_iter=1)
