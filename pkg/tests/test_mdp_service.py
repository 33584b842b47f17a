# Third-party
import numpy as np
import pytest

# Local imports
from stochreach.core.models import StochasticDigraph, TransitionMatrixSet
from stochreach.core.validation import PreconditionError, ValidationError
from stochreach.services.decomposition_service import enumerate_pset
from stochreach.services.mdp_service import (
    GlobalMdp,
    LocalMdp,
    attach_reward,
    compile_mdp,
    global_mdp_from_pset,
    indicator_reward,
    local_actions,
    transition,
    tuple_distribution,
    uniform_policy,
)

T = 1.0 / 3.0

# -----------------------------
# Local action spaces
# -----------------------------


def test_local_action_tuples(four_node: StochasticDigraph) -> None:
    assert local_actions(four_node, 1).tuples == ((2, 3), (2, 4), (3, 3), (3, 4))
    assert local_actions(four_node, 2).tuples == ((1, 4),)
    assert local_actions(four_node, 3).tuples == ((1, 4), (4, 4))
    assert local_actions(four_node, 4).tuples == ((2, 3), (3, 3))


def test_transition_listing_has_fifteen_rows(four_node: StochasticDigraph) -> None:
    m = LocalMdp(four_node)
    rows: list[tuple[int, int, int, float]] = [
        (i, a, j, p)
        for i in range(1, 5)
        for a in range(1, m.n_actions(i) + 1)
        for j, p in m.transition(i, a).outcomes
    ]

    assert [m.n_actions(i) for i in range(1, 5)] == [4, 1, 2, 2]
    assert len(rows) == 15
    assert rows[0] == pytest.approx((1, 1, 2, 2 * T))
    assert rows[1] == pytest.approx((1, 1, 3, T))
    assert m.transition(1, 3).as_dict() == {3: pytest.approx(1.0)}
    assert m.transition(3, 2).as_dict() == {4: pytest.approx(1.0)}


def test_transition_merges_repeated_successors(four_node: StochasticDigraph) -> None:
    assert transition(four_node, 1, 3).as_dict() == {3: pytest.approx(1.0)}
    law = tuple_distribution(four_node, (3, 4))
    assert law.prob(3) == pytest.approx(2 * T)
    assert law.prob(4) == pytest.approx(T)
    assert law.prob(1) == 0.0


def test_transition_rejects_bad_action(four_node: StochasticDigraph) -> None:
    with pytest.raises(ValidationError, match="outside"):
        transition(four_node, 2, 2)


def test_local_actions_reject_sinks() -> None:
    sd = StochasticDigraph(2, (((1, 2),),), (1.0,))
    with pytest.raises(PreconditionError, match="augment_sink"):
        local_actions(sd, 2)


def test_zero_mass_sink_becomes_none() -> None:
    sd = StochasticDigraph(2, (((1, 2), (2, 1)), ((1, 2),)), (1.0, 0.0))
    assert local_actions(sd, 2).tuples == ((1, None),)
    assert transition(sd, 2, 1).as_dict() == {1: 1.0}


def test_local_rows_match_matrix_rows(four_node: StochasticDigraph) -> None:
    pset = enumerate_pset(four_node)
    m = LocalMdp(four_node)

    for i in range(1, 5):
        local_rows = []
        for a in range(1, m.n_actions(i) + 1):
            row = np.zeros(4)
            for j, p in m.transition(i, a).outcomes:
                row[j - 1] = p
            local_rows.append(row)
        matrix_rows = [matrix[i - 1] for matrix in pset.matrices]
        for row in matrix_rows:
            assert any(np.allclose(row, local) for local in local_rows)
        for local in local_rows:
            assert any(np.allclose(row, local) for row in matrix_rows)


def test_dedup_drops_equal_laws() -> None:
    edges = ((1, 1), (1, 2), (2, 1))
    sd = StochasticDigraph(2, (edges, edges), (0.5, 0.5))
    assert LocalMdp(sd).n_actions(1) == 4
    assert LocalMdp(sd, dedup=True).n_actions(1) == 3


# -----------------------------
# MDP variants
# -----------------------------


def test_global_mdp_uses_matrix_rows(four_node: StochasticDigraph) -> None:
    pset = enumerate_pset(four_node)
    m = global_mdp_from_pset(pset)

    assert isinstance(m, GlobalMdp)
    assert m.n_states == 4
    assert m.n_actions(3) == 16
    law = m.transition(1, 1)
    assert law.prob(2) == pytest.approx(2 * T)
    assert law.prob(3) == pytest.approx(T)
    with pytest.raises(ValidationError):
        m.transition(1, 17)


def test_attach_reward_keeps_dynamics(four_node: StochasticDigraph) -> None:
    base = LocalMdp(four_node)
    rewarded = attach_reward(base, indicator_reward(4, 2.0))
    again = attach_reward(rewarded, indicator_reward(3))

    assert rewarded.transition(3, 2) == base.transition(3, 2)
    assert rewarded.reward(1, 1, 4) == 2.0
    assert rewarded.reward(1, 1, 3) == 0.0
    assert again.base is base
    assert again.reward(1, 1, 3) == 1.0


def test_uniform_policy_rows(four_node: StochasticDigraph) -> None:
    policy = uniform_policy(LocalMdp(four_node))
    assert [len(row) for row in policy.rows] == [4, 1, 2, 2]
    assert policy.probability(1, 3) == pytest.approx(0.25)


# -----------------------------
# Array form
# -----------------------------


def test_compile_counts_choices(four_node: StochasticDigraph) -> None:
    compiled = compile_mdp(LocalMdp(four_node))

    assert compiled.n_choices == 9
    assert compiled.action_counts().tolist() == [4, 1, 2, 2]
    assert compiled.trans_prob.shape == (15,)
    totals = np.bincount(compiled.trans_choice, weights=compiled.trans_prob)
    np.testing.assert_allclose(totals, 1.0)


def test_backup_breaks_ties_toward_smallest_action() -> None:
    matrix = np.array([[0.5, 0.5], [0.0, 1.0]])
    pset = TransitionMatrixSet((matrix, matrix.copy()))
    compiled = compile_mdp(GlobalMdp(pset, indicator_reward(2)))

    best, actions = compiled.backup(np.zeros(2))
    np.testing.assert_allclose(best, [0.5, 1.0])
    assert actions.tolist() == [1, 1]


def test_backup_picks_strictly_better_action() -> None:
    stay = np.eye(2)
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    pset = TransitionMatrixSet((stay, swap))
    compiled = compile_mdp(GlobalMdp(pset, indicator_reward(2)))

    best, actions = compiled.backup(np.zeros(2))
    np.testing.assert_allclose(best, [1.0, 1.0])
    assert actions.tolist() == [2, 1]
