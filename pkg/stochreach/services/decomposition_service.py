# Standard library
import itertools
import logging
import math
from collections.abc import Sequence

# Third-party
import numpy as np

# Local imports
from stochreach.core.models import (
    Digraph,
    FloatMatrix,
    OneRegularDecomposition,
    StochasticDigraph,
    TransitionMatrixSet,
)
from stochreach.core.validation import CapacityError, PreconditionError
from stochreach.services.graph_service import (
    is_one_regular_sd,
    require_standing_assumption,
)

logger = logging.getLogger(__name__)

# -----------------------------
# Constants
# -----------------------------

DEFAULT_PSET_CAP = 1_000_000

# -----------------------------
# 1-regular decomposition
# -----------------------------


def decompose_one_regular(
    g: Digraph, source_index: int | None = None
) -> OneRegularDecomposition:
    """Every 1-regular subgraph picking one out-edge per node.

    Pieces follow the lexicographic order of the per-node selections, node 1
    being the most significant.
    """
    sinks: list[int] = [x for x in range(1, g.n + 1) if g.out_degree(x) == 0]
    if sinks:
        msg = f"Cannot decompose: nodes {sinks} have out-degree 0"
        raise PreconditionError(msg)

    pieces: tuple[Digraph, ...] = tuple(
        Digraph(g.n, tuple(enumerate(choice, start=1)))
        for choice in itertools.product(*g.successors)
    )
    return OneRegularDecomposition(pieces=pieces, source_index=source_index)


def piece_count(g: Digraph) -> int:
    """Number of 1-regular pieces: the product of out-degrees."""
    return math.prod(len(row) for row in g.successors)


# -----------------------------
# Markov matrices
# -----------------------------


def markov_matrix(sd: StochasticDigraph) -> FloatMatrix:
    """Transition matrix of a stochastic digraph whose edge sets are 1-regular."""
    if not is_one_regular_sd(sd):
        msg = "markov_matrix requires every instantaneous digraph to be 1-regular"
        raise PreconditionError(msg)
    return _markov_from_choices(
        sd.n,
        [tuple(row[0] for row in table) for table in sd.successor_table],
        sd.mu,
    )


def _markov_from_choices(
    n: int,
    choices: Sequence[tuple[int, ...] | None],
    mu: Sequence[float],
) -> FloatMatrix:
    # choices[w] gives each node's unique successor in draw w
    matrix: FloatMatrix = np.zeros((n, n))
    rows = np.arange(n)
    for choice, mass in zip(choices, mu, strict=True):
        if choice is None:
            continue
        np.add.at(matrix, (rows, np.asarray(choice) - 1), mass)
    return matrix


def propagate_distribution(
    rho: FloatMatrix, matrices: Sequence[FloatMatrix]
) -> FloatMatrix:
    """Apply rho_{k+1} = rho_k P_k along a chosen sequence of matrices."""
    current: FloatMatrix = np.asarray(rho, dtype=np.float64)
    for matrix in matrices:
        current = current @ matrix
    return current


# -----------------------------
# Transition-matrix set
# -----------------------------


def count_pset(sd: StochasticDigraph) -> int:
    """nu, the number of tuples of 1-regular pieces over positive-mass draws."""
    return math.prod(
        math.prod(len(row) for row in table)
        for table, mass in zip(sd.successor_table, sd.mu, strict=True)
        if mass > 0.0
    )


def enumerate_pset(
    sd: StochasticDigraph,
    cap: int = DEFAULT_PSET_CAP,
    *,
    dedup: bool = False,
) -> TransitionMatrixSet:
    """Enumerate the set P of right-stochastic matrices.

    Zero-probability edge sets never change a matrix and are left out of
    the tuples. Duplicates are kept unless dedup is set.

    Raises:
        CapacityError: If nu exceeds cap
    """
    require_standing_assumption(sd)
    nu: int = count_pset(sd)
    if nu > cap:
        raise CapacityError(nu, cap)

    # per draw: selections of one successor per node, or a single None
    per_draw: list[list[tuple[int, ...] | None]] = [
        list(itertools.product(*table)) if mass > 0.0 else [None]
        for table, mass in zip(sd.successor_table, sd.mu, strict=True)
    ]

    matrices: tuple[FloatMatrix, ...] = tuple(
        _markov_from_choices(sd.n, combo, sd.mu)
        for combo in itertools.product(*per_draw)
    )
    logger.info("Enumerated nu=%d transition matrices over %d nodes", nu, sd.n)

    pset = TransitionMatrixSet(matrices)
    return pset.distinct() if dedup else pset
