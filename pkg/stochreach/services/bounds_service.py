# Standard library
import logging
from collections.abc import Iterable

# Third-party
import numpy as np

# Local imports
from stochreach.core.models import (
    BoundKind,
    BoundMatrices,
    FloatMatrix,
    ReachRecursionTable,
    StochasticDigraph,
)
from stochreach.core.validation import (
    ValidationError,
    validate_horizon,
    validate_target,
)
from stochreach.services.graph_service import require_standing_assumption

logger = logging.getLogger(__name__)

# -----------------------------
# Transition bounds
# -----------------------------


def compute_bound_matrices(sd: StochasticDigraph) -> BoundMatrices:
    """Entrywise bounds on one-step transition probabilities.

    L[i, j] sums mu(w) over draws with H(i, w) = {j}; M[i, j] sums mu(w)
    over draws with j in H(i, w).
    """
    lower: FloatMatrix = np.zeros((sd.n, sd.n))
    upper: FloatMatrix = np.zeros((sd.n, sd.n))

    for table, mass in zip(sd.successor_table, sd.mu, strict=True):
        for i, successors in enumerate(table):
            for j in successors:
                upper[i, j - 1] += mass
            if len(successors) == 1:
                lower[i, successors[0] - 1] += mass

    return BoundMatrices(lower=lower, upper=upper)


def propagate_bounds(
    rho: FloatMatrix, bounds: BoundMatrices
) -> tuple[FloatMatrix, FloatMatrix]:
    """One-step entrywise bounds (rho L, rho M) on the next distribution."""
    return rho @ bounds.lower, rho @ bounds.upper


# -----------------------------
# Finite-horizon reach recursion
# -----------------------------


def reach_recursion(
    sd: StochasticDigraph,
    target: Iterable[int],
    horizon: int,
    kind: BoundKind,
) -> ReachRecursionTable:
    """Extremal probabilities of visiting Q within steps 1..k.

    Each successor g scores 1 when g is in Q and the previous layer's value
    otherwise; the upper table takes the max over H(x, w), the lower table
    the min, and both average over w with weights mu(w).
    """
    if kind not in ("upper", "lower"):
        msg = f"Recursion kind must be 'upper' or 'lower', got {kind!r}"
        raise ValidationError(msg)
    nodes: frozenset[int] = validate_target(sd.n, target)
    validate_horizon(horizon)
    require_standing_assumption(sd)

    in_target = np.zeros(sd.n, dtype=bool)
    in_target[[node - 1 for node in nodes]] = True
    pick = max if kind == "upper" else min

    values: FloatMatrix = np.zeros((horizon + 1, sd.n))
    for k in range(horizon):
        previous: FloatMatrix = values[k]
        scores: FloatMatrix = np.where(in_target, 1.0, previous)
        for x in range(sd.n):
            total: float = 0.0
            for table, mass in zip(sd.successor_table, sd.mu, strict=True):
                successors: tuple[int, ...] = table[x]
                if mass <= 0.0 or not successors:
                    continue
                total += mass * pick(float(scores[g - 1]) for g in successors)
            values[k + 1, x] = total

    logger.debug("Reach recursion (%s) over %d steps for Q=%s", kind, horizon, nodes)
    return ReachRecursionTable(values=values, target=nodes, kind=kind)
