# Standard library
import math
from collections.abc import Iterable, Sequence

# -----------------------------
# Validation Constants
# -----------------------------

MU_SUM_TOLERANCE = 1e-12
DISTRIBUTION_TOLERANCE = 1e-12
PROBABILITY_RANGE_TOLERANCE = 1e-12

# -----------------------------
# Errors
# -----------------------------


class ValidationError(ValueError):
    """Raised when a value lies outside its domain."""


class InputFormatError(ValidationError):
    """Raised when an input file is malformed."""

    def __init__(self, path: str, field: str, problem: str) -> None:
        self.path = path
        self.field = field
        super().__init__(f"{path}: field '{field}': {problem}")


class PreconditionError(ValueError):
    """Raised when an operation's precondition does not hold."""


class CapacityError(PreconditionError):
    """Raised when an enumeration would exceed its configured capacity."""

    def __init__(self, count: int, cap: int) -> None:
        self.count = count
        self.cap = cap
        super().__init__(
            f"Transition-matrix set has nu={count} matrices, above the cap of "
            f"{cap}. Use the local action spaces of LocalMdp "
            "(stochreach.services.mdp_service) instead of enumerating P."
        )


class ConvergenceError(RuntimeError):
    """Raised when an iterative solver hits its iteration limit."""


# -----------------------------
# Graph Validation
# -----------------------------


def validate_node_count(n: int) -> None:
    """Validate a vertex count.

    Raises:
        ValidationError: If n is not a positive integer
    """
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        msg = f"Vertex count must be a positive integer, got {n!r}"
        raise ValidationError(msg)


def validate_node(n: int, node: int) -> None:
    """Validate a 1-based node index against a vertex count.

    Raises:
        ValidationError: If node is outside {1,...,n}
    """
    if isinstance(node, bool) or not isinstance(node, int) or not 1 <= node <= n:
        msg = f"Node {node!r} outside vertex set {{1,...,{n}}}"
        raise ValidationError(msg)


def validate_edges(n: int, edges: Iterable[tuple[int, int]]) -> None:
    """Validate that every edge endpoint lies in {1,...,n}."""
    for edge in edges:
        if len(edge) != 2:  # noqa: PLR2004
            msg = f"Edge {edge!r} is not an ordered pair"
            raise ValidationError(msg)
        validate_node(n, edge[0])
        validate_node(n, edge[1])


def validate_mu(mu: Sequence[float]) -> None:
    """Validate a probability vector over edge sets.

    Entries must be non-negative and sum to 1 within MU_SUM_TOLERANCE.
    Vectors outside the tolerance are rejected, never renormalized.

    Raises:
        ValidationError: If mu is empty, has negative entries, or does not sum to 1
    """
    if len(mu) == 0:
        msg = "Probability vector mu must have at least one entry"
        raise ValidationError(msg)

    for index, value in enumerate(mu, start=1):
        if not math.isfinite(value) or value < 0:
            msg = f"mu[{index}] = {value!r} is not a non-negative probability"
            raise ValidationError(msg)

    total: float = math.fsum(mu)
    if abs(total - 1.0) > MU_SUM_TOLERANCE:
        msg = f"Probability vector mu sums to {total!r}, expected 1"
        raise ValidationError(msg)


def validate_edge_set_index(h: int, w: int) -> None:
    """Validate a 1-based edge-set index."""
    if isinstance(w, bool) or not isinstance(w, int) or not 1 <= w <= h:
        msg = f"Edge-set index {w!r} outside {{1,...,{h}}}"
        raise ValidationError(msg)


def validate_target(n: int, target: Iterable[int]) -> frozenset[int]:
    """Validate a target set Q and return it frozen.

    Raises:
        ValidationError: If Q is empty or holds nodes outside {1,...,n}
    """
    nodes: frozenset[int] = frozenset(target)
    if not nodes:
        msg = "Target set must be nonempty"
        raise ValidationError(msg)
    for node in sorted(nodes):
        validate_node(n, node)
    return nodes


# -----------------------------
# Probability Validation
# -----------------------------


def validate_probability(name: str, value: float) -> None:
    """Validate a scalar probability in [0, 1]."""
    if not math.isfinite(value) or not 0.0 <= value <= 1.0:
        msg = f"{name} must lie in [0, 1], got {value!r}"
        raise ValidationError(msg)


def validate_distribution(outcomes: Sequence[tuple[int, float]]) -> None:
    """Validate a finite distribution of (next state, probability) pairs.

    Raises:
        ValidationError: If states repeat, a mass lies outside (0, 1],
            or the masses do not sum to 1
    """
    seen: set[int] = set()
    for state, prob in outcomes:
        if state in seen:
            msg = f"Next state {state} appears twice in a distribution"
            raise ValidationError(msg)
        seen.add(state)
        if not 0.0 < prob <= 1.0 + PROBABILITY_RANGE_TOLERANCE:
            msg = f"Probability {prob!r} for next state {state} outside (0, 1]"
            raise ValidationError(msg)

    total: float = math.fsum(prob for _, prob in outcomes)
    if abs(total - 1.0) > DISTRIBUTION_TOLERANCE * max(1, len(outcomes)):
        msg = f"Transition distribution sums to {total!r}, expected 1"
        raise ValidationError(msg)


def validate_horizon(horizon: int) -> None:
    """Validate a finite horizon K >= 0."""
    if isinstance(horizon, bool) or not isinstance(horizon, int) or horizon < 0:
        msg = f"Horizon must be a non-negative integer, got {horizon!r}"
        raise ValidationError(msg)
