# Standard library
import logging
from collections.abc import Iterable

# Local imports
from stochreach.core.models import (
    AugmentedDigraph,
    Digraph,
    Edge,
    EdgeSet,
    StochasticDigraph,
)
from stochreach.core.validation import (
    PreconditionError,
    ValidationError,
    validate_edge_set_index,
    validate_node,
    validate_target,
)

logger = logging.getLogger(__name__)

# -----------------------------
# Out-neighborhoods
# -----------------------------


def out_neighborhood(g: Digraph, x: int) -> frozenset[int]:
    """Out-neighborhood {y : (x, y) in E} of node x."""
    validate_node(g.n, x)
    return frozenset(g.successors[x - 1])


def out_map(sd: StochasticDigraph, x: int, w: int) -> frozenset[int]:
    """H(x, w): successors of x in the w-th instantaneous digraph."""
    validate_node(sd.n, x)
    validate_edge_set_index(sd.h, w)
    return frozenset(sd.successor_table[w - 1][x - 1])


def is_one_regular(g: Digraph) -> bool:
    """True when every node has out-degree exactly 1."""
    return all(len(row) == 1 for row in g.successors)


def is_one_regular_sd(sd: StochasticDigraph) -> bool:
    """True when every instantaneous digraph is 1-regular."""
    return all(
        all(len(row) == 1 for row in table) for table in sd.successor_table
    )


def union(g1: Digraph, g2: Digraph) -> Digraph:
    """Union of two digraphs over the same vertex set."""
    if g1.n != g2.n:
        msg = f"Cannot unite digraphs over {g1.n} and {g2.n} vertices"
        raise ValidationError(msg)
    return Digraph(g1.n, tuple(set(g1.edges) | set(g2.edges)))


# -----------------------------
# Standing assumption
# -----------------------------


def check_standing_assumption(sd: StochasticDigraph) -> list[tuple[int, int]]:
    """List every (i, w) with mu(w) > 0 and H(i, w) empty.

    An empty list means no node is a sink under a positive-probability
    topology.
    """
    violations: list[tuple[int, int]] = []
    for w, table in enumerate(sd.successor_table, start=1):
        if sd.mu[w - 1] <= 0.0:
            continue
        violations.extend(
            (i, w) for i, row in enumerate(table, start=1) if not row
        )
    return sorted(violations)


def require_standing_assumption(sd: StochasticDigraph) -> None:
    """Raise PreconditionError when the standing assumption fails."""
    violations: list[tuple[int, int]] = check_standing_assumption(sd)
    if violations:
        shown: str = ", ".join(f"(i={i}, w={w})" for i, w in violations[:5])
        extra: int = len(violations) - 5
        more: str = f" and {extra} more" if extra > 0 else ""
        msg = (
            f"Standing assumption violated: sink nodes at {shown}{more}. "
            "Repair the graph with augment_sink first."
        )
        raise PreconditionError(msg)


def augment_sink(sd: StochasticDigraph) -> StochasticDigraph:
    """Add node n+1 absorbing every positive-probability sink.

    Node n+1 gets a self-loop in every edge set; each violating (i, w)
    gains the single edge (i, n+1) in edge set w.
    """
    sink: int = sd.n + 1
    violations: set[tuple[int, int]] = set(check_standing_assumption(sd))

    edge_sets: list[EdgeSet] = []
    for w, edges in enumerate(sd.edge_sets, start=1):
        redirects: list[Edge] = [(i, sink) for i, v in violations if v == w]
        edge_sets.append((*edges, *redirects, (sink, sink)))

    if violations:
        logger.info("Redirected %d sink pairs to node %d", len(violations), sink)
    return StochasticDigraph(sink, tuple(edge_sets), sd.mu)


def augment_for_target(
    sd: StochasticDigraph, target: Iterable[int]
) -> AugmentedDigraph:
    """Retarget edges into Q to a proxy node n+1 that feeds a terminal n+2.

    Edges (i, j) with j in Q become (i, n+1); (n+1, n+2) and (n+2, n+2)
    join every edge set. Edges leaving nodes of Q are kept.
    """
    nodes: frozenset[int] = validate_target(sd.n, target)
    require_standing_assumption(sd)

    proxy: int = sd.n + 1
    terminal: int = sd.n + 2
    edge_sets: list[EdgeSet] = []
    for edges in sd.edge_sets:
        retargeted: list[Edge] = [
            (i, proxy if j in nodes else j) for i, j in edges
        ]
        edge_sets.append((*retargeted, (proxy, terminal), (terminal, terminal)))
    base = StochasticDigraph(terminal, tuple(edge_sets), sd.mu)
    return AugmentedDigraph(base=base, target=nodes)
