# Third-party
import polars as pl

# Local imports
from stochreach.core.models import (
    BoundMatrices,
    FloatMatrix,
    InfectedTrajectory,
    RlResult,
    StationaryValues,
    StochasticDigraph,
    TransitionMatrixSet,
    ValueTable,
)
from stochreach.core.utils import (
    FRACTION_MAX_DENOMINATOR,
    FRACTION_TOLERANCE,
    format_probability,
)
from stochreach.services.mdp_service import local_actions, tuple_distribution

# -----------------------------
# Report Service
# -----------------------------


class ReportService:
    """Builds the tables every subcommand emits.

    Probabilities are formatted as reduced fractions where one is within
    tolerance, unless decimal is set. Column order is fixed per table.
    """

    def __init__(
        self,
        *,
        decimal: bool = False,
        tolerance: float = FRACTION_TOLERANCE,
        max_denominator: int = FRACTION_MAX_DENOMINATOR,
    ) -> None:
        self.decimal: bool = decimal
        self.tolerance: float = tolerance
        self.max_denominator: int = max_denominator

    def _fmt(self, value: float) -> str:
        return format_probability(
            float(value),
            decimal=self.decimal,
            tolerance=self.tolerance,
            max_denominator=self.max_denominator,
        )

    def _matrix_rows(
        self, label: str, matrix: FloatMatrix
    ) -> list[dict[str, str | int]]:
        rows: list[dict[str, str | int]] = []
        for i, row in enumerate(matrix, start=1):
            record: dict[str, str | int] = {"matrix": label, "row": i}
            record.update({str(j): self._fmt(p) for j, p in enumerate(row, start=1)})
            rows.append(record)
        return rows

    # -----------------------------
    # Graph tables
    # -----------------------------

    def bounds_frame(self, bounds: BoundMatrices) -> pl.DataFrame:
        """Columns: matrix (L or M), row, 1..n."""
        return pl.DataFrame(
            self._matrix_rows("L", bounds.lower) + self._matrix_rows("M", bounds.upper)
        )

    def pset_frame(self, pset: TransitionMatrixSet) -> pl.DataFrame:
        """Columns: matrix (P1..P_nu), row, 1..n."""
        rows: list[dict[str, str | int]] = []
        for index, matrix in enumerate(pset.matrices, start=1):
            rows.extend(self._matrix_rows(f"P{index}", matrix))
        return pl.DataFrame(rows)

    def local_mdp_frame(self, sd: StochasticDigraph) -> pl.DataFrame:
        """Columns: i, a, tuple, j, p; one row per positive p(j | i, a)."""
        rows: list[dict[str, str | int]] = []
        for i in range(1, sd.n + 1):
            for a, selection in enumerate(local_actions(sd, i).tuples, start=1):
                entries: str = ",".join("-" if s is None else str(s) for s in selection)
                shown: str = f"({entries})"
                rows.extend(
                    {"i": i, "a": a, "tuple": shown, "j": j, "p": self._fmt(p)}
                    for j, p in tuple_distribution(sd, selection).outcomes
                )
        return pl.DataFrame(rows)

    # -----------------------------
    # Value tables
    # -----------------------------

    def value_frame(self, table: ValueTable) -> pl.DataFrame:
        """Columns: k, node, value, action (0 at k = 0)."""
        rows: list[dict[str, str | int]] = []
        for k in range(table.horizon + 1):
            for col, node in enumerate(table.states):
                action: int = 0
                if k > 0 and table.greedy is not None:
                    action = int(table.greedy[k - 1, col])
                rows.append(
                    {
                        "k": k,
                        "node": node,
                        "value": self._fmt(table.values[k, col]),
                        "action": action,
                    }
                )
        return pl.DataFrame(rows)

    def stationary_frame(self, solution: StationaryValues) -> pl.DataFrame:
        """Columns: node, value, action."""
        return pl.DataFrame(
            {
                "node": list(range(1, len(solution.values) + 1)),
                "value": [self._fmt(v) for v in solution.values],
                "action": [int(a) for a in solution.actions],
            }
        )

    def policy_frame(self, table: ValueTable) -> pl.DataFrame:
        """Columns: k, node, action; the greedy action with k steps remaining."""
        frame = self.value_frame(table)
        return frame.filter(pl.col("k") > 0).select("k", "node", "action")

    # -----------------------------
    # Learning and epidemic tables
    # -----------------------------

    @staticmethod
    def trace_frame(result: RlResult) -> pl.DataFrame:
        """Columns: episode, estimate."""
        return pl.DataFrame(
            {
                "episode": list(range(1, len(result.trace) + 1)),
                "estimate": list(result.trace),
            }
        )

    @staticmethod
    def sir_analysis_frame(
        expected: FloatMatrix, lower: float, upper: float
    ) -> pl.DataFrame:
        """Columns: k, expected, lower, upper."""
        steps: int = len(expected)
        return pl.DataFrame(
            {
                "k": list(range(steps)),
                "expected": [float(v) for v in expected],
                "lower": [lower] * steps,
                "upper": [upper] * steps,
            }
        )

    @staticmethod
    def monte_carlo_frame(trajectory: InfectedTrajectory) -> pl.DataFrame:
        """Columns: k, mean, stderr."""
        return pl.DataFrame(
            {
                "k": list(range(len(trajectory.mean))),
                "mean": [float(v) for v in trajectory.mean],
                "stderr": [float(v) for v in trajectory.stderr],
            }
        )
