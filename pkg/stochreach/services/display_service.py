# Third-party
import polars as pl
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

# Local imports
from stochreach.core.models import StochasticDigraph

# -----------------------------
# Constants
# -----------------------------

MAX_PRETTY_ROWS = 200

# -----------------------------
# Display Service
# -----------------------------


class DisplayService:
    """Service for Rich console rendering of result tables."""

    def __init__(self, console: Console | None = None) -> None:
        self.console: Console = console or Console()

    # -----------------------------
    # Display Operations
    # -----------------------------

    def show_frame(self, frame: pl.DataFrame, title: str) -> None:
        """Render a result table; long tables are cut at MAX_PRETTY_ROWS rows.

        Args:
            frame: Table produced by ReportService
            title: Table title
        """
        table: Table = Table(title=title, show_header=True, header_style="bold magenta")
        for name in frame.columns:
            numeric: bool = frame.schema[name].is_numeric()
            table.add_column(name, justify="right" if numeric else "left", style="cyan")

        for row in frame.head(MAX_PRETTY_ROWS).iter_rows():
            table.add_row(*(str(value) for value in row))
        self.console.print(table)

        hidden: int = frame.height - MAX_PRETTY_ROWS
        if hidden > 0:
            self.console.print(f"[dim]... {hidden:,} more rows[/]")

    def show_summary(self, title: str, fields: dict[str, object]) -> None:
        """Render key/value results in a panel."""
        lines: list[str] = [
            f"[bold cyan]{key}:[/] {value}" for key, value in fields.items()
        ]
        panel = Panel("\n".join(lines), title=title, border_style="bright_blue")
        self.console.print(panel)

    def show_graph(self, sd: StochasticDigraph) -> None:
        """Render each instantaneous digraph with its probability."""
        table: Table = Table(title=f"Stochastic digraph (n={sd.n}, h={sd.h})")
        table.add_column("w", justify="right", style="cyan")
        table.add_column("mu", justify="right", style="green")
        table.add_column("edges", style="white")
        for w, (edges, mass) in enumerate(zip(sd.edge_sets, sd.mu, strict=True), 1):
            shown: str = " ".join(f"{u}->{v}" for u, v in edges) or "-"
            table.add_row(str(w), f"{mass:.6g}", shown)
        self.console.print(table)
