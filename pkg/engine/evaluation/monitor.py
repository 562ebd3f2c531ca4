"""
Run monitoring
Uses rich for a progress bar over examples and a summary table, both on
stderr so stdout stays free for results.
"""
from typing import Any, Dict, Iterable, Optional

try:
    from rich.console import Console
    from rich.progress import BarColumn, MofNCompleteColumn, Progress, SpinnerColumn, TaskID, TextColumn
    from rich.table import Table
    RICH_AVAILABLE = True
except ImportError:
    RICH_AVAILABLE = False


class ProgressTracker:
    """Context manager for tracking progress over examples"""

    def __init__(self, description: str, total: Optional[int] = None, enabled: bool = True):
        self.description = description
        self.total = total
        self.enabled = enabled and RICH_AVAILABLE
        self.progress: Optional["Progress"] = None
        self.task_id: Optional["TaskID"] = None
        self.completed = 0

    def __enter__(self) -> "ProgressTracker":
        if not self.enabled:
            return self
        self.progress = Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            MofNCompleteColumn(),
            console=Console(stderr=True),
            transient=True,
        )
        self.progress.start()
        self.task_id = self.progress.add_task(self.description, total=self.total)
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if self.progress:
            self.progress.stop()

    def update(self, advance: int = 1, description: Optional[str] = None):
        """Update progress"""
        self.completed += advance
        if self.progress and self.task_id is not None:
            kwargs = {"advance": advance}
            if description:
                kwargs["description"] = description
            self.progress.update(self.task_id, **kwargs)


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


def print_summary(title: str, summary: Dict[str, Any], console: Optional["Console"] = None) -> None:
    """Print a metric -> value table."""
    if not RICH_AVAILABLE:
        return
    console = console or Console(stderr=True)
    table = Table(title=f"[bold]{title}[/bold]", border_style="magenta", show_header=True)
    table.add_column("Metric", style="cyan")
    table.add_column("Value", style="yellow", justify="right")
    for key in sorted(summary):
        table.add_row(key, _fmt(summary[key]))
    console.print(table)


def print_rows(title: str, header: Iterable[str], rows: Iterable[Iterable[Any]],
               console: Optional["Console"] = None) -> None:
    """Print an arbitrary table (beta sweeps, per-victim results)."""
    if not RICH_AVAILABLE:
        return
    console = console or Console(stderr=True)
    table = Table(title=f"[bold]{title}[/bold]", border_style="blue")
    for column in header:
        table.add_column(str(column), justify="right")
    for row in rows:
        table.add_row(*(_fmt(v) for v in row))
    console.print(table)
