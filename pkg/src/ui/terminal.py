"""Terminal output for run summaries, and the log handler setup."""

import logging
from typing import Dict, List, Optional

from rich import box
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.style import Style
from rich.table import Table
from rich.text import Text

SUMMARY_ROWS = 20


def setup_logging(verbose: bool = False, console: Optional[Console] = None) -> None:
    """Route library logging through rich on stderr."""
    handler = RichHandler(console=console or Console(stderr=True), show_path=False, rich_tracebacks=True)
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[handler],
        force=True,
    )


class TerminalUI:
    """Run summaries printed with rich."""

    def __init__(self, console: Optional[Console] = None):
        self.console = console or Console()
        self.style = Style(color="green", bold=True)
        self.error_style = Style(color="red", bold=True)
        self.success_style = Style(color="green", bold=True)
        self.info_style = Style(color="cyan", bold=True)

    def display_banner(self, command: str, digest: str, workers: int):
        """Display the run header."""
        text = Text()
        text.append(f"degma {command}\n", style=self.style)
        text.append(f"config {digest[:12]}  workers {workers}", style=self.info_style)
        self.console.print(Panel.fit(text, title="Run", border_style="green", box=box.ROUNDED))

    def display_error(self, message: str):
        self.console.print(f"[red]Error: {message}[/red]", style=self.error_style)

    def display_success(self, message: str):
        self.console.print(f"[green]{message}[/green]", style=self.success_style)

    def display_info(self, message: str):
        self.console.print(f"[cyan]{message}[/cyan]", style=self.info_style)

    def display_results(self, results: List[Dict], title: str = "Results"):
        """Display the results table, one row per result record."""
        if not results:
            self.display_info("No results recorded.")
            return
        columns = list(dict.fromkeys(key for row in results for key in row))
        table = Table(title=title, show_header=True, header_style="bold green", box=box.SIMPLE)
        for name in columns:
            table.add_column(name, style="cyan")
        for row in results[:SUMMARY_ROWS]:
            table.add_row(*[_cell(row.get(name, "")) for name in columns])
        self.console.print(table)
        if len(results) > SUMMARY_ROWS:
            self.display_info(f"... {len(results) - SUMMARY_ROWS} more rows in the CSV output")

    def display_timings(self, timings: Dict[str, float]):
        table = Table(show_header=True, header_style="bold green", box=box.SIMPLE)
        table.add_column("Phase", style="green")
        table.add_column("Seconds", style="cyan", justify="right")
        for name, seconds in timings.items():
            table.add_row(name, f"{seconds:.3f}")
        self.console.print(table)

    def display_manifest(self, manifest) -> None:
        """Summary of a finished run."""
        self.display_results(manifest.results)
        self.display_timings(manifest.timings)
        if manifest.outputs:
            self.display_info("Wrote " + ", ".join(manifest.outputs))
        self.display_success(f"{manifest.command} finished")


def _cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)
