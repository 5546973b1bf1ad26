from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table
import logging

# stdout stays free for machine output; everything human-facing goes to stderr
console = Console(stderr=True)
def print(*args, **kwargs):
    console.print(*args, **kwargs)


def setup_logging(level: str = "INFO"):
    logging.basicConfig(
        level=level.upper(),
        format="%(message)s",
        datefmt="%H:%M:%S",
        handlers=[RichHandler(console=console, show_path=False, rich_tracebacks=True)],
        force=True,
    )


def log_step(title: str, payload: dict = None, symbol: str = "🟢"):
    print(f"\n[b]{symbol} {title}[/b]")
    if payload:
        for k, v in payload.items():
            print(f"  [bold cyan]{k}[/bold cyan]: {v}")

def log_error(message: str, err: Exception = None):
    print(f"\n[red]❌ {message}[/red]")
    if err:
        print(f"[dim]{str(err)}[/dim]")


def _fmt(value, digits: int = 2) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "[green]true[/green]" if value else "[red]false[/red]"
    if isinstance(value, float):
        return f"{value:.{digits}f}"
    return str(value)


def render_rows(rows, title: str = "Bound report"):
    """Table of report rows: NMSE against every bound, errors inline."""
    table = Table(title=title, show_header=True, header_style="bold magenta")
    table.add_column("noise", style="cyan", no_wrap=True)
    table.add_column("T60", justify="right")
    table.add_column("canceller")
    table.add_column("NMSE dB", justify="right")
    table.add_column("info dB", justify="right")
    table.add_column("info exp dB", justify="right")
    table.add_column("support dB", justify="right")
    table.add_column("unified dB", justify="right", style="bold")
    table.add_column("holds")

    for r in rows:
        if r.error:
            table.add_row(r.noise_id, _fmt(r.t60_s, 3), r.canceller, f"[red]{r.error}[/red]", "", "", "", "", "")
            continue
        table.add_row(
            r.noise_id,
            _fmt(r.t60_s, 3),
            r.canceller,
            _fmt(r.nmse_db),
            _fmt(r.info_bound_lin_db),
            _fmt(r.info_bound_exp_db),
            _fmt(r.support_bound_weighted_db),
            _fmt(r.unified_bound_db),
            _fmt(r.bound_holds),
        )
    console.print(table)


def render_frame(frame, title: str):
    """Table of a pandas frame; floats at two decimals."""
    table = Table(title=title, show_header=True, header_style="bold magenta")
    for col in frame.columns:
        table.add_column(str(col), justify="left" if frame[col].dtype == object else "right")
    for record in frame.itertuples(index=False):
        table.add_row(*(_fmt(float(v) if isinstance(v, float) else v) for v in record))
    console.print(table)


def render_trend(checks):
    table = Table(title="Median info bound vs T60", show_header=True, header_style="bold magenta", box=None)
    table.add_column("noise", style="cyan")
    table.add_column("medians (dB)")
    table.add_column("rising")
    for c in checks:
        medians = "  ".join(f"{t:g}s:{m:.2f}" for t, m in zip(c.t60_s, c.median_db))
        table.add_row(c.noise_id, medians, _fmt(c.nondecreasing))
    console.print(table)


def render_summary(validity: dict):
    lines = "\n".join(f"[bold cyan]{k}[/bold cyan]: {v}" for k, v in validity.items())
    style = "green" if validity.get("errors") == 0 and validity.get("violations") == 0 else "red"
    console.print(Panel(lines, title="📌 Bound validity", title_align="left", border_style=style, expand=False))
