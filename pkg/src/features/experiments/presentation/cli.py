"""
Command line for scenario runs, trace metrics and the approximation calculator.

Exit codes: 0 success, 1 any other application error, 2 invalid
configuration, 3 a batch that never finished.
"""

import logging
from pathlib import Path
from typing import NoReturn, Optional

import click

from src.features.experiments.constants import SETTLE_EPOCHS, US_PER_SECOND
from src.features.experiments.domain import BatchIncomplete, ConfigError, Method, Topology
from src.features.experiments.infrastructure import ReportWriter, load_scenario, render_summary
from src.features.experiments.services import (
    approx_factor,
    batch_latency,
    latency_stats,
    run_scenario,
    tps,
    utilization,
)
from src.features.simulation.domain import RunMode, TraceKind
from src.features.simulation.infrastructure import read_trace
from src.shared.config import settings
from src.shared.exceptions import AppError

logger = logging.getLogger(__name__)

EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_BATCH_INCOMPLETE = 3


def _fail(error: AppError) -> NoReturn:
    click.echo(f"error [{error.code}]: {error.message}", err=True)
    if isinstance(error, ConfigError):
        raise SystemExit(EXIT_CONFIG)
    if isinstance(error, BatchIncomplete):
        raise SystemExit(EXIT_BATCH_INCOMPLETE)
    raise SystemExit(EXIT_ERROR)


def _choices(enum) -> click.Choice:
    return click.Choice([member.value for member in enum], case_sensitive=False)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log at DEBUG level.")
def cli(verbose: bool) -> None:
    """Adaptive shard simulator."""
    level = logging.DEBUG if verbose else settings.logging.level
    logging.basicConfig(level=level, format=settings.logging.format)


@cli.command()
@click.argument("scenario_file", type=click.Path(path_type=Path))
@click.option("--seed", type=int, default=None, help="First seed; overrides the scenario's seeds.")
@click.option("--seeds", type=click.IntRange(min=1), default=None, help="Number of consecutive seeds.")
@click.option("--out", "out_dir", type=click.Path(path_type=Path), default=None,
              help="Output directory (default: SHARDSIM_OUTPUT_DIR or ./results).")
@click.option("--mode", type=_choices(RunMode), default=None, help="Protocol stack to run.")
@click.option("--workers", type=click.IntRange(min=1), default=None, help="Worker processes.")
@click.option("--traces", is_flag=True, help="Also write one trace file per run.")
def run(
    scenario_file: Path,
    seed: Optional[int],
    seeds: Optional[int],
    out_dir: Optional[Path],
    mode: Optional[str],
    workers: Optional[int],
    traces: bool,
) -> None:
    """Run every variant of SCENARIO_FILE for every seed."""
    out_dir = out_dir or settings.output_dir
    try:
        spec = load_scenario(scenario_file).with_overrides(
            seed=seed, seeds=seeds, mode=RunMode(mode) if mode else None,
        )
        trace_dir = str(out_dir / "traces") if traces else None
        report = run_scenario(spec, workers=workers, trace_dir=trace_dir)
    except AppError as error:
        _fail(error)
    records_path, summary_path = ReportWriter(out_dir).write(report)
    click.echo(render_summary(report), nl=False)
    click.echo(f"\nrecords: {records_path}\nsummary: {summary_path}")


@cli.command()
@click.argument("trace_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--start", "start_us", type=int, default=0, help="Window start in microseconds.")
@click.option("--end", "end_us", type=int, default=None, help="Window end in microseconds (default: end of trace).")
@click.option("--settle-epochs", type=click.IntRange(min=0), default=SETTLE_EPOCHS, show_default=True)
@click.option("--batch/--no-batch", default=True, show_default=True,
              help="Report the latency of the whole batch; fails if it is incomplete.")
def metrics(trace_file: Path, start_us: int, end_us: Optional[int], settle_epochs: int, batch: bool) -> None:
    """Recompute metrics from a saved TRACE_FILE."""
    records = read_trace(trace_file)
    if end_us is None:
        end_us = records[-1]["t"] if records else 0
    window = (start_us, end_us)
    latency = latency_stats(records, window)
    util = utilization(records, settle_epochs)
    rows = [
        ("window_us", f"{start_us}-{end_us}"),
        ("commits", str(sum(1 for record in records if record["kind"] == TraceKind.COMMIT.value))),
        ("tps", f"{tps(records, window):.4f}"),
        ("latency_mean_s", f"{latency.mean:.6f}"),
        ("latency_p50_s", f"{latency.p50:.6f}"),
        ("latency_p95_s", f"{latency.p95:.6f}"),
        ("util_before", "" if util.before is None else f"{util.before:.4f}"),
        ("util_distance", "" if util.after is None else f"{util.after:.4f}"),
        ("efficiency", "" if util.efficiency is None else f"{util.efficiency:.4f}"),
    ]
    for name, value in rows:
        click.echo(f"{name:<16}{value}")
    if batch:
        try:
            click.echo(f"{'batch_latency_s':<16}{batch_latency(records) / US_PER_SECOND:.6f}")
        except AppError as error:
            _fail(error)


@cli.command()
@click.option("--topology", type=_choices(Topology), required=True)
@click.option("--method", type=_choices(Method), required=True)
@click.option("-k", "k", type=float, required=True, help="Accounts per transaction.")
@click.option("-d", "diameter", type=float, default=1.0, show_default=True, help="Shard graph diameter.")
@click.option("-s", "shards", type=float, default=1.0, show_default=True, help="Number of shards.")
@click.option("-D", "span", type=float, default=1.0, show_default=True, help="Longest transaction distance.")
@click.option("-g", "grid", type=float, default=1.0, show_default=True, help="Grid dimension.")
def approx(topology: str, method: str, k: float, diameter: float, shards: float, span: float, grid: float) -> None:
    """Evaluate an approximation factor."""
    try:
        value = approx_factor(Topology(topology), Method(method), k=k, d=diameter, s=shards, D=span, g=grid)
    except AppError as error:
        _fail(error)
    click.echo(f"{value:g}")


def main() -> None:
    cli()


if __name__ == "__main__":
    main()
