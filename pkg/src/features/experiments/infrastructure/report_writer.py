"""
Report output: comma-separated records and an aligned text summary.

The records file has one row per run with the columns of RECORD_FIELDS;
empty cells mean the run had nothing to measure, and per-shard series are
space-separated.
"""

import csv
import logging
from pathlib import Path
from typing import Any, List, Optional, Sequence, Tuple, Union

from src.features.experiments.constants import RECORD_FIELDS
from src.features.experiments.domain import Report
from src.shared.config import settings

logger = logging.getLogger(__name__)


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, (tuple, list)):
        return " ".join(_cell(item) for item in value)
    return str(value)


def _table(header: Sequence[str], rows: List[Sequence[str]]) -> List[str]:
    widths = [max(len(str(row[column])) for row in [header, *rows]) for column in range(len(header))]

    def line(row):
        cells = [str(cell).ljust(width) if index == 0 else str(cell).rjust(width)
                 for index, (cell, width) in enumerate(zip(row, widths))]
        return "  ".join(cells).rstrip()

    return [line(header), "  ".join("-" * width for width in widths), *(line(row) for row in rows)]


def render_summary(report: Report) -> str:
    """Human-readable summary: mean and stdev per variant and metric, then improvements."""
    seeds = sorted({record.seed for record in report.records})
    lines = [
        f"Scenario {report.scenario} ({report.kind.value}): "
        f"{len(report.variants())} variant(s), {len(report.records)} run(s), seeds {seeds}",
        "",
    ]
    rows = [
        (aggregate.variant, aggregate.metric, f"{aggregate.mean:.4f}", f"{aggregate.stdev:.4f}", str(aggregate.n))
        for aggregate in report.aggregates
    ]
    lines.extend(_table(("variant", "metric", "mean", "stdev", "n"), rows))
    if report.improvements:
        lines.append("")
        rows = [
            (item.label, item.metric, f"{item.reference:.4f}", f"{item.value:.4f}", f"{item.percent:+.2f}%")
            for item in report.improvements
        ]
        lines.extend(_table(("comparison", "metric", "reference", "value", "improvement"), rows))
    return "\n".join(lines) + "\n"


class ReportWriter:
    """Writes the records and summary files of a report into one directory."""

    def __init__(self, directory: Optional[Union[str, Path]] = None):
        self.directory = Path(directory) if directory is not None else settings.output_dir

    def write(self, report: Report) -> Tuple[Path, Path]:
        self.directory.mkdir(parents=True, exist_ok=True)
        records_path = self.directory / settings.harness.records_filename
        summary_path = self.directory / settings.harness.summary_filename

        with records_path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(RECORD_FIELDS)
            for record in report.records:
                writer.writerow([_cell(getattr(record, field)) for field in RECORD_FIELDS])
        summary_path.write_text(render_summary(report), encoding="utf-8")

        logger.info("wrote %s and %s", records_path, summary_path)
        return records_path, summary_path


def read_records(path: Union[str, Path]) -> List[dict]:
    """Rows of a records file as dictionaries of strings."""
    with Path(path).open("r", newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))
