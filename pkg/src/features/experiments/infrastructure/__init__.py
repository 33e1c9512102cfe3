"""
Infrastructure layer for the experiments feature.
"""

from src.features.experiments.infrastructure.report_writer import ReportWriter, read_records, render_summary
from src.features.experiments.infrastructure.scenario_file import load_scenario, parse_scenario

__all__ = ["ReportWriter", "read_records", "render_summary", "load_scenario", "parse_scenario"]
