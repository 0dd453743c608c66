"""Experiment harness: configs, suite runners, CSV/plot reporting, CLI."""

from .config import KINDS, ExperimentConfig
from .report import COLUMNS, ReportRow, write_csv, write_meta
from .suites import SUITES, hill_from_metric, run_suite

__all__ = [
    "KINDS",
    "COLUMNS",
    "ExperimentConfig",
    "ReportRow",
    "SUITES",
    "hill_from_metric",
    "run_suite",
    "write_csv",
    "write_meta",
]
