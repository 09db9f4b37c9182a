"""Report assembly and emitters (JSON, CSV, SVG charts, CLI glue)."""

from __future__ import annotations

from .builders import DatasetReport, ProjectReport, build_dataset_report, build_project_report
from .charts import emit_charts
from .csv_out import emit_csv
from .json_out import emit_json

__all__ = [
    "DatasetReport",
    "ProjectReport",
    "build_dataset_report",
    "build_project_report",
    "emit_charts",
    "emit_csv",
    "emit_json",
]
