"""Measurement harness and the Composite Index Method."""

from .cim import (
    ApproachConfig,
    CompositeReport,
    METRICS,
    SizeReport,
    SpeedupStats,
    Stats4,
    WeightScheme,
    composite_metric_index,
    composite_report,
    evaluate_technique,
    grand_composite,
    sequential_evaluation,
    size_index,
    speedups,
)
from .measure import (
    MeasurementError,
    METRICS_PATTERN,
    RunMeasurement,
    measure_builtin,
    measure_external,
)
from .report import (
    measurements_csv,
    render_csv,
    render_markdown,
    report_from_json,
    report_to_json,
)
from . import fixtures

__all__ = [
    "ApproachConfig",
    "CompositeReport",
    "METRICS",
    "METRICS_PATTERN",
    "MeasurementError",
    "RunMeasurement",
    "SizeReport",
    "SpeedupStats",
    "Stats4",
    "WeightScheme",
    "composite_metric_index",
    "composite_report",
    "evaluate_technique",
    "fixtures",
    "grand_composite",
    "measure_builtin",
    "measure_external",
    "measurements_csv",
    "render_csv",
    "render_markdown",
    "report_from_json",
    "report_to_json",
    "sequential_evaluation",
    "size_index",
    "speedups",
]
