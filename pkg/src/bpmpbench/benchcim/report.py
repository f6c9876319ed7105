"""Report rendering: markdown tables, CSV rows, and JSON round-trip."""

from __future__ import annotations

import csv
import io
import json

from .cim import (
    CompositeReport,
    SizeReport,
    SpeedupStats,
    Stats4,
    WeightScheme,
)
from .measure import RunMeasurement

_METRIC_HEADERS = (("cpu", "CPU"), ("ticks", "Ticks"), ("real", "Real"))
_STAT_ROWS = (("minimum", "Min"), ("mean", "Mean"), ("median", "Median"), ("maximum", "Max"))


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _bold_if_gt1(v: float) -> str:
    return f"**{_fmt(v)}**" if v > 1.0 else _fmt(v)


def render_markdown(reports: CompositeReport | list[CompositeReport]) -> str:
    """Markdown rendering: one speedup table per size plus an index table
    per report.  Index entries greater than 1 are bold."""
    if isinstance(reports, CompositeReport):
        reports = [reports]
    lines = ["# Composite index report", ""]
    if not reports:
        lines.append("(no evaluations)")
        return "\n".join(lines) + "\n"
    for rep in reports:
        lines.append(f"## {rep.challenger_label} vs {rep.baseline_label}")
        lines.append("")
        for sr in rep.sizes:
            lines.append(f"### Speedups, n = {sr.size}")
            lines.append("")
            lines.append("| Statistic | CPU | Ticks | Real |")
            lines.append("| --- | --- | --- | --- |")
            for attr, label in _STAT_ROWS:
                cells = [
                    _fmt(getattr(sr.stats.metric(metric), attr)) for metric, _ in _METRIC_HEADERS
                ]
                lines.append(f"| {label} | {cells[0]} | {cells[1]} | {cells[2]} |")
            lines.append("")
        lines.append("### Composite indices")
        lines.append("")
        lines.append("| n | C_n | T_n | R_n | I_n |")
        lines.append("| --- | --- | --- | --- | --- |")
        for sr in rep.sizes:
            lines.append(
                f"| {sr.size} | {_bold_if_gt1(sr.c_index)} | {_bold_if_gt1(sr.t_index)}"
                f" | {_bold_if_gt1(sr.r_index)} | {_bold_if_gt1(sr.i_index)} |"
            )
        lines.append("")
        lines.append(f"GCI = {_bold_if_gt1(rep.gci)}, decision: {rep.decision}")
        lines.append("")
    return "\n".join(lines) + "\n"


def render_csv(reports: CompositeReport | list[CompositeReport]) -> str:
    """CSV rendering: one row per (size, metric, statistic), then the
    per-size indices and the GCI."""
    if isinstance(reports, CompositeReport):
        reports = [reports]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["comparison", "size", "metric", "statistic", "value"])
    for rep in reports:
        label = f"{rep.challenger_label} vs {rep.baseline_label}"
        for sr in rep.sizes:
            for metric, _ in _METRIC_HEADERS:
                stats = sr.stats.metric(metric)
                for attr, stat_label in _STAT_ROWS:
                    writer.writerow([label, sr.size, metric, stat_label.lower(), repr(getattr(stats, attr))])
            for metric, value in (
                ("cpu", sr.c_index),
                ("ticks", sr.t_index),
                ("real", sr.r_index),
                ("composite", sr.i_index),
            ):
                writer.writerow([label, sr.size, metric, "index", repr(value)])
        writer.writerow([label, "", "composite", "gci", repr(rep.gci)])
        writer.writerow([label, "", "composite", "decision", rep.decision])
    return buf.getvalue()


def measurements_csv(report: CompositeReport) -> str:
    """Raw measurement log: instance,trial,cpu_s,wall_s,ticks per line."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["config", "size", "instance", "trial", "cpu_s", "wall_s", "ticks"])
    for size in sorted(report.measurements):
        for role in ("baseline", "challenger"):
            for run in report.measurements[size][role]:
                for t, (cpu, wall) in enumerate(run.trials, start=1):
                    writer.writerow([role, size, run.instance_id, t, repr(cpu), repr(wall), repr(run.ticks)])
    return buf.getvalue()


def _stats4_to_dict(s: Stats4) -> dict:
    return {"min": s.minimum, "mean": s.mean, "median": s.median, "max": s.maximum}


def _stats4_from_dict(d: dict) -> Stats4:
    return Stats4(d["min"], d["mean"], d["median"], d["max"])


def report_to_json(report: CompositeReport) -> str:
    doc = {
        "baseline": report.baseline_label,
        "challenger": report.challenger_label,
        "gci": report.gci,
        "decision": report.decision,
        "weights": json.loads(report.weights.to_json()),
        "sizes": [
            {
                "size": sr.size,
                "stats": {m: _stats4_to_dict(sr.stats.metric(m)) for m, _ in _METRIC_HEADERS},
                "per_instance": sr.stats.per_instance,
                "indices": {
                    "cpu": sr.c_index,
                    "ticks": sr.t_index,
                    "real": sr.r_index,
                    "composite": sr.i_index,
                },
            }
            for sr in report.sizes
        ],
        "measurements": {
            str(size): {
                role: [
                    {"instance": r.instance_id, "trials": r.trials, "ticks": r.ticks}
                    for r in report.measurements[size][role]
                ]
                for role in report.measurements[size]
            }
            for size in report.measurements
        },
    }
    return json.dumps(doc, indent=2) + "\n"


def report_from_json(text: str) -> CompositeReport:
    doc = json.loads(text)
    sizes = []
    for sd in doc["sizes"]:
        stats = SpeedupStats(
            cpu=_stats4_from_dict(sd["stats"]["cpu"]),
            ticks=_stats4_from_dict(sd["stats"]["ticks"]),
            real=_stats4_from_dict(sd["stats"]["real"]),
            per_instance=sd.get("per_instance"),
        )
        idx = sd["indices"]
        sizes.append(
            SizeReport(sd["size"], stats, idx["cpu"], idx["ticks"], idx["real"], idx["composite"])
        )
    weights = WeightScheme.from_json(json.dumps(doc["weights"]))
    measurements = {}
    for size_text, roles in doc.get("measurements", {}).items():
        measurements[int(size_text)] = {
            role: [
                RunMeasurement(
                    instance_id=r["instance"],
                    trials=[tuple(t) for t in r["trials"]],
                    ticks=r["ticks"],
                )
                for r in runs
            ]
            for role, runs in roles.items()
        }
    return CompositeReport(
        baseline_label=doc["baseline"],
        challenger_label=doc["challenger"],
        sizes=sizes,
        gci=doc["gci"],
        decision=doc["decision"],
        weights=weights,
        measurements=measurements,
    )
