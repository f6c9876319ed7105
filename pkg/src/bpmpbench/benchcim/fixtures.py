"""Published measurement tables for the conditional-arc-flow comparison,
shipped as package data and used by the regression suite."""

from __future__ import annotations

import json
from importlib import resources

from .cim import SpeedupStats, Stats4
from .measure import RunMeasurement


def _load(name: str) -> dict:
    return json.loads(resources.files("bpmpbench.benchcim").joinpath("data", name).read_text())


def _to_measurements(doc: dict) -> list[RunMeasurement]:
    out = []
    for row in doc["instances"]:
        trials = [(float(c), float(r)) for c, r in zip(row["cpu"], row["real"])]
        out.append(RunMeasurement(instance_id=row["id"], trials=trials, ticks=float(row["ticks"])))
    return out


def original_node_arc_n20() -> list[RunMeasurement]:
    """Ten 20-node measurements of the original node-arc model."""
    return _to_measurements(_load("table2_original_node_arc_n20.json"))


def conditional_arc_flow_n20() -> list[RunMeasurement]:
    """The same ten instances after applying conditional arc flow."""
    return _to_measurements(_load("table3_conditional_arc_flow_n20.json"))


def conditional_arc_flow_n10_stats() -> SpeedupStats:
    """Reported 10-node speedup statistics (raw trials unpublished)."""
    doc = _load("table4_speedup_stats_n10.json")

    def stats(key: str) -> Stats4:
        mn, mea, med, mx = doc[key]
        return Stats4(mn, mea, med, mx)

    return SpeedupStats(cpu=stats("cpu"), ticks=stats("ticks"), real=stats("real"))
