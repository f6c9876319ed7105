"""Timing measurements for the built-in engine and external commands."""

from __future__ import annotations

import re
import shlex
import subprocess
import time
import warnings
from dataclasses import dataclass
from statistics import mean

from ..instance import Instance
from ..model import MipModel
from ..solver import MipSolution, cutting_plane_solve, solve_mip


class MeasurementError(RuntimeError):
    """A trial failed: solver not optimal, or external output unusable."""


@dataclass
class RunMeasurement:
    """Per-instance trials: (cpu seconds, wall seconds) pairs plus the
    single deterministic tick count shared by every trial."""

    instance_id: str
    trials: list[tuple[float, float]]
    ticks: float

    @property
    def avg_cpu(self) -> float:
        return mean(t[0] for t in self.trials)

    @property
    def avg_wall(self) -> float:
        return mean(t[1] for t in self.trials)


def measure_builtin(
    model: MipModel,
    trials: int,
    families: tuple[str, ...] = (),
    instance: Instance | None = None,
    instance_id: str = "",
    backend: str | None = None,
) -> RunMeasurement:
    """Solve `trials` times sequentially, recording process-CPU and wall
    time per trial.  Tick equality across trials is asserted."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if families and instance is None:
        raise ValueError("separation families require the instance data")
    recorded: list[tuple[float, float]] = []
    ticks: float | None = None
    objective: float | None = None
    for _ in range(trials):
        cpu0 = time.process_time()
        wall0 = time.perf_counter()
        if families:
            sol, _ = cutting_plane_solve(model, instance, families, backend=backend)
        else:
            sol = solve_mip(model, backend=backend)
        cpu1 = time.process_time()
        wall1 = time.perf_counter()
        if sol.status != "optimal":
            raise MeasurementError(f"solver returned status {sol.status!r} for {instance_id or model.name}")
        recorded.append((cpu1 - cpu0, wall1 - wall0))
        if ticks is None:
            ticks, objective = sol.ticks, sol.objective
        elif sol.ticks != ticks or sol.objective != objective:
            raise MeasurementError(
                f"determinism violation on {instance_id or model.name}: "
                f"ticks {ticks} -> {sol.ticks}, objective {objective} -> {sol.objective}"
            )
    return RunMeasurement(instance_id=instance_id or model.name, trials=recorded, ticks=float(ticks))


METRICS_PATTERN = r"METRICS\s+cpu=([0-9.eE+-]+)\s+wall=([0-9.eE+-]+)\s+ticks=([0-9.eE+-]+)"


def measure_external(
    command: str,
    model_path: str,
    trials: int,
    pattern: str = METRICS_PATTERN,
    instance_id: str = "",
) -> RunMeasurement:
    """Spawn `command` once per trial and parse one metrics line per run.

    The command template may reference {model}; its combined output must
    contain a line matching `pattern` with cpu/wall/ticks groups.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    regex = re.compile(pattern)
    recorded: list[tuple[float, float]] = []
    ticks: float | None = None
    for trial in range(trials):
        argv = shlex.split(command.format(model=model_path, trial=trial))
        proc = subprocess.run(argv, capture_output=True, text=True)
        output = proc.stdout + proc.stderr
        if proc.returncode != 0:
            raise MeasurementError(
                f"external command exited with {proc.returncode} for {model_path}:\n{output}"
            )
        match = regex.search(output)
        if not match:
            raise MeasurementError(
                f"external output lacks a line matching {pattern!r} for {model_path}:\n{output}"
            )
        cpu, wall, run_ticks = (float(g) for g in match.groups())
        recorded.append((cpu, wall))
        if ticks is None:
            ticks = run_ticks
        elif run_ticks != ticks:
            warnings.warn(
                f"external ticks vary across trials for {instance_id or model_path}: "
                f"{ticks} vs {run_ticks}; keeping the first value"
            )
    return RunMeasurement(instance_id=instance_id or model_path, trials=recorded, ticks=float(ticks))
