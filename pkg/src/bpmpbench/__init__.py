"""Backhaul profit maximization models, a deterministic MIP engine, and
composite-index benchmarking."""

from . import benchcim, formulations, instance, model, oracle, solver

__version__ = "0.1.0"

__all__ = ["benchcim", "formulations", "instance", "model", "oracle", "solver", "__version__"]
