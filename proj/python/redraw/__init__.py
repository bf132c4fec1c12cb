"""Kuramoto network simulation and directed topology reconstruction.

Matrices follow the library convention: entry (i, j) is the influence of
node j on node i, nodes are 0-based.
"""

from ._core import (
    LockCriterion,
    SimConfig,
    SimulationError,
    UnlockedExperimentError,
    ValidationError,
    algebraic_connectivity,
    benchmark,
    calibrate,
    dpi_filter,
    erdos_renyi,
    evaluate,
    format_edge_list,
    lock_report,
    parse_edge_list,
    preset,
    preset_names,
    reconstruct,
    reconstruct_traces,
    simulate,
    threshold_cut,
)

__version__ = "0.1.0"

__all__ = [
    "LockCriterion",
    "SimConfig",
    "SimulationError",
    "UnlockedExperimentError",
    "ValidationError",
    "algebraic_connectivity",
    "benchmark",
    "calibrate",
    "dpi_filter",
    "erdos_renyi",
    "evaluate",
    "format_edge_list",
    "lock_report",
    "parse_edge_list",
    "preset",
    "preset_names",
    "reconstruct",
    "reconstruct_traces",
    "simulate",
    "threshold_cut",
]
