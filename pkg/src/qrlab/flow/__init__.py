"""Integral curves of ``dz/dt = f(z)``, sector counts and Green-identity checks."""

from .export import portrait_svg, trajectories_csv
from .green import (
    Circle,
    EllipticLoopReport,
    LoopIntegralReport,
    circle,
    elliptic_loop_contradiction,
    green_identity,
    inner_circle_term,
    punctured_disk_bound,
    trajectory_integrals,
)
from .integrate import TraceConfig, Trajectory, Verdict, trace, trace_many
from .sectors import SectorSummary, classify_sectors

__all__ = [
    "Circle", "EllipticLoopReport", "LoopIntegralReport", "SectorSummary", "TraceConfig",
    "Trajectory", "Verdict", "circle", "classify_sectors", "elliptic_loop_contradiction",
    "green_identity", "inner_circle_term", "portrait_svg", "punctured_disk_bound", "trace",
    "trace_many", "trajectories_csv",
]
