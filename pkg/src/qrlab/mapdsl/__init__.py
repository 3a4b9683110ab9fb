"""Piecewise complex-expression maps: parsing, evaluation, fixtures."""

from .consistency import ConsistencyReport, CoverageReport, coverage, piece_consistency
from .domains import Box, Disk, Domain, HalfPlane, Plane, Polygon, Union
from .expr import Expr
from .fixtures import FIXTURE_IDS, branch_delta, fixture, fixture_from_spec
from .guards import Guard
from .maps import Piece, PiecewiseMap, parse_map, single_piece
from .parser import parse_expression, parse_guard

__all__ = [
    "Box", "ConsistencyReport", "CoverageReport", "Disk", "Domain", "Expr", "FIXTURE_IDS",
    "Guard", "HalfPlane", "Piece", "PiecewiseMap", "Plane", "Polygon", "Union",
    "branch_delta", "coverage", "fixture", "fixture_from_spec", "parse_expression",
    "parse_guard", "parse_map", "piece_consistency", "single_piece",
]
