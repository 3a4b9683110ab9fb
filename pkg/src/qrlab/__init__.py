"""Numerical laboratory for quasiregular maps in the plane.

Piecewise maps are written in a small expression language (:mod:`qrlab.mapdsl`),
differentiated in Wirtinger form (:mod:`qrlab.wirtinger`) and studied through
local indices, phase portraits, potentials and collision searches.
"""

__version__ = "0.1.0"

from .errors import QrlabError  # noqa: E402
from .mapdsl import fixture, parse_map, single_piece  # noqa: E402

__all__ = ["QrlabError", "__version__", "fixture", "parse_map", "single_piece"]
