"""Planar domains: whole plane, open disk, open half-plane, convex polygon."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np


class Domain:
    is_convex = True

    def contains(self, z) -> np.ndarray:
        raise NotImplementedError

    def boundary_distance(self, z) -> np.ndarray:
        """Distance to the boundary (``inf`` for the plane)."""
        raise NotImplementedError

    def bbox(self) -> Optional[Tuple[float, float, float, float]]:
        return None

    def source(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Plane(Domain):
    def contains(self, z):
        return np.isfinite(np.asarray(z))

    def boundary_distance(self, z):
        return np.full(np.shape(z), np.inf)

    def source(self):
        return "plane"


@dataclass(frozen=True)
class Disk(Domain):
    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("disk radius must be positive")

    def contains(self, z):
        return np.abs(np.asarray(z) - self.center) < self.radius

    def boundary_distance(self, z):
        return self.radius - np.abs(np.asarray(z) - self.center)

    def bbox(self):
        c, r = self.center, self.radius
        return (c.real - r, c.real + r, c.imag - r, c.imag + r)

    def source(self):
        return f"disk({_c(self.center)}, {self.radius!r})"


@dataclass(frozen=True)
class HalfPlane(Domain):
    """Open half-plane ``{z : Re(z * conj(direction)) > 0}``."""

    direction: complex

    def __post_init__(self):
        if self.direction == 0:
            raise ValueError("half-plane direction must be nonzero")

    @property
    def unit(self) -> complex:
        return self.direction / abs(self.direction)

    def contains(self, z):
        return np.real(np.asarray(z) * np.conj(self.unit)) > 0

    def boundary_distance(self, z):
        return np.real(np.asarray(z) * np.conj(self.unit))

    def source(self):
        return f"halfplane({_c(self.direction)})"


@dataclass(frozen=True)
class Polygon(Domain):
    """Open convex polygon; vertices are stored counterclockwise."""

    vertices: Tuple[complex, ...]

    def __post_init__(self):
        v = [complex(p) for p in self.vertices]
        if len(v) < 3:
            raise ValueError("polygon needs at least three vertices")
        area = sum((a.conjugate() * b).imag for a, b in zip(v, v[1:] + v[:1])) / 2
        if area == 0:
            raise ValueError("degenerate polygon")
        if area < 0:
            v = v[::-1]
        for a, b, c in zip(v, v[1:] + v[:1], v[2:] + v[:2]):
            if ((b - a).conjugate() * (c - b)).imag < 0:
                raise ValueError("polygon domain must be convex")
        object.__setattr__(self, "vertices", tuple(v))

    def _edge_distances(self, z):
        z = np.asarray(z)
        v = self.vertices
        out = []
        for a, b in zip(v, v[1:] + v[:1]):
            e = (b - a) / abs(b - a)
            out.append(np.imag(np.conj(e) * (z - a)))
        return np.stack(out)

    def contains(self, z):
        return np.all(self._edge_distances(z) > 0, axis=0)

    def boundary_distance(self, z):
        return np.min(self._edge_distances(z), axis=0)

    def bbox(self):
        xs = [p.real for p in self.vertices]
        ys = [p.imag for p in self.vertices]
        return (min(xs), max(xs), min(ys), max(ys))

    def source(self):
        return "polygon(" + "; ".join(_c(p) for p in self.vertices) + ")"


@dataclass(frozen=True)
class Union(Domain):
    """Union of domains; treated as non-convex unless it has one part."""

    parts: Tuple[Domain, ...]

    @property
    def is_convex(self):
        return len(self.parts) == 1 and self.parts[0].is_convex

    def contains(self, z):
        return np.any(np.stack([p.contains(z) for p in self.parts]), axis=0)

    def boundary_distance(self, z):
        d = np.stack([p.boundary_distance(z) for p in self.parts])
        return np.max(d, axis=0)

    def bbox(self):
        boxes = [p.bbox() for p in self.parts]
        if any(b is None for b in boxes):
            return None
        return (min(b[0] for b in boxes), max(b[1] for b in boxes),
                min(b[2] for b in boxes), max(b[3] for b in boxes))

    def source(self):
        raise ValueError("union regions have no DSL form")


@dataclass(frozen=True)
class Box:
    """Axis-aligned sampling rectangle, optionally intersected with a domain."""

    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def __post_init__(self):
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ValueError("empty box")

    @classmethod
    def around(cls, center: complex, half_width: float) -> "Box":
        c = complex(center)
        return cls(c.real - half_width, c.real + half_width, c.imag - half_width, c.imag + half_width)

    @classmethod
    def parse(cls, text: str) -> "Box":
        parts = [float(p) for p in text.replace(",", " ").split()]
        if len(parts) != 4:
            raise ValueError("region must be 'xmin xmax ymin ymax'")
        return cls(*parts)

    def grid(self, n: int) -> np.ndarray:
        """Cell-centred ``n x n`` grid, flattened in row-major (y, x) order."""
        hx = (self.xmax - self.xmin) / n
        hy = (self.ymax - self.ymin) / n
        xs = self.xmin + hx * (np.arange(n) + 0.5)
        ys = self.ymin + hy * (np.arange(n) + 0.5)
        X, Y = np.meshgrid(xs, ys)
        return (X + 1j * Y).ravel()

    def spacing(self, n: int) -> float:
        return max((self.xmax - self.xmin) / n, (self.ymax - self.ymin) / n)

    def as_list(self):
        return [self.xmin, self.xmax, self.ymin, self.ymax]


def _c(c: complex) -> str:
    c = complex(c)
    if c.imag == 0:
        return repr(c.real)
    sign = "+" if c.imag >= 0 else "-"
    return f"{c.real!r}{sign}{abs(c.imag)!r}i"
