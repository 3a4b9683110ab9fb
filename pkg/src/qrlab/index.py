"""Local topological index by tracking the argument of ``f(z0 + r e^{it}) - f(z0)``."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .errors import UnresolvedError
from .mapdsl.maps import PiecewiseMap

SNAP_TOL = 0.25
AGREE_TOL = 1e-3  # in turns
JUMP_LIMIT = np.pi / 2


@dataclass
class IndexResult:
    center: complex
    radius: float
    raw: float
    index: int
    resolved: bool
    trail: List[dict] = field(default_factory=list)

    def to_dict(self):
        return dict(self.__dict__)


@dataclass
class RadiusStability:
    results: List[IndexResult]
    stable: bool

    @property
    def index(self) -> Optional[int]:
        return self.results[0].index if self.stable else None

    def to_dict(self):
        return {"stable": self.stable, "results": [r.to_dict() for r in self.results]}


def default_radius(m: PiecewiseMap, z0: complex) -> float:
    d = float(np.atleast_1d(m.domain.boundary_distance(complex(z0)))[0])
    return min(0.1, d / 4)


def _winding(w: np.ndarray):
    """Turns of the closed sampled loop ``w`` (first point not repeated) and max step angle."""
    steps = np.angle(np.roll(w, -1) / w)
    return float(np.sum(steps) / (2 * np.pi)), float(np.max(np.abs(steps)))


def local_index(m: PiecewiseMap, z0: complex, r: Optional[float] = None, samples: int = 64,
                max_samples: int = 1 << 18, retries: int = 6, min_modulus: float = 1e-12) -> IndexResult:
    """Index of ``m`` at ``z0`` along the circle of radius ``r``.

    The sampling density doubles until successive increments agree within
    1e-3 turns and no adjacent pair of samples turns by more than pi/2. If
    ``f - f(z0)`` nearly vanishes on the circle the radius is halved.
    """
    z0 = complex(z0)
    r = default_radius(m, z0) if r is None else float(r)
    f0 = complex(m.evaluate(z0))
    trail = []
    for _ in range(retries + 1):
        n = samples
        prev = None
        hit_zero = False
        while n <= max_samples:
            theta = 2 * np.pi * np.arange(n) / n
            w = m.evaluate(z0 + r * np.exp(1j * theta)) - f0
            if np.min(np.abs(w)) <= min_modulus * (1 + abs(f0)):
                hit_zero = True
                break
            turns, jump = _winding(w)
            trail.append({"radius": r, "samples": n, "turns": turns, "max_step": jump})
            if jump < JUMP_LIMIT and prev is not None and abs(turns - prev) < AGREE_TOL:
                snapped = int(round(turns))
                return IndexResult(z0, r, turns, snapped, abs(turns - snapped) < SNAP_TOL, trail)
            prev = turns if jump < JUMP_LIMIT else None
            n *= 2
        if not hit_zero:
            break
        trail.append({"radius": r, "samples": n, "zero_on_circle": True})
        r /= 2
    turns = trail[-1].get("turns", float("nan"))
    snapped = int(round(turns)) if np.isfinite(turns) else 0
    return IndexResult(z0, r, turns, snapped, False, trail)


def index_radius_stability(m: PiecewiseMap, z0: complex, radii: Sequence[float],
                           samples: int = 64) -> RadiusStability:
    results = [local_index(m, z0, r, samples) for r in radii]
    stable = all(res.resolved for res in results) and len({res.index for res in results}) == 1
    return RadiusStability(results, stable)


def certified_index(m: PiecewiseMap, z0: complex, r: Optional[float] = None) -> int:
    """Index certified at ``r`` and ``r/2``; raises if the two disagree or are unresolved."""
    r = default_radius(m, z0) if r is None else r
    check = index_radius_stability(m, z0, [r, r / 2])
    if not check.stable:
        raise UnresolvedError(f"index of {m.name} at {z0} is not stable under radius halving")
    return check.index
