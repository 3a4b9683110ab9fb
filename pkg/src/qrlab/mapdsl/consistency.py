"""Sampled checks that the pieces of a map agree on shared boundaries and cover the domain."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .. import sampling
from . import expr as E
from .domains import Box
from .guards import comparisons, evaluate_guard
from .maps import PiecewiseMap

BAND = 1e-6
DEFAULT_BOX = Box(-2.0, 2.0, -2.0, 2.0)


@dataclass
class ConsistencyReport:
    max_disagreement: float
    boundary_samples: int
    pairs_checked: int
    singular_skipped: int
    worst_point: Optional[complex] = None
    worst_pieces: Optional[tuple] = None

    def to_dict(self):
        return {
            "max_disagreement": self.max_disagreement,
            "boundary_samples": self.boundary_samples,
            "pairs_checked": self.pairs_checked,
            "singular_skipped": self.singular_skipped,
            "worst_point": self.worst_point,
            "worst_pieces": list(self.worst_pieces) if self.worst_pieces else None,
        }


@dataclass
class CoverageReport:
    samples: int
    uncovered: int
    uncovered_points: List[complex] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.uncovered == 0


def sampling_box(m: PiecewiseMap, box: Optional[Box] = None) -> Box:
    if box is not None:
        return box
    bb = m.domain.bbox()
    if bb is None:
        return DEFAULT_BOX
    return Box(*bb)


def _real_part(e, z, params):
    with np.errstate(all="ignore"):
        return np.real(np.broadcast_to(E.evaluate(e, z, params), z.shape))


def project_to_boundary(cmp, z0, params, iterations: int = 30, h: float = 1e-7):
    """Newton-project points onto the zero set of ``left - right`` of a comparison."""
    z = np.array(z0, dtype=complex)

    def g(p):
        return _real_part(cmp.left, p, params) - _real_part(cmp.right, p, params)

    for _ in range(iterations):
        gv = g(z)
        gx = (g(z + h) - g(z - h)) / (2 * h)
        gy = (g(z + 1j * h) - g(z - 1j * h)) / (2 * h)
        grad2 = gx * gx + gy * gy
        with np.errstate(all="ignore"):
            step = np.where(grad2 > 0, gv / grad2, 0.0)
        z = z - step * (gx + 1j * gy)
    gv = g(z)
    gx = (g(z + h) - g(z - h)) / (2 * h)
    gy = (g(z + 1j * h) - g(z - 1j * h)) / (2 * h)
    norm = np.hypot(gx, gy)
    with np.errstate(all="ignore"):
        dist = np.abs(gv) / norm
        normal = (gx + 1j * gy) / norm
    ok = np.isfinite(z) & (dist < 1e-10)
    # zero gradient at an exact zero (e.g. abs(z) <= 0 at the origin) is still a boundary point
    ok |= np.isfinite(z) & (np.abs(gv) < 1e-14)
    normal = np.where(np.isfinite(normal), normal, 1.0)
    return z, normal, ok


def piece_consistency(m: PiecewiseMap, samples: int = 1000, box: Optional[Box] = None,
                      band: float = BAND, seed: int = sampling.DEFAULT_SEED) -> ConsistencyReport:
    """Max ``|piece_i - piece_j|`` over boundary points where both guards fire within ``band``."""
    box = sampling_box(m, box)
    params = m.param_dict
    if m.reflect:
        box = Box(box.xmin, box.xmax, max(box.ymin, 0.0), max(box.ymax, 1e-3))
    seeds = sampling.halton_points(samples, box, seed)

    worst, worst_pt, worst_pair = 0.0, None, None
    total, pairs, skipped = 0, 0, 0
    atoms = []
    for piece in m.pieces:
        atoms += comparisons(piece.guard)
    for cmp in atoms:
        pts, normal, ok = project_to_boundary(cmp, seeds, params)
        keep = ok & m.domain.contains(pts)
        if m.reflect:
            keep &= np.imag(pts) >= 0
        pts, normal = pts[keep], normal[keep]
        if not len(pts):
            continue
        total += len(pts)
        fires = []
        for piece in m.pieces:
            hit = np.zeros(len(pts), dtype=bool)
            for s in (-1.0, 0.0, 1.0):
                probe = pts + s * band * normal
                with np.errstate(all="ignore"):
                    hit |= evaluate_guard(piece.guard, probe, params)
            fires.append(hit)
        values = []
        for piece in m.pieces:
            with np.errstate(all="ignore"):
                values.append(np.broadcast_to(E.evaluate(piece.expr, pts, params), pts.shape))
        for a in range(len(m.pieces)):
            for b in range(a + 1, len(m.pieces)):
                both = fires[a] & fires[b]
                if not both.any():
                    continue
                diff = np.abs(values[a][both] - values[b][both])
                finite = np.isfinite(diff)
                skipped += int((~finite).sum())
                pairs += int(finite.sum())
                if finite.any():
                    k = int(np.argmax(np.where(finite, diff, -1.0)))
                    if diff[k] > worst:
                        worst, worst_pt, worst_pair = float(diff[k]), complex(pts[both][k]), (a, b)
    if m.reflect:
        xs = np.linspace(box.xmin, box.xmax, samples) + 0j
        vals = m.evaluate(xs, errors="nan")
        diff = 2 * np.abs(np.imag(vals))
        finite = np.isfinite(diff)
        total += len(xs)
        pairs += int(finite.sum())
        skipped += int((~finite).sum())
        if finite.any():
            k = int(np.argmax(np.where(finite, diff, -1.0)))
            if diff[k] > worst:
                worst, worst_pt, worst_pair = float(diff[k]), complex(xs[k]), ("reflection", "reflection")
    return ConsistencyReport(worst, total, pairs, skipped, worst_pt, worst_pair)


def coverage(m: PiecewiseMap, samples: int = 10_000, box: Optional[Box] = None,
             seed: int = sampling.DEFAULT_SEED) -> CoverageReport:
    """Every sampled domain point must match at least one guard."""
    box = sampling_box(m, box)
    pts = sampling.halton_in_domain(samples, box, m.domain, seed)
    idx, _ = m.select(pts)
    bad = pts[idx < 0]
    return CoverageReport(len(pts), len(bad), [complex(p) for p in bad[:10]])
