"""Seed-based classification of the sectors around an isolated zero.

Each seed on a ring is traced both ways. A seed whose trajectory reaches
the zero in both time directions is elliptic evidence. One that exits the
annulus both ways lies in a hyperbolic sector. Adjacent hyperbolic seeds
whose exit points jump are separated by a separatrix, which is confirmed
by bisection before the sector count is split there.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import List, Optional

import numpy as np

from ..errors import DomainSingularityError
from ..index import local_index
from ..mapdsl.maps import PiecewiseMap
from .integrate import TraceConfig, Trajectory, Verdict, trace_many

JUMP = np.pi / 4
UNRESOLVED_LIMIT = 0.05


@dataclass
class SeedRecord:
    angle: float
    seed: complex
    kind: str  # E, H, P, C or U
    forward: Verdict
    backward: Verdict
    forward_end: complex
    backward_end: complex

    def to_dict(self):
        return {"angle": self.angle, "seed": self.seed, "kind": self.kind,
                "forward": self.forward.value, "backward": self.backward.value,
                "forward_end": self.forward_end, "backward_end": self.backward_end}


@dataclass
class SectorSummary:
    center: complex
    seed_radius: float
    R: float
    seeds: List[SeedRecord]
    n_e: int
    n_h: int
    boundaries: List[float]
    predicted_index: Optional[int]
    winding_index: int
    agreement: bool
    unresolved_fraction: float
    flagged: bool
    notes: List[str] = field(default_factory=list)

    @property
    def counts(self):
        out = {k: 0 for k in "EHPCU"}
        for s in self.seeds:
            out[s.kind] += 1
        return out

    def to_dict(self):
        return {
            "classification": "seed-based evidence",
            "center": self.center, "seed_radius": self.seed_radius, "R": self.R,
            "n_e": self.n_e, "n_h": self.n_h, "boundaries": self.boundaries,
            "predicted_index": self.predicted_index, "winding_index": self.winding_index,
            "agreement": self.agreement, "unresolved_fraction": self.unresolved_fraction,
            "flagged": self.flagged, "counts": self.counts, "notes": self.notes,
            "seeds": [s.to_dict() for s in self.seeds],
        }


def _kind(fw: Trajectory, bw: Trajectory) -> str:
    v = {fw.verdict, bw.verdict}
    if Verdict.BUDGET in v:
        return "U"
    if Verdict.CLOSES in v:
        return "C"
    if v == {Verdict.REACHES}:
        return "E"
    if v == {Verdict.EXITS}:
        return "H"
    return "P"


def _angdiff(a, b):
    return np.abs(np.angle(np.exp(1j * (np.asarray(a) - np.asarray(b)))))


def _exit_jump(fa, ba, fb, bb, c):
    return max(_angdiff(np.angle(fa - c), np.angle(fb - c)),
               _angdiff(np.angle(ba - c), np.angle(bb - c)))


def cyclic_runs(mask: np.ndarray) -> List[List[int]]:
    """Maximal cyclic runs of ``True`` entries, as lists of indices."""
    n = len(mask)
    if not mask.any():
        return []
    if mask.all():
        return [list(range(n))]
    start = int(np.flatnonzero(~mask)[0])
    runs, cur = [], []
    for off in range(1, n + 1):
        i = (start + off) % n
        if mask[i]:
            cur.append(i)
        elif cur:
            runs.append(cur)
            cur = []
    if cur:
        runs.append(cur)
    return runs


def _trace_pair(m, pts, cfg):
    fw = trace_many(m, pts, 1, cfg)
    bw = trace_many(m, pts, -1, cfg)
    return fw, bw


def _confirm_boundaries(m, cands, c, r, cfg, levels):
    """Bisect each candidate gap ``(theta_a, theta_b, ends_a, ends_b)``; returns confirmed angles."""
    live = list(cands)
    confirmed = []
    for _ in range(levels):
        if not live:
            break
        mids = np.array([0.5 * (a + b) for a, b, _, _ in live])
        fw, bw = _trace_pair(m, c + r * np.exp(1j * mids), cfg)
        nxt = []
        for (a, b, ea, eb), tm, f, w in zip(live, mids, fw, bw):
            if _kind(f, w) != "H":
                confirmed.append(float(tm))
                continue
            em = (f.end, w.end)
            ja = _exit_jump(ea[0], ea[1], em[0], em[1], c)
            jb = _exit_jump(em[0], em[1], eb[0], eb[1], c)
            if ja <= JUMP and jb <= JUMP:
                continue  # jump dissolved: same sector
            if ja >= jb:
                nxt.append((a, tm, ea, em))
            else:
                nxt.append((tm, b, em, eb))
        live = nxt
    confirmed.extend(0.5 * (a + b) for a, b, _, _ in live)
    return confirmed


def classify_sectors(m: PiecewiseMap, center: complex = 0j, seeds: int = 64,
                     config: Optional[TraceConfig] = None, seed_radius: Optional[float] = None,
                     bisect_levels: int = 8, index_radius: Optional[float] = None) -> SectorSummary:
    """Count elliptic and hyperbolic sectors of ``dz/dt = f`` at the zero ``center``.

    The Brouwer count ``1 + (n_e - n_h)/2`` is cross-checked against the
    winding index of ``f`` on the seed ring.
    """
    c = complex(center)
    cfg = replace(config or TraceConfig(), center=c)
    R = cfg.R
    r = seed_radius if seed_radius is not None else R / 2
    f0 = complex(m.evaluate(c, errors="nan"))
    if not np.isfinite(f0) or abs(f0) > 1e-9:
        raise DomainSingularityError(f"{c} is not a zero of the field (|f| = {abs(f0):.3g})")
    ring = c + r * np.exp(2j * np.pi * np.arange(8 * seeds) / (8 * seeds))
    fr = m.evaluate(ring, errors="nan")
    if not np.all(np.isfinite(fr)) or np.min(np.abs(fr)) < 1e-12:
        raise DomainSingularityError("field vanishes or is undefined on the seed ring; the zero may not be isolated")

    theta = 2 * np.pi * (np.arange(seeds) + 0.5) / seeds
    pts = c + r * np.exp(1j * theta)
    fw, bw = _trace_pair(m, pts, cfg)
    recs = [SeedRecord(float(t), complex(p), _kind(f, b), f.verdict, b.verdict, f.end, b.end)
            for t, p, f, b in zip(theta, pts, fw, bw)]
    kinds = np.array([s.kind for s in recs])
    notes = []

    n_e = len(cyclic_runs(kinds == "E"))

    # candidate separatrices between adjacent hyperbolic seeds
    cands = []
    for i in range(seeds):
        j = (i + 1) % seeds
        if kinds[i] == "H" and kinds[j] == "H":
            ei, ej = (fw[i].end, bw[i].end), (fw[j].end, bw[j].end)
            if _exit_jump(ei[0], ei[1], ej[0], ej[1], c) > JUMP:
                tb = theta[j] if j > i else theta[j] + 2 * np.pi
                cands.append((theta[i], tb, ei, ej))
    boundaries = sorted(float(np.mod(b, 2 * np.pi))
                        for b in _confirm_boundaries(m, cands, c, r, cfg, bisect_levels))

    n_h = 0
    for run in cyclic_runs(kinds == "H"):
        idx = set(run)
        inner = 0
        for i in run:
            j = (i + 1) % seeds
            if j in idx and any(_between(b, theta[i], theta[j]) for b in boundaries):
                inner += 1
        if len(run) == seeds:
            n_h += max(inner, 1)
        else:
            n_h += inner + 1

    unresolved = float(np.mean(kinds == "U"))
    flagged = unresolved > UNRESOLVED_LIMIT
    if flagged:
        notes.append(f"{unresolved:.1%} of seeds unresolved")
    if (n_e - n_h) % 2:
        notes.append("n_e - n_h is odd; the sector count is inconsistent")
        flagged = True
        predicted = None
    else:
        predicted = 1 + (n_e - n_h) // 2
    if np.any(kinds == "C") and np.any((kinds == "E") | (kinds == "H")):
        notes.append("closed orbits mixed with other seed kinds")

    ir = index_radius if index_radius is not None else r
    winding = local_index(m, c, ir).index
    agreement = predicted is not None and predicted == winding
    if not agreement:
        flagged = True
        notes.append(f"sector count predicts {predicted}, winding number is {winding}")
    return SectorSummary(c, r, R, recs, n_e, n_h, boundaries, predicted, winding, agreement,
                         unresolved, flagged, notes)


def _between(b, a, c):
    """``b`` lies on the ccw arc from ``a`` to ``c`` (arcs shorter than pi)."""
    return _angdiff(b, a) + _angdiff(c, b) <= _angdiff(c, a) + 1e-12
