"""Phase-portrait export: SVG paths with per-trajectory ids and ``seed,t,x,y`` CSV rows."""

from __future__ import annotations

import csv
import io
from typing import Iterable, Optional, Sequence

import numpy as np

from .integrate import Trajectory, Verdict

_COLORS = {
    Verdict.REACHES: "#1f77b4",
    Verdict.EXITS: "#d62728",
    Verdict.CLOSES: "#2ca02c",
    Verdict.BUDGET: "#7f7f7f",
}


def trajectories_csv(trajs: Iterable[Trajectory]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id", "seed_x", "seed_y", "direction", "verdict", "t", "x", "y"])
    for k, tr in enumerate(trajs):
        for t, z in zip(tr.t, tr.z):
            w.writerow([k, repr(tr.seed.real), repr(tr.seed.imag), tr.direction, tr.verdict.value,
                        repr(float(t)), repr(float(z.real)), repr(float(z.imag))])
    return buf.getvalue()


def portrait_svg(trajs: Sequence[Trajectory], center: complex = 0j, R: float = 1.0,
                 size: int = 600, title: Optional[str] = None) -> str:
    """Square SVG of the disk ``|z - center| <= R``; y points up."""
    c = complex(center)
    scale = size / (2.2 * R)

    def xy(z):
        return (size / 2 + (z.real - c.real) * scale, size / 2 - (z.imag - c.imag) * scale)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">']
    if title:
        out.append(f"<title>{title}</title>")
    out.append(f'<circle cx="{size / 2:.2f}" cy="{size / 2:.2f}" r="{R * scale:.2f}" '
               'fill="none" stroke="#cccccc"/>')
    for k, tr in enumerate(trajs):
        pts = [xy(z) for z in np.asarray(tr.z)]
        d = "M " + " L ".join(f"{x:.2f} {y:.2f}" for x, y in pts)
        out.append(f'<path id="traj-{k}" class="{tr.verdict.value} dir{tr.direction:+d}" d="{d}" '
                   f'fill="none" stroke="{_COLORS[tr.verdict]}" stroke-width="1"/>')
    out.append(f'<circle cx="{size / 2:.2f}" cy="{size / 2:.2f}" r="3" fill="black"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
