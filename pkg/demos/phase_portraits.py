"""Sector counts against the winding index, with SVG portraits.

Run: python demos/phase_portraits.py [output-dir]
"""

import sys
from pathlib import Path

import numpy as np

from qrlab.flow import TraceConfig, classify_sectors, portrait_svg, trace_many
from qrlab.mapdsl import fixture, single_piece
from qrlab.wirtinger import gradient_field

FIELDS = {
    "source": single_piece("z", "z"),
    "saddle": single_piece("zbar", "conj(z)"),
    "square": fixture("power", n=2),
    "cube": fixture("power", n=3),
    "grad-u": gradient_field(fixture("grad2d")),
}


def main(out="demo-out"):
    out = Path(out)
    out.mkdir(exist_ok=True)
    print(f"{'field':8} {'n_e':>4} {'n_h':>4} {'1+(n_e-n_h)/2':>14} {'winding':>8}")
    for name, m in FIELDS.items():
        s = classify_sectors(m, 0, seeds=64)
        print(f"{name:8} {s.n_e:>4} {s.n_h:>4} {s.predicted_index:>14} {s.winding_index:>8}")
        seeds = 0.5 * np.exp(2j * np.pi * (np.arange(24) + 0.5) / 24)
        cfg = TraceConfig()
        trajs = trace_many(m, seeds, 1, cfg) + trace_many(m, seeds, -1, cfg)
        (out / f"{name}.svg").write_text(portrait_svg(trajs, 0, 1.0, title=name))
    print(f"portraits written to {out}/")


if __name__ == "__main__":
    main(*sys.argv[1:])
