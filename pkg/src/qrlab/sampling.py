"""Deterministic sampling plans (scrambled Halton with a fixed seed)."""

from __future__ import annotations

import numpy as np
from scipy.stats import qmc

DEFAULT_SEED = 20081028


def halton_points(n: int, box, seed: int = DEFAULT_SEED) -> np.ndarray:
    """``n`` low-discrepancy points in ``box`` (a ``Box``) as complex numbers."""
    u = qmc.Halton(d=2, scramble=True, seed=seed).random(n)
    x = box.xmin + (box.xmax - box.xmin) * u[:, 0]
    y = box.ymin + (box.ymax - box.ymin) * u[:, 1]
    return x + 1j * y


def halton_in_domain(n: int, box, domain, seed: int = DEFAULT_SEED, max_rounds: int = 20) -> np.ndarray:
    """``n`` points of the Halton stream that fall inside ``domain``."""
    draw = n
    for _ in range(max_rounds):
        pts = halton_points(draw, box, seed)
        pts = pts[domain.contains(pts)]
        if len(pts) >= n:
            return pts[:n]
        draw *= 2
    raise ValueError("domain covers too little of the sampling box")


def random_points(n: int, box, seed: int = DEFAULT_SEED) -> np.ndarray:
    rng = np.random.default_rng(seed)
    x = rng.uniform(box.xmin, box.xmax, n)
    y = rng.uniform(box.ymin, box.ymax, n)
    return x + 1j * y
